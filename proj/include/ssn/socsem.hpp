#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ssn/semantic.hpp"
#include "ssn/types.hpp"

namespace ssn {

// Undirected, binary actor-actor layer.  adj is row-major n*n with a zero
// diagonal and symmetric entries.
struct SocialLayer {
  Relation relation = Relation::friendship;
  std::vector<MemberId> members;
  std::vector<std::uint8_t> adj;

  int n() const { return static_cast<int>(members.size()); }
  bool edge(int i, int j) const { return adj[static_cast<std::size_t>(i) * members.size() + j] != 0; }
  void set_edge(int i, int j, bool v);
  long long edge_count() const;
  int index_of(const MemberId& m) const;  // -1 when absent
  void validate() const;
};

// Binary actor-concept affiliation: x(i, w) = 1 iff member i's stable
// individual network contains concept w.
struct UsageLayer {
  int n_actors = 0;
  int n_concepts = 0;
  std::vector<std::uint8_t> x;

  bool link(int i, int w) const { return x[static_cast<std::size_t>(i) * n_concepts + w] != 0; }
  void set_link(int i, int w, bool v);
  long long link_count() const;
};

// The assembled two-layer object the model operates on.  The semantic layer
// is binary concept-concept adjacency; zero_mask lists actor dyads fixed at
// "no tie" (all cross-group pairs), each stored with i < j.
struct SocioSemanticNetwork {
  std::vector<ActorAttributes> actors;
  std::vector<std::string> concepts;
  SocialLayer social;
  UsageLayer usage;
  std::vector<std::uint8_t> semantic;
  std::vector<std::pair<int, int>> zero_mask;

  int n_actors() const { return static_cast<int>(actors.size()); }
  int n_concepts() const { return static_cast<int>(concepts.size()); }
  bool semantic_edge(int w, int v) const {
    return semantic[static_cast<std::size_t>(w) * concepts.size() + v] != 0;
  }
  bool masked(int i, int j) const;
  // dyads free to vary, i < j, in lexicographic order
  std::vector<std::pair<int, int>> free_dyads() const;
  void validate() const;
};

// One completed survey: who the reporter nominated, and which third-party
// dyads they confirmed as tied.
struct SurveyResponse {
  MemberId reporter;
  Relation relation = Relation::friendship;
  std::set<MemberId> nominated;
  std::set<std::pair<MemberId, MemberId>> confirmed;
};

// Builds the social layer from surveys: a dyad is tied when nomination is
// mutual, or when exactly one side nominated and a majority of the remaining
// core members confirmed the tie (strictly more than (|core|-2)/2).
SocialLayer reconcile_survey_ties(const std::vector<SurveyResponse>& responses,
                                  const std::vector<MemberId>& core_members, Relation relation);

// Per-group extraction results feeding assembly.
struct GroupExtraction {
  std::string group_id;
  SemanticNetwork group_net;                          // stable union with provenance
  std::map<MemberId, SemanticNetwork> individual_nets;  // stable, keyed by member
};

// Joins attributes, the social layer and per-group semantic material into one
// object.  Actor order follows `actors`; concepts are grouped by group_id in
// actor-table order and sorted within each group.  Cross-group dyads become
// structural zeros; a social tie on a masked dyad is an error.
SocioSemanticNetwork assemble(const std::vector<GroupExtraction>& groups,
                              const SocialLayer& social,
                              const std::vector<ActorAttributes>& actors);

// JSON round-trip and GraphML export.
std::string serialize(const SocioSemanticNetwork& net);
SocioSemanticNetwork deserialize(const std::string& json_text);
void write_graphml(const SocioSemanticNetwork& net, std::ostream& out);

}  // namespace ssn
