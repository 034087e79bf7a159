#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ssn/corpus.hpp"
#include "ssn/types.hpp"

namespace ssn {

// Unordered concept pair, stored with first < second.
using ConceptPair = std::pair<std::string, std::string>;

inline ConceptPair make_pair_sorted(std::string a, std::string b) {
  return a < b ? ConceptPair{std::move(a), std::move(b)} : ConceptPair{std::move(b), std::move(a)};
}

// A weighted undirected co-occurrence network over stems.  For group
// networks built by union_group_network, *_sources record how much each
// member contributed (the key set is the provenance).
struct SemanticNetwork {
  std::string owner;  // member_id, or group_id for union networks
  bool stable_only = false;
  std::map<std::string, long long> concept_freq;
  std::map<ConceptPair, long long> assoc_weight;
  std::map<std::string, std::map<MemberId, long long>> concept_sources;
  std::map<ConceptPair, std::map<MemberId, long long>> assoc_sources;

  bool has_concept(const std::string& c) const { return concept_freq.count(c) != 0; }
  std::set<std::string> concept_set() const;
  std::set<ConceptPair> assoc_set() const;
};

// Links every pair of adjacent, distinct tokens within each sentence; token
// frequency counts every occurrence.  No self-loops (adjacent repeats add
// frequency but no association).
SemanticNetwork build_individual_network(const MemberId& owner,
                                         const std::vector<Sentence>& sentences);

// Keeps associations with weight >= threshold.  Concepts are kept regardless
// unless prune_isolates is set, in which case concepts left without any
// surviving association are dropped.
SemanticNetwork filter_stable(const SemanticNetwork& net, long long threshold = 2,
                              bool prune_isolates = false);

// Sums stable individual networks into one group network and records member
// provenance.  All inputs must be stable-filtered and have distinct owners.
SemanticNetwork union_group_network(const std::string& group_id,
                                    const std::vector<SemanticNetwork>& members);

}  // namespace ssn
