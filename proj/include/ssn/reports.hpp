#pragma once

#include <string>
#include <vector>

#include "ssn/semantic.hpp"
#include "ssn/socsem.hpp"

namespace ssn {

// Which social dyads a concept or association must bridge to be reported.
enum class DyadMode { within_position, cross_position, one_position_only };

DyadMode dyad_mode_from_string(const std::string& s);
const char* to_string(DyadMode m);

struct SharedConceptRow {
  std::string concept_id;
  long long artist_freq = 0;   // total frequency across all artist members
  long long manager_freq = 0;  // total frequency across all manager members
  long long total = 0;
};

struct SharedAssociationRow {
  ConceptPair association;
  long long times_used = 0;  // group-level weight
  bool in_all_dyads = false; // bridges every qualifying dyad
};

// Concepts used by both endpoints of at least one social tie of the requested
// kind, with group-wide per-position frequencies.  "Used by" means the concept
// appears in the member's provenance in the group network.  Rows are sorted by
// total descending, then concept name.  one_position_only keeps concepts that
// qualify within exactly one position class.
std::vector<SharedConceptRow> report_shared_concepts(const SemanticNetwork& group,
                                                     const SocialLayer& social,
                                                     const std::vector<ActorAttributes>& actors,
                                                     DyadMode mode);

// Group associations {w,v} realized across at least one social tie, i.e. one
// endpoint uses w and the other uses v.  With require_all_dyads, only
// associations realized across every qualifying dyad are kept.  Rows are
// sorted by times_used descending, then association.
std::vector<SharedAssociationRow> report_shared_associations(
    const SemanticNetwork& group, const SocialLayer& social,
    const std::vector<ActorAttributes>& actors, DyadMode mode, bool require_all_dyads = false);

}  // namespace ssn
