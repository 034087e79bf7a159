#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssn/socsem.hpp"
#include "ssn/types.hpp"

namespace ssn {

// Statistics of the social layer given the fixed usage/semantic layers and
// actor positions.  Names in comments follow the convention z(a).
enum class EffectKind {
  edge,            // number of ties
  star2,           // sum_i C(d_i, 2)
  star3,           // sum_i C(d_i, 3)
  star4,           // sum_i C(d_i, 4)
  star5,           // sum_i C(d_i, 5)
  triangle,        // closed triads
  cycle4,          // 4-cycles
  alt_star,        // geometrically weighted degree, parameter lambda
  alt_triangle,    // geometrically weighted shared partners of ties
  alt_twopath,     // geometrically weighted shared partners of all dyads
  position_match,  // ties between same-position actors
  usage_activity,  // sum_i d_i * usage-degree_i
  shared_concept,  // sum over ties of jointly used concepts
  threepath_xbx,   // sum over ties of usage-degree products minus joint use
  assoc_cycle,     // sum over ties of semantically linked usage pairs
};

// Restricts a dyad-sum statistic to same-position or cross-position ties.
enum class AttributeMode { none, match, mismatch };

struct EffectSpec {
  EffectKind kind = EffectKind::edge;
  AttributeMode attribute_mode = AttributeMode::none;
  double lambda = 2.0;  // only read by the alternating statistics

  std::string name() const;
  static EffectSpec from_name(const std::string& name, double lambda = 2.0);
  void validate() const;
  bool operator==(const EffectSpec& o) const {
    return kind == o.kind && attribute_mode == o.attribute_mode && lambda == o.lambda;
  }
};

// Everything that stays fixed while the social layer varies: usage degrees,
// per-dyad joint concept counts CX = X X^T, semantic affiliation
// AXB = X S X^T, position agreement and the structural-zero mask.
struct EffectWorkspace {
  int n = 0;
  std::vector<int> usage_degree;          // n
  std::vector<int> cx;                    // n*n
  std::vector<int> axb;                   // n*n
  std::vector<std::uint8_t> same_position;  // n*n
  std::vector<std::uint8_t> mask;           // n*n, 1 = structurally zero
  std::vector<std::pair<int, int>> free_dyads;

  EffectWorkspace() = default;
  explicit EffectWorkspace(const SocioSemanticNetwork& net);

  bool masked(int i, int j) const { return mask[static_cast<std::size_t>(i) * n + j] != 0; }
};

// Global statistic on the given adjacency (row-major n*n, symmetric 0/1).
double count(const EffectWorkspace& ws, const std::vector<std::uint8_t>& adj,
             const EffectSpec& spec);

// All statistics of a model in one pass (shared degree / common-neighbor
// scratch).  Rejects duplicate effects.
std::vector<double> count_vector(const EffectWorkspace& ws, const std::vector<std::uint8_t>& adj,
                                 const std::vector<EffectSpec>& model);

// z(a with ij=1) - z(a with ij=0); the state of (i,j) in adj does not matter.
// Masked or degenerate dyads are argument errors.
double change_statistic(const EffectWorkspace& ws, const std::vector<std::uint8_t>& adj,
                        const EffectSpec& spec, int i, int j);

std::vector<double> change_vector(const EffectWorkspace& ws, const std::vector<std::uint8_t>& adj,
                                  const std::vector<EffectSpec>& model, int i, int j);

// Convenience wrappers over net.social.
double count(const SocioSemanticNetwork& net, const EffectSpec& spec);
std::vector<double> count_vector(const SocioSemanticNetwork& net,
                                 const std::vector<EffectSpec>& model);

// All catalog names, for CLI validation and reports.
std::vector<std::string> effect_catalog();

}  // namespace ssn
