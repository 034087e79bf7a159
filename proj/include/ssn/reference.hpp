#pragma once

#include <cstdint>
#include <vector>

#include "ssn/effects.hpp"
#include "ssn/socsem.hpp"

namespace ssn::reference {

// Slow, serial statistic counts by direct enumeration: stars as neighbor
// subsets, cycles as vertex tuples, alternating statistics as their
// alternating series, bipartite statistics as explicit path/cycle loops.
// Deliberately separate from the production kernels so the two can be
// checked against each other (and benchmarked).
double count(const SocioSemanticNetwork& net, const std::vector<std::uint8_t>& adj,
             const EffectSpec& spec);
double count(const SocioSemanticNetwork& net, const EffectSpec& spec);
std::vector<double> count_vector(const SocioSemanticNetwork& net,
                                 const std::vector<std::uint8_t>& adj,
                                 const std::vector<EffectSpec>& model);

// Change statistic as a difference of two full recounts.
double change_by_recount(const SocioSemanticNetwork& net, const std::vector<std::uint8_t>& adj,
                         const EffectSpec& spec, int i, int j);

}  // namespace ssn::reference
