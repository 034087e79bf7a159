#include "ssn/semantic.hpp"

namespace ssn {

std::set<std::string> SemanticNetwork::concept_set() const {
  std::set<std::string> s;
  for (const auto& [c, f] : concept_freq) s.insert(c);
  return s;
}

std::set<ConceptPair> SemanticNetwork::assoc_set() const {
  std::set<ConceptPair> s;
  for (const auto& [p, w] : assoc_weight) s.insert(p);
  return s;
}

SemanticNetwork build_individual_network(const MemberId& owner,
                                         const std::vector<Sentence>& sentences) {
  SemanticNetwork net;
  net.owner = owner;
  for (const auto& sentence : sentences) {
    const auto& t = sentence.tokens;
    for (std::size_t i = 0; i < t.size(); ++i) {
      ++net.concept_freq[t[i]];
      if (i + 1 < t.size() && t[i] != t[i + 1])
        ++net.assoc_weight[make_pair_sorted(t[i], t[i + 1])];
    }
  }
  return net;
}

SemanticNetwork filter_stable(const SemanticNetwork& net, long long threshold,
                              bool prune_isolates) {
  if (threshold < 1) throw ValidationError("stability threshold must be >= 1");
  SemanticNetwork out;
  out.owner = net.owner;
  out.stable_only = true;
  for (const auto& [pair, w] : net.assoc_weight)
    if (w >= threshold) out.assoc_weight.emplace(pair, w);
  if (prune_isolates) {
    std::set<std::string> linked;
    for (const auto& [pair, w] : out.assoc_weight) {
      linked.insert(pair.first);
      linked.insert(pair.second);
    }
    for (const auto& [c, f] : net.concept_freq)
      if (linked.count(c)) out.concept_freq.emplace(c, f);
  } else {
    out.concept_freq = net.concept_freq;
  }
  return out;
}

SemanticNetwork union_group_network(const std::string& group_id,
                                    const std::vector<SemanticNetwork>& members) {
  SemanticNetwork out;
  out.owner = group_id;
  out.stable_only = true;
  std::set<std::string> owners;
  for (const auto& m : members) {
    if (!m.stable_only)
      throw ValidationError("group union requires stable-filtered networks (owner '" + m.owner +
                            "' is unfiltered)");
    if (!owners.insert(m.owner).second)
      throw ValidationError("duplicate member network for '" + m.owner + "' in group union");
    for (const auto& [c, f] : m.concept_freq) {
      out.concept_freq[c] += f;
      out.concept_sources[c][m.owner] += f;
    }
    for (const auto& [pair, w] : m.assoc_weight) {
      out.assoc_weight[pair] += w;
      out.assoc_sources[pair][m.owner] += w;
    }
  }
  return out;
}

}  // namespace ssn
