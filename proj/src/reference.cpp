#include "ssn/reference.hpp"

#include <cmath>

namespace ssn::reference {
namespace {

long long choose_ll(long long d, int k) {
  if (d < k || k < 0) return 0;
  long long r = 1;
  for (int t = 0; t < k; ++t) r = r * (d - t) / (t + 1);
  return r;
}

struct View {
  const SocioSemanticNetwork& net;
  const std::vector<std::uint8_t>& adj;
  int n;
  int m;

  View(const SocioSemanticNetwork& net_, const std::vector<std::uint8_t>& adj_)
      : net(net_), adj(adj_), n(net_.n_actors()), m(net_.n_concepts()) {
    if (adj.size() != static_cast<std::size_t>(n) * n)
      throw std::invalid_argument("reference count: adjacency size mismatch");
  }

  bool a(int i, int j) const { return adj[static_cast<std::size_t>(i) * n + j] != 0; }
  bool x(int i, int w) const { return net.usage.link(i, w); }
  bool s(int w, int v) const { return net.semantic_edge(w, v); }
  bool same_pos(int i, int j) const {
    return net.actors[i].position == net.actors[j].position;
  }
  bool dyad_counts(const EffectSpec& spec, int i, int j) const {
    switch (spec.attribute_mode) {
      case AttributeMode::match: return same_pos(i, j);
      case AttributeMode::mismatch: return !same_pos(i, j);
      default: return true;
    }
  }
  int degree(int i) const {
    int d = 0;
    for (int k = 0; k < n; ++k)
      if (k != i && a(i, k)) ++d;
    return d;
  }
  int usage_degree(int i) const {
    int d = 0;
    for (int w = 0; w < m; ++w)
      if (x(i, w)) ++d;
    return d;
  }
  int common_neighbors(int i, int j) const {
    int c = 0;
    for (int k = 0; k < n; ++k)
      if (k != i && k != j && a(i, k) && a(j, k)) ++c;
    return c;
  }
};

// count of k-subsets of neighbors, done by explicit recursive enumeration
long long subsets_of_neighbors(const View& v, int i, int k) {
  std::vector<int> nb;
  for (int j = 0; j < v.n; ++j)
    if (j != i && v.a(i, j)) nb.push_back(j);
  long long total = 0;
  // iterative k-combination walk
  std::vector<int> idx(k);
  const int d = static_cast<int>(nb.size());
  if (d < k) return 0;
  for (int t = 0; t < k; ++t) idx[t] = t;
  for (;;) {
    ++total;
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == d - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int t = pos + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
  return total;
}

double count_impl(const View& v, const EffectSpec& spec) {
  const int n = v.n;
  switch (spec.kind) {
    case EffectKind::edge: {
      long long z = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (v.a(i, j)) ++z;
      return static_cast<double>(z);
    }
    case EffectKind::star2:
    case EffectKind::star3:
    case EffectKind::star4:
    case EffectKind::star5: {
      int k = 2;
      if (spec.kind == EffectKind::star3) k = 3;
      if (spec.kind == EffectKind::star4) k = 4;
      if (spec.kind == EffectKind::star5) k = 5;
      long long z = 0;
      for (int i = 0; i < n; ++i) z += subsets_of_neighbors(v, i, k);
      return static_cast<double>(z);
    }
    case EffectKind::triangle: {
      long long z = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          for (int k = j + 1; k < n; ++k)
            if (v.a(i, j) && v.a(j, k) && v.a(i, k)) ++z;
      return static_cast<double>(z);
    }
    case EffectKind::cycle4: {
      // ordered closed 4-walks over distinct vertices; each cycle appears
      // 8 times (4 rotations x 2 directions)
      long long walks = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              if (i == j || i == k || i == l || j == k || j == l || k == l) continue;
              if (v.a(i, j) && v.a(j, k) && v.a(k, l) && v.a(l, i)) ++walks;
            }
      return static_cast<double>(walks) / 8.0;
    }
    case EffectKind::alt_star: {
      // alternating series  sum_{k>=2} (-1)^k S_k / lambda^(k-2)
      double z = 0.0;
      for (int k = 2; k < n; ++k) {
        long long sk = 0;
        for (int i = 0; i < n; ++i) sk += subsets_of_neighbors(v, i, k);
        if (sk == 0) continue;
        z += (k % 2 == 0 ? 1.0 : -1.0) * static_cast<double>(sk) /
             std::pow(spec.lambda, k - 2);
      }
      return z;
    }
    case EffectKind::alt_triangle: {
      // sum_{k>=1} (-1)^(k+1) T_k / lambda^(k-1), T_k = sum over ties of
      // C(shared partners, k)
      double z = 0.0;
      for (int k = 1; k < n; ++k) {
        long long tk = 0;
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j)
            if (v.a(i, j)) tk += choose_ll(v.common_neighbors(i, j), k);
        if (tk == 0) continue;
        z += (k % 2 == 1 ? 1.0 : -1.0) * static_cast<double>(tk) /
             std::pow(spec.lambda, k - 1);
      }
      return z;
    }
    case EffectKind::alt_twopath: {
      double z = 0.0;
      for (int k = 1; k < n; ++k) {
        long long uk = 0;
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j) uk += choose_ll(v.common_neighbors(i, j), k);
        if (uk == 0) continue;
        z += (k % 2 == 1 ? 1.0 : -1.0) * static_cast<double>(uk) /
             std::pow(spec.lambda, k - 1);
      }
      return z;
    }
    case EffectKind::position_match: {
      long long z = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (v.a(i, j) && v.same_pos(i, j)) ++z;
      return static_cast<double>(z);
    }
    case EffectKind::usage_activity: {
      // per tie, both endpoints' usage degrees
      long long z = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (v.a(i, j)) z += v.usage_degree(i) + v.usage_degree(j);
      return static_cast<double>(z);
    }
    case EffectKind::shared_concept: {
      long long z = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          if (!v.a(i, j) || !v.dyad_counts(spec, i, j)) continue;
          for (int w = 0; w < v.m; ++w)
            if (v.x(i, w) && v.x(j, w)) ++z;
        }
      return static_cast<double>(z);
    }
    case EffectKind::threepath_xbx: {
      // 3-paths w - i - j - v with distinct concepts w, v
      long long z = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          if (!v.a(i, j) || !v.dyad_counts(spec, i, j)) continue;
          for (int w = 0; w < v.m; ++w)
            for (int u = 0; u < v.m; ++u)
              if (w != u && v.x(i, w) && v.x(j, u)) ++z;
        }
      return static_cast<double>(z);
    }
    case EffectKind::assoc_cycle: {
      // 4-cycles i - w - v - j - i alternating layers
      long long z = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          if (!v.a(i, j) || !v.dyad_counts(spec, i, j)) continue;
          for (int w = 0; w < v.m; ++w)
            for (int u = w + 1; u < v.m; ++u) {
              if (!v.s(w, u)) continue;
              if (v.x(i, w) && v.x(j, u)) ++z;
              if (v.x(i, u) && v.x(j, w)) ++z;
            }
        }
      return static_cast<double>(z);
    }
  }
  throw std::invalid_argument("unknown effect kind");
}

}  // namespace

double count(const SocioSemanticNetwork& net, const std::vector<std::uint8_t>& adj,
             const EffectSpec& spec) {
  spec.validate();
  return count_impl(View(net, adj), spec);
}

double count(const SocioSemanticNetwork& net, const EffectSpec& spec) {
  return count(net, net.social.adj, spec);
}

std::vector<double> count_vector(const SocioSemanticNetwork& net,
                                 const std::vector<std::uint8_t>& adj,
                                 const std::vector<EffectSpec>& model) {
  std::vector<double> out;
  out.reserve(model.size());
  for (const auto& spec : model) out.push_back(count(net, adj, spec));
  return out;
}

double change_by_recount(const SocioSemanticNetwork& net, const std::vector<std::uint8_t>& adj,
                         const EffectSpec& spec, int i, int j) {
  const int n = net.n_actors();
  std::vector<std::uint8_t> with = adj;
  with[static_cast<std::size_t>(i) * n + j] = 1;
  with[static_cast<std::size_t>(j) * n + i] = 1;
  std::vector<std::uint8_t> without = adj;
  without[static_cast<std::size_t>(i) * n + j] = 0;
  without[static_cast<std::size_t>(j) * n + i] = 0;
  return count(net, with, spec) - count(net, without, spec);
}

}  // namespace ssn::reference
