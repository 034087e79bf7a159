#include "ssn/effects.hpp"

#include <algorithm>
#include <cmath>

namespace ssn {
namespace {

struct KindInfo {
  EffectKind kind;
  const char* name;
  bool alternating;     // uses lambda
  bool attr_capable;    // supports match/mismatch
};

constexpr KindInfo kKinds[] = {
    {EffectKind::edge, "edge", false, false},
    {EffectKind::star2, "star2", false, false},
    {EffectKind::star3, "star3", false, false},
    {EffectKind::star4, "star4", false, false},
    {EffectKind::star5, "star5", false, false},
    {EffectKind::triangle, "triangle", false, false},
    {EffectKind::cycle4, "cycle4", false, false},
    {EffectKind::alt_star, "alt_star", true, false},
    {EffectKind::alt_triangle, "alt_triangle", true, false},
    {EffectKind::alt_twopath, "alt_twopath", true, false},
    {EffectKind::position_match, "position_match", false, false},
    {EffectKind::usage_activity, "usage_activity", false, false},
    {EffectKind::shared_concept, "shared_concept", false, true},
    {EffectKind::threepath_xbx, "threepath_xbx", false, true},
    {EffectKind::assoc_cycle, "assoc_cycle", false, true},
};

const KindInfo& info(EffectKind k) {
  for (const auto& ki : kKinds)
    if (ki.kind == k) return ki;
  throw std::invalid_argument("unknown effect kind");
}

long long choose(long long d, int k) {
  if (d < k) return 0;
  long long r = 1;
  for (int t = 0; t < k; ++t) r = r * (d - t) / (t + 1);
  return r;
}

int star_order(EffectKind k) {
  switch (k) {
    case EffectKind::star2: return 2;
    case EffectKind::star3: return 3;
    case EffectKind::star4: return 4;
    default: return 5;
  }
}

// Degrees and common-neighbor counts of the current adjacency.
struct Scratch {
  std::vector<int> degree;  // n
  std::vector<int> cn;      // n*n

  Scratch(int n, const std::vector<std::uint8_t>& adj) : degree(n, 0), cn() {
    for (int i = 0; i < n; ++i) {
      int d = 0;
      const std::uint8_t* row = adj.data() + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) d += row[j];
      degree[i] = d;
    }
    cn.assign(static_cast<std::size_t>(n) * n, 0);
#pragma omp parallel for schedule(static) if (n > 64)
    for (int i = 0; i < n; ++i) {
      const std::uint8_t* ri = adj.data() + static_cast<std::size_t>(i) * n;
      for (int j = i + 1; j < n; ++j) {
        const std::uint8_t* rj = adj.data() + static_cast<std::size_t>(j) * n;
        int c = 0;
        for (int k = 0; k < n; ++k) c += ri[k] & rj[k];
        cn[static_cast<std::size_t>(i) * n + j] = c;
        cn[static_cast<std::size_t>(j) * n + i] = c;
      }
    }
  }
};

bool dyad_counts(const EffectWorkspace& ws, const EffectSpec& spec, int i, int j) {
  const auto same = ws.same_position[static_cast<std::size_t>(i) * ws.n + j] != 0;
  switch (spec.attribute_mode) {
    case AttributeMode::match: return same;
    case AttributeMode::mismatch: return !same;
    default: return true;
  }
}

double count_impl(const EffectWorkspace& ws, const std::vector<std::uint8_t>& adj,
                  const EffectSpec& spec, const Scratch& sc) {
  const int n = ws.n;
  const auto a = [&](int i, int j) { return adj[static_cast<std::size_t>(i) * n + j] != 0; };
  const auto cn = [&](int i, int j) { return sc.cn[static_cast<std::size_t>(i) * n + j]; };

  switch (spec.kind) {
    case EffectKind::edge: {
      long long z = 0;
      for (int i = 0; i < n; ++i) z += sc.degree[i];
      return static_cast<double>(z / 2);
    }
    case EffectKind::star2:
    case EffectKind::star3:
    case EffectKind::star4:
    case EffectKind::star5: {
      const int k = star_order(spec.kind);
      long long z = 0;
      for (int i = 0; i < n; ++i) z += choose(sc.degree[i], k);
      return static_cast<double>(z);
    }
    case EffectKind::triangle: {
      // each closed triad is counted once per edge
      long long z = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (a(i, j)) z += cn(i, j);
      return static_cast<double>(z / 3);
    }
    case EffectKind::cycle4: {
      long long twice = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) twice += choose(cn(i, j), 2);
      return static_cast<double>(twice) / 2.0;
    }
    case EffectKind::alt_star: {
      const double base = 1.0 - 1.0 / spec.lambda;
      double z = 0.0;
      for (int i = 0; i < n; ++i)
        z += std::pow(base, sc.degree[i]) + sc.degree[i] / spec.lambda - 1.0;
      return spec.lambda * spec.lambda * z;
    }
    case EffectKind::alt_triangle: {
      const double base = 1.0 - 1.0 / spec.lambda;
      double z = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (a(i, j)) z += 1.0 - std::pow(base, cn(i, j));
      return spec.lambda * z;
    }
    case EffectKind::alt_twopath: {
      const double base = 1.0 - 1.0 / spec.lambda;
      double z = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) z += 1.0 - std::pow(base, cn(i, j));
      return spec.lambda * z;
    }
    case EffectKind::position_match: {
      long long z = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (a(i, j) && ws.same_position[static_cast<std::size_t>(i) * n + j]) ++z;
      return static_cast<double>(z);
    }
    case EffectKind::usage_activity: {
      long long z = 0;
      for (int i = 0; i < n; ++i)
        z += static_cast<long long>(sc.degree[i]) * ws.usage_degree[i];
      return static_cast<double>(z);
    }
    case EffectKind::shared_concept: {
      long long z = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (a(i, j) && dyad_counts(ws, spec, i, j))
            z += ws.cx[static_cast<std::size_t>(i) * n + j];
      return static_cast<double>(z);
    }
    case EffectKind::threepath_xbx: {
      long long z = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (a(i, j) && dyad_counts(ws, spec, i, j))
            z += static_cast<long long>(ws.usage_degree[i]) * ws.usage_degree[j] -
                 ws.cx[static_cast<std::size_t>(i) * n + j];
      return static_cast<double>(z);
    }
    case EffectKind::assoc_cycle: {
      long long z = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (a(i, j) && dyad_counts(ws, spec, i, j))
            z += ws.axb[static_cast<std::size_t>(i) * n + j];
      return static_cast<double>(z);
    }
  }
  throw std::invalid_argument("unknown effect kind");
}

}  // namespace

std::string EffectSpec::name() const {
  std::string base = info(kind).name;
  switch (attribute_mode) {
    case AttributeMode::match: return base + "_match";
    case AttributeMode::mismatch: return base + "_mismatch";
    default: return base;
  }
}

EffectSpec EffectSpec::from_name(const std::string& name, double lambda) {
  const auto parse = [&](const std::string& base, AttributeMode mode) -> const KindInfo* {
    for (const auto& ki : kKinds)
      if (base == ki.name) {
        if (mode != AttributeMode::none && !ki.attr_capable) return nullptr;
        return &ki;
      }
    return nullptr;
  };
  EffectSpec spec;
  spec.lambda = lambda;
  // literal names win over suffix interpretation ("position_match" is a kind)
  const KindInfo* ki = parse(name, AttributeMode::none);
  if (!ki && name.size() > 9 && name.substr(name.size() - 9) == "_mismatch") {
    spec.attribute_mode = AttributeMode::mismatch;
    ki = parse(name.substr(0, name.size() - 9), spec.attribute_mode);
  } else if (!ki && name.size() > 6 && name.substr(name.size() - 6) == "_match") {
    spec.attribute_mode = AttributeMode::match;
    ki = parse(name.substr(0, name.size() - 6), spec.attribute_mode);
  }
  if (!ki) throw ValidationError("unknown effect '" + name + "'");
  spec.kind = ki->kind;
  spec.validate();
  return spec;
}

void EffectSpec::validate() const {
  const KindInfo& ki = info(kind);
  if (ki.alternating && !(lambda > 1.0))
    throw ValidationError("effect " + std::string(ki.name) + ": lambda must be > 1");
  if (attribute_mode != AttributeMode::none && !ki.attr_capable)
    throw ValidationError("effect " + std::string(ki.name) +
                          " does not take a match/mismatch qualifier");
}

std::vector<std::string> effect_catalog() {
  std::vector<std::string> names;
  for (const auto& ki : kKinds) {
    names.push_back(ki.name);
    if (ki.attr_capable) {
      names.push_back(std::string(ki.name) + "_match");
      names.push_back(std::string(ki.name) + "_mismatch");
    }
  }
  return names;
}

EffectWorkspace::EffectWorkspace(const SocioSemanticNetwork& net) {
  net.validate();
  n = net.n_actors();
  const int m = net.n_concepts();
  usage_degree.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    int d = 0;
    for (int w = 0; w < m; ++w) d += net.usage.link(i, w);
    usage_degree[i] = d;
  }

  cx.assign(static_cast<std::size_t>(n) * n, 0);
  axb.assign(static_cast<std::size_t>(n) * n, 0);
  // sxt[i] = S x_i, so axb(i,j) = x_j . sxt[i]
  std::vector<std::vector<int>> sx(n, std::vector<int>(m, 0));
#pragma omp parallel for schedule(static) if (n > 16)
  for (int i = 0; i < n; ++i) {
    for (int w = 0; w < m; ++w) {
      if (!net.usage.link(i, w)) continue;
      const std::uint8_t* srow = net.semantic.data() + static_cast<std::size_t>(w) * m;
      for (int v = 0; v < m; ++v) sx[i][v] += srow[v];
    }
  }
#pragma omp parallel for schedule(static) if (n > 16)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j < i) continue;
      int c = 0;
      int s = 0;
      for (int w = 0; w < m; ++w) {
        const int xj = net.usage.link(j, w) ? 1 : 0;
        c += (net.usage.link(i, w) ? 1 : 0) & xj;
        s += xj * sx[i][w];
      }
      cx[static_cast<std::size_t>(i) * n + j] = c;
      cx[static_cast<std::size_t>(j) * n + i] = c;
      axb[static_cast<std::size_t>(i) * n + j] = s;
      axb[static_cast<std::size_t>(j) * n + i] = s;
    }
  }

  same_position.assign(static_cast<std::size_t>(n) * n, 0);
  mask.assign(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      same_position[static_cast<std::size_t>(i) * n + j] =
          net.actors[i].position == net.actors[j].position ? 1 : 0;
  for (const auto& [i, j] : net.zero_mask) {
    mask[static_cast<std::size_t>(i) * n + j] = 1;
    mask[static_cast<std::size_t>(j) * n + i] = 1;
  }
  free_dyads = net.free_dyads();
}

double count(const EffectWorkspace& ws, const std::vector<std::uint8_t>& adj,
             const EffectSpec& spec) {
  spec.validate();
  if (adj.size() != static_cast<std::size_t>(ws.n) * ws.n)
    throw std::invalid_argument("count: adjacency size mismatch");
  const Scratch sc(ws.n, adj);
  return count_impl(ws, adj, spec, sc);
}

std::vector<double> count_vector(const EffectWorkspace& ws, const std::vector<std::uint8_t>& adj,
                                 const std::vector<EffectSpec>& model) {
  if (model.empty()) throw ValidationError("model has no effects");
  for (std::size_t i = 0; i < model.size(); ++i) {
    model[i].validate();
    for (std::size_t j = i + 1; j < model.size(); ++j)
      if (model[i] == model[j])
        throw ValidationError("duplicate effect '" + model[i].name() + "' in model");
  }
  if (adj.size() != static_cast<std::size_t>(ws.n) * ws.n)
    throw std::invalid_argument("count_vector: adjacency size mismatch");
  const Scratch sc(ws.n, adj);
  std::vector<double> out;
  out.reserve(model.size());
  for (const auto& spec : model) out.push_back(count_impl(ws, adj, spec, sc));
  return out;
}

double change_statistic(const EffectWorkspace& ws, const std::vector<std::uint8_t>& adj,
                        const EffectSpec& spec, int i, int j) {
  spec.validate();
  const int n = ws.n;
  if (i < 0 || j < 0 || i >= n || j >= n || i == j)
    throw std::invalid_argument("change_statistic: bad dyad");
  if (ws.masked(i, j))
    throw std::invalid_argument("change_statistic: dyad (" + std::to_string(i) + "," +
                                std::to_string(j) + ") is structurally zero");
  const auto at = [&](int a, int b) -> bool {
    // read adjacency with the toggled dyad forced off
    if ((a == i && b == j) || (a == j && b == i)) return false;
    return adj[static_cast<std::size_t>(a) * n + b] != 0;
  };
  const auto deg0 = [&](int v) {
    int d = 0;
    for (int k = 0; k < n; ++k)
      if (k != v && at(v, k)) ++d;
    return d;
  };
  const auto cn0 = [&](int a, int b) {
    int c = 0;
    for (int k = 0; k < n; ++k)
      if (k != a && k != b && at(a, k) && at(b, k)) ++c;
    return c;
  };

  switch (spec.kind) {
    case EffectKind::edge:
      return 1.0;
    case EffectKind::star2:
    case EffectKind::star3:
    case EffectKind::star4:
    case EffectKind::star5: {
      const int k = star_order(spec.kind);
      return static_cast<double>(choose(deg0(i), k - 1) + choose(deg0(j), k - 1));
    }
    case EffectKind::triangle:
      return static_cast<double>(cn0(i, j));
    case EffectKind::cycle4: {
      // new 3-paths j-x, x-y, y-i closed by the toggled edge
      long long z = 0;
      for (int x = 0; x < n; ++x) {
        if (x == i || x == j || !at(j, x)) continue;
        for (int y = 0; y < n; ++y) {
          if (y == i || y == j || y == x) continue;
          if (at(x, y) && at(y, i)) ++z;
        }
      }
      return static_cast<double>(z);
    }
    case EffectKind::alt_star: {
      const double base = 1.0 - 1.0 / spec.lambda;
      return spec.lambda * (2.0 - std::pow(base, deg0(i)) - std::pow(base, deg0(j)));
    }
    case EffectKind::alt_triangle: {
      const double base = 1.0 - 1.0 / spec.lambda;
      double z = spec.lambda * (1.0 - std::pow(base, cn0(i, j)));
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j || !at(i, k) || !at(j, k)) continue;
        z += std::pow(base, cn0(i, k)) + std::pow(base, cn0(j, k));
      }
      return z;
    }
    case EffectKind::alt_twopath: {
      const double base = 1.0 - 1.0 / spec.lambda;
      double z = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (at(j, k)) z += std::pow(base, cn0(i, k));
        if (at(i, k)) z += std::pow(base, cn0(j, k));
      }
      return z;
    }
    case EffectKind::position_match:
      return ws.same_position[static_cast<std::size_t>(i) * n + j] ? 1.0 : 0.0;
    case EffectKind::usage_activity:
      return static_cast<double>(ws.usage_degree[i] + ws.usage_degree[j]);
    case EffectKind::shared_concept:
      return dyad_counts(ws, spec, i, j)
                 ? static_cast<double>(ws.cx[static_cast<std::size_t>(i) * n + j])
                 : 0.0;
    case EffectKind::threepath_xbx:
      return dyad_counts(ws, spec, i, j)
                 ? static_cast<double>(
                       static_cast<long long>(ws.usage_degree[i]) * ws.usage_degree[j] -
                       ws.cx[static_cast<std::size_t>(i) * n + j])
                 : 0.0;
    case EffectKind::assoc_cycle:
      return dyad_counts(ws, spec, i, j)
                 ? static_cast<double>(ws.axb[static_cast<std::size_t>(i) * n + j])
                 : 0.0;
  }
  throw std::invalid_argument("unknown effect kind");
}

std::vector<double> change_vector(const EffectWorkspace& ws, const std::vector<std::uint8_t>& adj,
                                  const std::vector<EffectSpec>& model, int i, int j) {
  std::vector<double> out;
  out.reserve(model.size());
  for (const auto& spec : model) out.push_back(change_statistic(ws, adj, spec, i, j));
  return out;
}

double count(const SocioSemanticNetwork& net, const EffectSpec& spec) {
  const EffectWorkspace ws(net);
  return count(ws, net.social.adj, spec);
}

std::vector<double> count_vector(const SocioSemanticNetwork& net,
                                 const std::vector<EffectSpec>& model) {
  const EffectWorkspace ws(net);
  return count_vector(ws, net.social.adj, model);
}

}  // namespace ssn
