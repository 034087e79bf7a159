// Times the production statistic kernels against the serial reference
// implementation on random layered instances, checking agreement as it goes.
//
//   bench_kernels [max_n]
//
// The production kernels parallelize with OpenMP above small-n thresholds;
// set OMP_NUM_THREADS to control the comparison.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "ssn/effects.hpp"
#include "ssn/reference.hpp"
#include "ssn/socsem.hpp"

using namespace ssn;

namespace {

SocioSemanticNetwork random_instance(std::mt19937_64& rng, int n, int m) {
  SocioSemanticNetwork net;
  for (int i = 0; i < n; ++i) {
    ActorAttributes a;
    a.member_id = "m" + std::to_string(i);
    a.group_id = "G";
    a.position = i % 2 ? Position::manager : Position::artist;
    net.actors.push_back(std::move(a));
    net.social.members.push_back("m" + std::to_string(i));
  }
  for (int w = 0; w < m; ++w) net.concepts.push_back("c" + std::to_string(w));
  net.social.relation = Relation::collaboration;
  net.social.adj.assign(static_cast<std::size_t>(n) * n, 0);
  net.usage.n_actors = n;
  net.usage.n_concepts = m;
  net.usage.x.assign(static_cast<std::size_t>(n) * m, 0);
  net.semantic.assign(static_cast<std::size_t>(m) * m, 0);
  for (int i = 0; i < n; ++i)
    for (int w = 0; w < m; ++w)
      if (uniform_below(rng, 100) < 30) net.usage.set_link(i, w, true);
  for (int w = 0; w < m; ++w)
    for (int v = w + 1; v < m; ++v)
      if (uniform_below(rng, 100) < 10) {
        net.semantic[static_cast<std::size_t>(w) * m + v] = 1;
        net.semantic[static_cast<std::size_t>(v) * m + w] = 1;
      }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (uniform_below(rng, 100) < 10) net.social.set_edge(i, j, true);
  net.validate();
  return net;
}

template <class F>
double time_ms(F&& body, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    body();
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    best = std::min(best, ms);
  }
  return best;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    d = std::max(d, std::abs(a[k] - b[k]) / (1.0 + std::abs(b[k])));
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  const int max_n = argc > 1 ? std::atoi(argv[1]) : 160;
  std::vector<EffectSpec> model;
  for (const auto& name : effect_catalog()) model.push_back(EffectSpec::from_name(name));

  std::printf("threads: %d, model: %zu effect specs\n", omp_get_max_threads(), model.size());
  std::printf("%-14s %6s %6s | %12s %12s %9s | %9s\n", "kernel", "n", "m", "prod (ms)",
              "ref (ms)", "speedup", "max rel d");

  std::mt19937_64 rng(7);
  for (int n : {24, 48, 96, 160}) {
    if (n > max_n) break;
    const int m = n;
    const auto net = random_instance(rng, n, m);

    // global statistic vector: workspace construction plus the full count
    std::vector<double> fast, slow;
    const double t_fast = time_ms(
        [&] {
          EffectWorkspace ws(net);
          fast = count_vector(ws, net.social.adj, model);
        },
        3);
    const double t_slow = time_ms(
        [&] { slow = reference::count_vector(net, net.social.adj, model); }, n >= 96 ? 1 : 3);
    std::printf("%-14s %6d %6d | %12.3f %12.3f %8.1fx | %9.2e\n", "count_vector", n, m, t_fast,
                t_slow, t_slow / t_fast, max_abs_diff(fast, slow));

    // change statistics over a fixed budget of dyads
    const EffectWorkspace ws(net);
    std::vector<std::pair<int, int>> dyads = ws.free_dyads;
    if (dyads.size() > 48) dyads.resize(48);
    double check = 0.0;
    const double c_fast = time_ms(
        [&] {
          for (const auto& [i, j] : dyads) {
            const auto dz = change_vector(ws, net.social.adj, model, i, j);
            check += dz[0];
          }
        },
        3);
    const double c_slow = time_ms(
        [&] {
          for (const auto& [i, j] : dyads)
            for (const auto& spec : model)
              check += reference::change_by_recount(net, net.social.adj, spec, i, j);
        },
        n >= 96 ? 1 : 3);
    std::printf("%-14s %6d %6d | %12.3f %12.3f %8.1fx | %9s\n", "change_vector", n, m,
                c_fast / static_cast<double>(dyads.size()),
                c_slow / static_cast<double>(dyads.size()), c_slow / c_fast, "per dyad");
    if (check == -1.0) std::printf("(unreachable)\n");  // keep the loops observable
  }
  return 0;
}
