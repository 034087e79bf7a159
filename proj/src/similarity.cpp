#include "ssn/similarity.hpp"

#include <cmath>
#include <map>

namespace ssn {

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b, bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (a.empty() && b.empty()) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

SimilarityMatrix similarity_matrix(const std::vector<SemanticNetwork>& nets,
                                   SimilarityBasis basis) {
  const int n = static_cast<int>(nets.size());
  SimilarityMatrix out;
  out.basis = basis;
  out.values = Eigen::MatrixXd::Identity(n, n);
  std::vector<std::set<std::string>> sets(n);
  for (int i = 0; i < n; ++i) {
    out.members.push_back(nets[i].owner);
    if (basis == SimilarityBasis::concepts) {
      sets[i] = nets[i].concept_set();
    } else {
      for (const auto& [pair, w] : nets[i].assoc_weight)
        sets[i].insert(pair.first + "\t" + pair.second);
    }
  }
  // pair index p -> (i, j), filled in parallel then flags collected in order
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<std::uint8_t> flagged(pairs.size(), 0);
  const int npairs = static_cast<int>(pairs.size());
#pragma omp parallel for schedule(dynamic) if (npairs > 64)
  for (int p = 0; p < npairs; ++p) {
    const auto [i, j] = pairs[p];
    if (sets[i].empty() || sets[j].empty()) {
      out.values(i, j) = out.values(j, i) = 0.0;
      flagged[p] = 1;
    } else {
      bool deg = false;
      const double s = jaccard(sets[i], sets[j], &deg);
      out.values(i, j) = out.values(j, i) = s;
    }
  }
  for (int p = 0; p < npairs; ++p)
    if (flagged[p]) out.degenerate_pairs.push_back(pairs[p]);
  return out;
}

Embedding2D classical_mds(const SimilarityMatrix& sim) {
  const int n = static_cast<int>(sim.members.size());
  if (n < 3) throw std::invalid_argument("classical_mds: need at least three members");
  if (sim.values.rows() != n || sim.values.cols() != n)
    throw std::invalid_argument("classical_mds: matrix size does not match member list");
  for (int i = 0; i < n; ++i) {
    if (std::abs(sim.values(i, i) - 1.0) > 1e-12)
      throw std::invalid_argument("classical_mds: similarity diagonal must be 1");
    for (int j = 0; j < n; ++j) {
      const double v = sim.values(i, j);
      if (v < -1e-12 || v > 1.0 + 1e-12)
        throw std::invalid_argument("classical_mds: similarities must lie in [0,1]");
      if (std::abs(v - sim.values(j, i)) > 1e-12)
        throw std::invalid_argument("classical_mds: similarity matrix must be symmetric");
    }
  }

  // distances and double-centered Gram matrix B = -1/2 * J D^2 J
  Eigen::MatrixXd d2(n, n);
  Eigen::MatrixXd dist(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = i == j ? 0.0 : 1.0 - sim.values(i, j);
      dist(i, j) = d;
      d2(i, j) = d * d;
    }
  }
  const Eigen::MatrixXd J =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const Eigen::MatrixXd B = -0.5 * J * d2 * J;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
  if (solver.info() != Eigen::Success)
    throw NumericalError("classical_mds: eigendecomposition failed");

  Embedding2D emb;
  emb.members = sim.members;
  emb.coordinates.assign(n, {0.0, 0.0});
  for (int axis = 0; axis < 2; ++axis) {
    const int col = n - 1 - axis;  // eigenvalues come back ascending
    const double lambda = std::max(0.0, solver.eigenvalues()(col));
    emb.eigenvalues[axis] = lambda;
    Eigen::VectorXd v = solver.eigenvectors().col(col);
    // pin the reflection: largest-magnitude loading is positive
    int arg = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
    if (v(arg) < 0) v = -v;
    const double scale = std::sqrt(lambda);
    for (int i = 0; i < n; ++i) emb.coordinates[i][axis] = v(i) * scale;
  }

  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = emb.coordinates[i][0] - emb.coordinates[j][0];
      const double dy = emb.coordinates[i][1] - emb.coordinates[j][1];
      const double fitted = std::sqrt(dx * dx + dy * dy);
      num += (dist(i, j) - fitted) * (dist(i, j) - fitted);
      den += dist(i, j) * dist(i, j);
    }
  }
  emb.stress = den == 0.0 ? 0.0 : std::sqrt(num / den);
  return emb;
}

double graph_density(int n, long long edges) {
  if (n < 2) throw std::invalid_argument("density undefined for fewer than two nodes");
  const long long dyads = static_cast<long long>(n) * (n - 1) / 2;
  if (edges < 0 || edges > dyads) throw std::invalid_argument("edge count out of range");
  return static_cast<double>(edges) / static_cast<double>(dyads);
}

double average_degree(int n, long long edges) {
  if (n < 1) throw std::invalid_argument("average degree undefined for an empty graph");
  return 2.0 * static_cast<double>(edges) / static_cast<double>(n);
}

double genre_variation(const std::vector<std::string>& genres) {
  if (genres.empty()) throw std::invalid_argument("genre variation needs at least one member");
  std::map<std::string, long long> counts;
  for (const auto& g : genres) ++counts[g];
  const double n = static_cast<double>(genres.size());
  double sumsq = 0.0;
  for (const auto& [g, c] : counts) {
    const double share = static_cast<double>(c) / n;
    sumsq += share * share;
  }
  return 1.0 - sumsq;
}

double genre_variation_normalized(const std::vector<std::string>& genres) {
  const double raw = genre_variation(genres);
  const std::size_t k = genres.size();
  if (k == 1) return 0.0;
  const double max_raw = 1.0 - 1.0 / static_cast<double>(k);
  return raw / max_raw;
}

Descriptives descriptives(int n, long long edges, const std::vector<std::string>& genres) {
  Descriptives d;
  d.density = graph_density(n, edges);
  d.average_degree = average_degree(n, edges);
  if (!genres.empty()) {
    d.genre_variation = genre_variation(genres);
    d.genre_variation_normalized = genre_variation_normalized(genres);
  }
  return d;
}

}  // namespace ssn
