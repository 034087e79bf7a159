#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssn/semantic.hpp"
#include "ssn/types.hpp"

namespace ssn {

enum class SimilarityBasis { concepts, associations };

struct SimilarityMatrix {
  std::vector<MemberId> members;
  SimilarityBasis basis = SimilarityBasis::concepts;
  Eigen::MatrixXd values;
  // pairs (i, j) where at least one side had an empty set; their similarity is 0 by convention
  std::vector<std::pair<int, int>> degenerate_pairs;
};

struct Embedding2D {
  std::vector<MemberId> members;
  std::vector<std::array<double, 2>> coordinates;
  std::array<double, 2> eigenvalues{0.0, 0.0};
  double stress = 0.0;  // residual between input distances and embedded distances
};

struct Descriptives {
  double density = 0.0;
  double average_degree = 0.0;
  double genre_variation = 0.0;             // 1 - sum of squared genre shares
  double genre_variation_normalized = 0.0;  // scaled so the all-distinct case is 1
};

// |A∩B| / |A∪B|; both sets empty yields 0 and sets *degenerate.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b,
               bool* degenerate = nullptr);

// Pairwise Jaccard over members' stable concept sets or association sets.
// Diagonal is 1; comparisons involving an empty set are 0 and flagged.
SimilarityMatrix similarity_matrix(const std::vector<SemanticNetwork>& nets,
                                   SimilarityBasis basis);

// Classical (Torgerson) scaling of D = 1 - S into the plane: double-center
// -D^2/2, take the two leading nonnegative eigenvalues.  Requires n >= 3.
Embedding2D classical_mds(const SimilarityMatrix& sim);

double graph_density(int n, long long edges);
double average_degree(int n, long long edges);
double genre_variation(const std::vector<std::string>& genres);
double genre_variation_normalized(const std::vector<std::string>& genres);

// Summary of an undirected simple graph given per-node genres (may be empty
// strings for nodes without one; they still count as a category).
Descriptives descriptives(int n, long long edges, const std::vector<std::string>& genres);

}  // namespace ssn
