#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ssn/effects.hpp"

namespace ssn {

struct ModelSpec {
  std::vector<EffectSpec> effects;
  std::vector<double> theta;

  void validate() const;  // sizes match, effects distinct, theta finite
};

struct ChainConfig {
  long long burn_in = 100000;
  long long thin = 100;        // proposals between retained samples
  long long sample_size = 1000;
  std::uint64_t seed = 1;

  void validate() const;
};

// Metropolis single-toggle chain over the unmasked dyads.  Acceptance uses
// change statistics; retained statistic vectors are recounted from scratch.
class Sampler {
 public:
  Sampler(const SocioSemanticNetwork& net, ModelSpec model, std::uint64_t seed);

  void step();                 // one proposal
  void run(long long steps);   // throws DegeneracyError when pinned at 0/max ties
  void reset(const std::vector<std::uint8_t>& adjacency);
  void set_theta(const std::vector<double>& theta);

  const std::vector<std::uint8_t>& adjacency() const { return adj_; }
  std::vector<double> statistics() const;  // full recount on the current state
  long long edge_count() const { return edges_; }
  long long proposals() const { return proposals_; }
  double acceptance_rate() const {
    return proposals_ == 0 ? 0.0 : static_cast<double>(accepts_) / proposals_;
  }
  const EffectWorkspace& workspace() const { return ws_; }
  const ModelSpec& model() const { return model_; }

 private:
  EffectWorkspace ws_;
  ModelSpec model_;
  std::vector<std::uint8_t> adj_;
  std::mt19937_64 rng_;
  long long edges_ = 0;
  long long max_edges_ = 0;
  long long proposals_ = 0;
  long long accepts_ = 0;
  long long pinned_run_ = 0;
};

struct SimulationResult {
  std::vector<std::string> statistic_names;
  std::vector<std::vector<double>> samples;           // sample_size x p
  std::vector<std::vector<std::uint8_t>> networks;    // filled when keep_networks
};

SimulationResult simulate(const SocioSemanticNetwork& net, const ModelSpec& model,
                          const ChainConfig& cfg, bool keep_networks = false);

struct EstimationConfig {
  ChainConfig chain;                    // phase 3; phases 1-2 reuse seed/thin/burn_in
  int phase1_samples_per_effect = 100;
  int subphases = 5;
  int subphase_iterations = 200;        // Robbins-Monro updates per sub-phase
  long long steps_per_update = 0;       // proposals between updates; 0 = twice the free dyads
  double initial_gain = 0.1;
  double max_step = 0.5;                // per-coordinate clamp on phase 2 updates
  int max_rounds = 3;
  double t_threshold = 0.1;
  std::vector<double> initial_theta;    // empty = automatic (edge-density heuristic)

  void validate() const;
};

struct FitResult {
  std::vector<EffectSpec> effects;
  std::vector<double> theta;            // estimate
  std::vector<double> standard_error;
  std::vector<double> convergence_t;    // (simulated mean - observed) / sd
  std::vector<double> observed;
  Eigen::MatrixXd covariance;           // simulated statistic covariance at theta
  bool converged = false;
  int rounds = 0;
  std::vector<std::string> log;
};

// Three-phase stochastic approximation (Robbins-Monro) for the MLE, with a
// moment-matching Newton correction between rounds when phase 3 fails its
// convergence check.  Throws ValidationError when the observed statistics sit
// on the attainable boundary (no MLE), DegeneracyError from pinned chains.
FitResult estimate(const SocioSemanticNetwork& net, const std::vector<EffectSpec>& effects,
                   const EstimationConfig& cfg);

struct GofRow {
  std::string statistic;
  double observed = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double t = 0.0;  // (observed - mean) / sd
  bool zero_variance = false;
  bool in_model = false;
};

struct GofReport {
  std::vector<GofRow> rows;
  long long sample_size = 0;
};

// Simulates at the fitted parameters and compares observed statistics, both
// for the model's own effects and the auxiliary list.  Requires a converged
// fit.  Zero-variance rows are flagged, not fatal.
GofReport gof(const SocioSemanticNetwork& net, const FitResult& fit,
              const std::vector<EffectSpec>& auxiliary, const ChainConfig& cfg);

// Full enumeration of all social layers over the free dyads (Gray-code walk
// maintaining the statistic vector through change statistics).  Usable for
// exact expectations, covariances and maximum likelihood on instances with at
// most max_free_dyads free dyads.
class ExactOracle {
 public:
  ExactOracle(const SocioSemanticNetwork& net, std::vector<EffectSpec> effects,
              int max_free_dyads = 21);

  int free_dyad_count() const { return static_cast<int>(free_dyads_); }
  const std::vector<double>& observed() const { return observed_; }
  // distinct statistic vectors with graph multiplicities
  const std::map<std::vector<double>, double>& table() const { return table_; }

  double log_partition(const std::vector<double>& theta) const;
  std::vector<double> expected_statistics(const std::vector<double>& theta) const;
  Eigen::MatrixXd covariance(const std::vector<double>& theta) const;

  // damped Newton ascent of the exact likelihood; NumericalError when the
  // target sits on the attainable boundary (no MLE) or the ascent diverges
  std::vector<double> mle(const std::vector<double>& observed_stats, double tol = 1e-9,
                          int max_iterations = 500) const;
  std::vector<double> mle() const { return mle(observed_); }

 private:
  std::vector<EffectSpec> effects_;
  std::vector<double> observed_;
  std::map<std::vector<double>, double> table_;
  std::size_t free_dyads_ = 0;
};

}  // namespace ssn
