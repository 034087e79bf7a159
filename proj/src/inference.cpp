#include "ssn/inference.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace ssn {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> mean_of(const std::vector<std::vector<double>>& rows) {
  const std::size_t p = rows.front().size();
  std::vector<double> m(p, 0.0);
  for (const auto& r : rows)
    for (std::size_t e = 0; e < p; ++e) m[e] += r[e];
  for (auto& v : m) v /= static_cast<double>(rows.size());
  return m;
}

Eigen::MatrixXd covariance_of(const std::vector<std::vector<double>>& rows,
                              const std::vector<double>& mean) {
  const int p = static_cast<int>(mean.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p, p);
  for (const auto& r : rows)
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) c(a, b) += (r[a] - mean[a]) * (r[b] - mean[b]);
  c /= static_cast<double>(rows.size() - 1);
  return c;
}

Eigen::MatrixXd ridged(const Eigen::MatrixXd& c) {
  const int p = static_cast<int>(c.rows());
  const double eps = 1e-10 * (1.0 + c.trace() / p);
  return c + eps * Eigen::MatrixXd::Identity(p, p);
}

std::string format_vector(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(4);
  os << "[";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << "]";
  return os.str();
}

}  // namespace

void ModelSpec::validate() const {
  if (effects.empty()) throw ValidationError("model has no effects");
  if (theta.size() != effects.size())
    throw ValidationError("model: theta length does not match effect count");
  for (std::size_t i = 0; i < effects.size(); ++i) {
    effects[i].validate();
    if (!std::isfinite(theta[i]))
      throw ValidationError("model: theta for '" + effects[i].name() + "' is not finite");
    for (std::size_t j = i + 1; j < effects.size(); ++j)
      if (effects[i] == effects[j])
        throw ValidationError("duplicate effect '" + effects[i].name() + "' in model");
  }
}

void ChainConfig::validate() const {
  if (burn_in < 0) throw ValidationError("chain: burn_in must be >= 0");
  if (thin < 1) throw ValidationError("chain: thin must be >= 1");
  if (sample_size < 2) throw ValidationError("chain: sample_size must be >= 2");
}

void EstimationConfig::validate() const {
  chain.validate();
  if (phase1_samples_per_effect < 2)
    throw ValidationError("estimation: phase1_samples_per_effect must be >= 2");
  if (subphases < 1) throw ValidationError("estimation: subphases must be >= 1");
  if (subphase_iterations < 2)
    throw ValidationError("estimation: subphase_iterations must be >= 2");
  if (steps_per_update < 0) throw ValidationError("estimation: steps_per_update must be >= 0");
  if (!(initial_gain > 0.0)) throw ValidationError("estimation: initial_gain must be > 0");
  if (!(max_step > 0.0)) throw ValidationError("estimation: max_step must be > 0");
  if (max_rounds < 1) throw ValidationError("estimation: max_rounds must be >= 1");
  if (!(t_threshold > 0.0)) throw ValidationError("estimation: t_threshold must be > 0");
  for (const double v : initial_theta)
    if (!std::isfinite(v)) throw ValidationError("estimation: initial_theta must be finite");
}

Sampler::Sampler(const SocioSemanticNetwork& net, ModelSpec model, std::uint64_t seed)
    : ws_(net), model_(std::move(model)), adj_(net.social.adj), rng_(seed) {
  model_.validate();
  if (ws_.free_dyads.empty())
    throw ValidationError("sampler: network has no free dyads");
  max_edges_ = static_cast<long long>(ws_.free_dyads.size());
  edges_ = 0;
  for (const auto& [i, j] : ws_.free_dyads)
    if (adj_[static_cast<std::size_t>(i) * ws_.n + j]) ++edges_;
}

void Sampler::reset(const std::vector<std::uint8_t>& adjacency) {
  if (adjacency.size() != adj_.size())
    throw std::invalid_argument("sampler reset: adjacency size mismatch");
  adj_ = adjacency;
  edges_ = 0;
  for (const auto& [i, j] : ws_.free_dyads)
    if (adj_[static_cast<std::size_t>(i) * ws_.n + j]) ++edges_;
  pinned_run_ = 0;
}

void Sampler::step() {
  const auto& fd = ws_.free_dyads;
  const auto [i, j] = fd[uniform_below(rng_, fd.size())];
  const auto dz = change_vector(ws_, adj_, model_.effects, i, j);
  double logr = dot(model_.theta, dz);
  const std::size_t n = static_cast<std::size_t>(ws_.n);
  const bool present = adj_[static_cast<std::size_t>(i) * n + j] != 0;
  if (present) logr = -logr;
  ++proposals_;
  const bool accept = logr >= 0.0 || uniform_unit(rng_) < std::exp(logr);
  if (accept) {
    ++accepts_;
    const std::uint8_t v = present ? 0 : 1;
    adj_[static_cast<std::size_t>(i) * n + j] = v;
    adj_[static_cast<std::size_t>(j) * n + i] = v;
    edges_ += present ? -1 : 1;
  }
  if (edges_ == 0 || edges_ == max_edges_) {
    ++pinned_run_;
    if (pinned_run_ > 10LL * ws_.n) {
      std::ostringstream os;
      os << "degenerate chain: " << (edges_ == 0 ? "empty" : "complete")
         << " graph held for " << pinned_run_ << " consecutive proposals (theta "
         << format_vector(model_.theta) << ", " << proposals_ << " proposals)";
      throw DegeneracyError(os.str());
    }
  } else {
    pinned_run_ = 0;
  }
}

void Sampler::run(long long steps) {
  for (long long s = 0; s < steps; ++s) step();
}

std::vector<double> Sampler::statistics() const {
  return count_vector(ws_, adj_, model_.effects);
}

void Sampler::set_theta(const std::vector<double>& theta) {
  if (theta.size() != model_.effects.size())
    throw std::invalid_argument("set_theta: wrong length");
  for (const double v : theta)
    if (!std::isfinite(v)) throw std::invalid_argument("set_theta: not finite");
  model_.theta = theta;
}

SimulationResult simulate(const SocioSemanticNetwork& net, const ModelSpec& model,
                          const ChainConfig& cfg, bool keep_networks) {
  cfg.validate();
  Sampler sampler(net, model, cfg.seed);
  sampler.run(cfg.burn_in);
  SimulationResult out;
  for (const auto& e : model.effects) out.statistic_names.push_back(e.name());
  out.samples.reserve(cfg.sample_size);
  for (long long s = 0; s < cfg.sample_size; ++s) {
    sampler.run(cfg.thin);
    out.samples.push_back(sampler.statistics());
    if (keep_networks) out.networks.push_back(sampler.adjacency());
  }
  return out;
}

FitResult estimate(const SocioSemanticNetwork& net, const std::vector<EffectSpec>& effects,
                   const EstimationConfig& cfg) {
  cfg.validate();
  const int p = static_cast<int>(effects.size());
  EffectWorkspace ws(net);
  if (ws.free_dyads.empty()) throw ValidationError("estimate: network has no free dyads");
  const int n = ws.n;
  const long long F = static_cast<long long>(ws.free_dyads.size());

  const std::vector<double> z_obs = count_vector(ws, net.social.adj, effects);

  // boundary pre-check: every catalog statistic is nondecreasing in ties, so
  // its attainable extremes sit at the empty and the complete unmasked graph
  {
    std::vector<std::uint8_t> lo(static_cast<std::size_t>(n) * n, 0);
    std::vector<std::uint8_t> hi(static_cast<std::size_t>(n) * n, 0);
    for (const auto& [i, j] : ws.free_dyads) {
      hi[static_cast<std::size_t>(i) * n + j] = 1;
      hi[static_cast<std::size_t>(j) * n + i] = 1;
    }
    const auto z_lo = count_vector(ws, lo, effects);
    const auto z_hi = count_vector(ws, hi, effects);
    for (int e = 0; e < p; ++e) {
      const std::string name = effects[e].name();
      if (z_lo[e] == z_hi[e])
        throw ValidationError("estimate: statistic '" + name +
                              "' is constant on this network; drop it from the model");
      if (z_obs[e] == z_lo[e])
        throw ValidationError("estimate: observed '" + name +
                              "' attains its minimum; the MLE does not exist");
      if (z_obs[e] == z_hi[e])
        throw ValidationError("estimate: observed '" + name +
                              "' attains its maximum; the MLE does not exist");
    }
  }

  std::vector<double> theta(p, 0.0);
  if (!cfg.initial_theta.empty()) {
    if (static_cast<int>(cfg.initial_theta.size()) != p)
      throw ValidationError("estimation: initial_theta length does not match the model");
    theta = cfg.initial_theta;
  } else {
    for (int e = 0; e < p; ++e)
      if (effects[e].kind == EffectKind::edge) {
        const double edges = z_obs[e];
        theta[e] = std::log(edges / (static_cast<double>(F) - edges));
      }
  }

  FitResult fit;
  fit.effects = effects;
  fit.observed = z_obs;

  std::mt19937_64 seeder(cfg.chain.seed);
  const long long steps_per_update =
      cfg.steps_per_update > 0 ? cfg.steps_per_update : 2 * F;

  // phase 1: covariance of the statistics at theta0, for update scaling
  Eigen::MatrixXd scale_inv;
  {
    Sampler sampler(net, ModelSpec{effects, theta}, seeder());
    sampler.run(cfg.chain.burn_in);
    std::vector<std::vector<double>> draws;
    const long long n1 = static_cast<long long>(cfg.phase1_samples_per_effect) * p;
    draws.reserve(n1);
    for (long long s = 0; s < n1; ++s) {
      sampler.run(cfg.chain.thin);
      draws.push_back(sampler.statistics());
    }
    const auto m = mean_of(draws);
    scale_inv = ridged(covariance_of(draws, m)).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    fit.log.push_back("phase 1: " + std::to_string(n1) + " draws at theta0 " +
                      format_vector(theta));
  }

  double round_gain = cfg.initial_gain;
  for (int round = 1; round <= cfg.max_rounds; ++round) {
    fit.rounds = round;

    // phase 2: Robbins-Monro sub-phases with halving gain and trailing averaging
    {
      Sampler sampler(net, ModelSpec{effects, theta}, seeder());
      sampler.reset(net.social.adj);
      sampler.run(cfg.chain.burn_in);
      double gain = round_gain;
      for (int sub = 1; sub <= cfg.subphases; ++sub) {
        std::vector<std::vector<double>> trail;
        for (int it = 0; it < cfg.subphase_iterations; ++it) {
          sampler.run(steps_per_update);
          const auto z = sampler.statistics();
          Eigen::VectorXd diff(p);
          for (int e = 0; e < p; ++e) diff(e) = z[e] - z_obs[e];
          const Eigen::VectorXd step = scale_inv * diff;
          for (int e = 0; e < p; ++e) {
            const double delta = std::clamp(gain * step(e), -cfg.max_step, cfg.max_step);
            theta[e] -= delta;
          }
          sampler.set_theta(theta);
          if (it >= cfg.subphase_iterations / 2) trail.push_back(theta);
        }
        theta = mean_of(trail);
        sampler.set_theta(theta);
        gain /= 2.0;
      }
      fit.log.push_back("phase 2 round " + std::to_string(round) + ": theta " +
                        format_vector(theta));
    }

    // phase 3: fresh chain at the candidate estimate, convergence check
    {
      Sampler sampler(net, ModelSpec{effects, theta}, seeder());
      sampler.reset(net.social.adj);
      sampler.run(cfg.chain.burn_in);
      std::vector<std::vector<double>> draws;
      draws.reserve(cfg.chain.sample_size);
      for (long long s = 0; s < cfg.chain.sample_size; ++s) {
        sampler.run(cfg.chain.thin);
        draws.push_back(sampler.statistics());
      }
      const auto m = mean_of(draws);
      const Eigen::MatrixXd c = covariance_of(draws, m);

      fit.theta = theta;
      fit.covariance = c;
      fit.convergence_t.assign(p, 0.0);
      double worst = 0.0;
      for (int e = 0; e < p; ++e) {
        const double sd = std::sqrt(std::max(0.0, c(e, e)));
        const double t = sd > 0.0 ? (m[e] - z_obs[e]) / sd
                                  : (m[e] == z_obs[e] ? 0.0
                                                      : std::numeric_limits<double>::infinity());
        fit.convergence_t[e] = t;
        worst = std::max(worst, std::abs(t));
      }
      const Eigen::MatrixXd info_inv =
          ridged(c).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
      fit.standard_error.assign(p, 0.0);
      for (int e = 0; e < p; ++e)
        fit.standard_error[e] = std::sqrt(std::max(0.0, info_inv(e, e)));

      std::ostringstream os;
      os << "phase 3 round " << round << ": max |t| " << worst;
      fit.log.push_back(os.str());

      fit.converged = worst < cfg.t_threshold;
      if (fit.converged) break;
      if (round < cfg.max_rounds) {
        // moment-matching Newton correction before the next round
        Eigen::VectorXd diff(p);
        for (int e = 0; e < p; ++e) diff(e) = m[e] - z_obs[e];
        const Eigen::VectorXd step = info_inv * diff;
        for (int e = 0; e < p; ++e)
          theta[e] -= std::clamp(step(e), -4.0 * cfg.max_step, 4.0 * cfg.max_step);
        round_gain /= 2.0;
        fit.log.push_back("round " + std::to_string(round) +
                          " not converged; corrected theta " + format_vector(theta));
      }
    }
  }
  return fit;
}

GofReport gof(const SocioSemanticNetwork& net, const FitResult& fit,
              const std::vector<EffectSpec>& auxiliary, const ChainConfig& cfg) {
  if (!fit.converged)
    throw ValidationError("gof requires a converged fit");
  cfg.validate();
  ModelSpec model{fit.effects, fit.theta};
  model.validate();

  std::vector<EffectSpec> rows_effects = fit.effects;
  std::vector<bool> in_model(rows_effects.size(), true);
  for (const auto& aux : auxiliary) {
    aux.validate();
    if (std::find(rows_effects.begin(), rows_effects.end(), aux) == rows_effects.end()) {
      rows_effects.push_back(aux);
      in_model.push_back(false);
    }
  }

  Sampler sampler(net, model, cfg.seed);
  const EffectWorkspace& ws = sampler.workspace();
  const auto observed = count_vector(ws, net.social.adj, rows_effects);

  sampler.run(cfg.burn_in);
  std::vector<std::vector<double>> draws;
  draws.reserve(cfg.sample_size);
  for (long long s = 0; s < cfg.sample_size; ++s) {
    sampler.run(cfg.thin);
    draws.push_back(count_vector(ws, sampler.adjacency(), rows_effects));
  }
  const auto m = mean_of(draws);

  GofReport report;
  report.sample_size = cfg.sample_size;
  for (std::size_t e = 0; e < rows_effects.size(); ++e) {
    GofRow row;
    row.statistic = rows_effects[e].name();
    row.observed = observed[e];
    row.mean = m[e];
    double ss = 0.0;
    for (const auto& d : draws) ss += (d[e] - m[e]) * (d[e] - m[e]);
    row.sd = std::sqrt(ss / static_cast<double>(draws.size() - 1));
    row.zero_variance = row.sd == 0.0;
    row.t = row.zero_variance ? 0.0 : (row.observed - m[e]) / row.sd;
    row.in_model = in_model[e];
    report.rows.push_back(std::move(row));
  }
  return report;
}

ExactOracle::ExactOracle(const SocioSemanticNetwork& net, std::vector<EffectSpec> effects,
                         int max_free_dyads)
    : effects_(std::move(effects)) {
  const EffectWorkspace ws(net);
  const auto& fd = ws.free_dyads;
  free_dyads_ = fd.size();
  if (fd.empty()) throw std::invalid_argument("exact oracle: no free dyads");
  if (static_cast<int>(fd.size()) > max_free_dyads)
    throw std::invalid_argument("exact oracle: " + std::to_string(fd.size()) +
                                " free dyads exceed the cap of " +
                                std::to_string(max_free_dyads));
  observed_ = count_vector(ws, net.social.adj, effects_);

  const int n = ws.n;
  const std::size_t p = effects_.size();
  std::vector<std::uint8_t> adj(static_cast<std::size_t>(n) * n, 0);
  std::vector<double> z = count_vector(ws, adj, effects_);
  const auto key_of = [](const std::vector<double>& v) {
    std::vector<double> k(v);
    for (auto& x : k) x = std::round(x * 1e9) / 1e9;
    return k;
  };
  table_[key_of(z)] += 1.0;
  const std::uint64_t total = std::uint64_t{1} << fd.size();
  for (std::uint64_t g = 1; g < total; ++g) {
    const int b = std::countr_zero(g);
    const auto [i, j] = fd[b];
    const bool present = adj[static_cast<std::size_t>(i) * n + j] != 0;
    const auto dz = change_vector(ws, adj, effects_, i, j);
    for (std::size_t e = 0; e < p; ++e) z[e] += present ? -dz[e] : dz[e];
    const std::uint8_t v = present ? 0 : 1;
    adj[static_cast<std::size_t>(i) * n + j] = v;
    adj[static_cast<std::size_t>(j) * n + i] = v;
    table_[key_of(z)] += 1.0;
  }
}

double ExactOracle::log_partition(const std::vector<double>& theta) const {
  if (theta.size() != effects_.size())
    throw std::invalid_argument("log_partition: theta length mismatch");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [z, cnt] : table_) best = std::max(best, dot(theta, z));
  double acc = 0.0;
  for (const auto& [z, cnt] : table_) acc += cnt * std::exp(dot(theta, z) - best);
  return best + std::log(acc);
}

std::vector<double> ExactOracle::expected_statistics(const std::vector<double>& theta) const {
  const double logz = log_partition(theta);
  const std::size_t p = effects_.size();
  std::vector<double> mean(p, 0.0);
  for (const auto& [z, cnt] : table_) {
    const double w = cnt * std::exp(dot(theta, z) - logz);
    for (std::size_t e = 0; e < p; ++e) mean[e] += w * z[e];
  }
  return mean;
}

Eigen::MatrixXd ExactOracle::covariance(const std::vector<double>& theta) const {
  const double logz = log_partition(theta);
  const int p = static_cast<int>(effects_.size());
  const auto mean = expected_statistics(theta);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p, p);
  for (const auto& [z, cnt] : table_) {
    const double w = cnt * std::exp(dot(theta, z) - logz);
    for (int a = 0; a < p; ++a)
      for (int b = a; b < p; ++b) c(a, b) += w * (z[a] - mean[a]) * (z[b] - mean[b]);
  }
  for (int a = 0; a < p; ++a)
    for (int b = a + 1; b < p; ++b) c(b, a) = c(a, b);
  return c;
}

std::vector<double> ExactOracle::mle(const std::vector<double>& observed_stats, double tol,
                                     int max_iterations) const {
  const int p = static_cast<int>(effects_.size());
  if (static_cast<int>(observed_stats.size()) != p)
    throw std::invalid_argument("mle: observed statistics length mismatch");
  // Newton's gradient underflows when the target sits on the attainable
  // boundary, so rule that out against the table extremes up front.
  {
    std::vector<double> lo(p, std::numeric_limits<double>::infinity());
    std::vector<double> hi(p, -std::numeric_limits<double>::infinity());
    for (const auto& [z, cnt] : table_)
      for (int e = 0; e < p; ++e) {
        lo[e] = std::min(lo[e], z[e]);
        hi[e] = std::max(hi[e], z[e]);
      }
    for (int e = 0; e < p; ++e) {
      const std::string name = effects_[e].name();
      if (lo[e] == hi[e])
        throw NumericalError("exact MLE: statistic '" + name +
                             "' is constant over the attainable graphs");
      if (observed_stats[e] <= lo[e] || observed_stats[e] >= hi[e])
        throw NumericalError("exact MLE: observed '" + name +
                             "' sits on the attainable boundary; the MLE does not exist");
    }
  }
  std::vector<double> theta(p, 0.0);
  for (int it = 0; it < max_iterations; ++it) {
    const auto mean = expected_statistics(theta);
    double worst = 0.0;
    Eigen::VectorXd grad(p);
    for (int e = 0; e < p; ++e) {
      grad(e) = observed_stats[e] - mean[e];
      worst = std::max(worst, std::abs(grad(e)));
    }
    if (worst < tol) return theta;
    const Eigen::MatrixXd c = ridged(covariance(theta));
    Eigen::VectorXd step = c.ldlt().solve(grad);
    const double inf_norm = step.cwiseAbs().maxCoeff();
    if (inf_norm > 1.0) step *= 1.0 / inf_norm;  // damped ascent
    for (int e = 0; e < p; ++e) {
      theta[e] += step(e);
      if (!std::isfinite(theta[e]) || std::abs(theta[e]) > 50.0)
        throw NumericalError(
            "exact MLE diverged; the observed statistics likely sit on the attainable "
            "boundary");
    }
  }
  throw NumericalError("exact MLE did not converge");
}

}  // namespace ssn
