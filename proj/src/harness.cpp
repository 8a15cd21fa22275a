// SPDX-License-Identifier: Apache-2.0
#include "oplearn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>

#include "oplearn/errors.hpp"
#include "oplearn/format.hpp"
#include "oplearn/metrics.hpp"
#include "oplearn/posterior.hpp"
#include "oplearn/rng.hpp"

namespace oplearn {

std::string_view to_string(EstimatorKind k) {
  return k == EstimatorKind::matrix ? "matrix" : "diagonal";
}

std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::test_error: return "test_error";
    case ErrorKind::excess_risk: return "excess_risk";
    case ErrorKind::gen_gap: return "gen_gap";
    case ErrorKind::conditional_closed_form: return "conditional_closed_form";
  }
  return "test_error";
}

std::string_view to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::automatic: return "auto";
    case SamplerKind::full: return "full";
    case SamplerKind::sufficient: return "sufficient";
  }
  return "auto";
}

std::string TruncationPolicy::describe() const {
  if (kind == Kind::fixed) return "fixed(" + std::to_string(modes) + ")";
  return "n_dependent(" + format_double(factor) + ")";
}

std::size_t truncation_level(const TruncationPolicy& policy, double alpha, double p,
                             std::size_t N) {
  if (policy.kind == TruncationPolicy::Kind::fixed) {
    if (policy.modes == 0) throw InvalidArgument("truncation_level: fixed J must be positive");
    return policy.modes;
  }
  if (!(alpha + p > 0.0)) throw InvalidArgument("truncation_level: requires alpha + p > 0");
  if (!(policy.factor > 0.0)) throw InvalidArgument("truncation_level: c must be positive");
  if (N == 0) throw InvalidArgument("truncation_level: N must be at least 1");
  const double level =
      std::ceil(policy.factor * std::pow(static_cast<double>(N), 1.0 / (2.0 * (alpha + p))));
  return std::max(kMinTruncation, static_cast<std::size_t>(level));
}

double default_noise_scale(TruthKind truth) {
  switch (truth) {
    case TruthKind::neg_laplacian: return 1e-1;
    case TruthKind::identity: return 1e-3;
    case TruthKind::inv_neg_laplacian: return 1e-5;
    case TruthKind::custom: break;
  }
  throw InvalidArgument("default_noise_scale: no default for custom truths");
}

ModelConfig::Params resolved_params(const ExperimentConfig& cfg) {
  ModelConfig::Params m = cfg.model;
  const double s_star = truth_s_star(cfg.truth);
  m.p = cfg.p_override.value_or(s_star + 0.5 + m.z);
  m.s = cfg.s_override.value_or(s_star);
  m.gamma = cfg.gamma_override.value_or(default_noise_scale(cfg.truth));
  return m;
}

std::vector<std::size_t> pow2_grid(unsigned lo, unsigned hi) {
  if (lo > hi || hi >= 63) throw InvalidArgument("pow2_grid: need lo <= hi < 63");
  std::vector<std::size_t> out;
  for (unsigned e = lo; e <= hi; ++e) out.push_back(std::size_t{1} << e);
  return out;
}

void ExperimentConfig::validate() const {
  if (truth == TruthKind::custom)
    throw InvalidArgument("experiment '" + name + "': custom truths are not runnable");
  if (n_grid.size() < 4)
    throw InvalidArgument("experiment '" + name + "': N grid needs at least 4 values");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] == 0) throw InvalidArgument("experiment '" + name + "': N must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1])
      throw InvalidArgument("experiment '" + name + "': N grid must be strictly increasing");
  }
  if (replications < 2)
    throw InvalidArgument("experiment '" + name + "': replications must be at least 2");
  if (!(fit_drop_fraction >= 0.0 && fit_drop_fraction < 1.0))
    throw InvalidArgument("experiment '" + name + "': fit_drop_fraction must lie in [0, 1)");
  const ModelConfig::Params m = resolved_params(*this);
  const ModelConfig model(m);  // smoothness range
  (void)model;
  if (!(m.gamma >= 0.0)) throw InvalidArgument("experiment '" + name + "': gamma must be >= 0");
  if ((estimator == EstimatorKind::diagonal || error == ErrorKind::gen_gap ||
       error == ErrorKind::conditional_closed_form) &&
      !(m.gamma > 0.0)) {
    const std::string what = estimator == EstimatorKind::diagonal ? "the diagonal estimator"
                                                                   : std::string(to_string(error));
    throw InvalidArgument("experiment '" + name + "': " + what + " needs gamma > 0");
  }
  if (truncation.kind == TruncationPolicy::Kind::fixed && truncation.modes == 0)
    throw InvalidArgument("experiment '" + name + "': fixed truncation needs J > 0");
  if (truncation.kind == TruncationPolicy::Kind::n_dependent && !(truncation.factor > 0.0))
    throw InvalidArgument("experiment '" + name + "': n_dependent truncation needs c > 0");
  if (estimator == EstimatorKind::matrix) {
    if (error != ErrorKind::test_error)
      throw InvalidArgument("experiment '" + name + "': matrix estimator supports test_error only");
    if (m.beta != 0.0)
      throw InvalidArgument("experiment '" + name + "': matrix estimator needs white noise");
    if (sampler == SamplerKind::sufficient)
      throw InvalidArgument("experiment '" + name + "': matrix estimator needs raw data");
    if (galerkin_ratio == 0)
      throw InvalidArgument("experiment '" + name + "': galerkin_ratio must be positive");
  }
  if (sampler == SamplerKind::sufficient && law != DesignLaw::gaussian)
    throw InvalidArgument("experiment '" + name +
                          "': the sufficient-statistics sampler is exact only for Gaussian designs");
}

RateFit fit_rate(std::span<const std::size_t> N, std::span<const double> error) {
  if (N.size() != error.size()) throw DimensionMismatch("fit_rate: N and error differ in length");
  if (N.size() < 2) throw InvalidArgument("fit_rate: need at least 2 points");
  const std::size_t n = N.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (N[i] == 0) throw InvalidArgument("fit_rate: N must be positive");
    if (!(error[i] > 0.0) || !std::isfinite(error[i]))
      throw InvalidArgument("fit_rate: errors must be positive and finite");
    x[i] = std::log(static_cast<double>(N[i]));
    y[i] = std::log(error[i]);
  }
  const double xm = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_rate: N values must not all coincide");
  const double slope = sxy / sxx;
  RateFit f;
  f.exponent = -slope;
  f.intercept = ym - slope * xm;
  f.points = n;
  if (n == 2) {
    f.degenerate = true;
    return f;
  }
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + slope * x[i]);
    ssr += r * r;
  }
  f.stderr_ = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  return f;
}

RatePrediction theory_for(const ExperimentConfig& cfg) {
  const ModelConfig::Params m = resolved_params(cfg);
  switch (cfg.error) {
    case ErrorKind::excess_risk: return excess_risk_exponents(m.alpha, m.p, m.s).upper;
    case ErrorKind::gen_gap: return gap_rate_exponent(m.alpha, m.p);
    case ErrorKind::test_error:
    case ErrorKind::conditional_closed_form: break;
  }
  if (m.beta > 0.0) return colored_rate_exponent(m.alpha, m.alpha_prime, m.p, m.s, m.beta);
  return upper_rate_exponent(m.alpha, m.alpha_prime, m.p, m.s);
}

namespace {

// Everything a replication at one N needs that does not depend on the draw.
struct DiagonalContext {
  std::size_t J = 0;
  SpectralSequence design;
  SpectralSequence prior;
  TruthOperator truth;
  ErrorWeights train_w;
  ErrorWeights test_w;
  std::vector<double> noise;  // empty for white noise
  std::optional<SpectralSequence> noise_seq;
  double test_energy = 0.0;
  std::size_t underflows = 0;
};

struct MatrixContext {
  std::size_t J = 0;
  SpectralSequence design;
  std::vector<double> test_spectrum;
  Eigen::MatrixXd truth;
  Eigen::MatrixXd overlap;
  Eigen::MatrixXd prior;
  std::size_t underflows = 0;
};

DiagonalContext make_diagonal_context(const ExperimentConfig& cfg,
                                      const ModelConfig::Params& m, std::size_t J) {
  SpectralSequence design = matern_spectrum(m.tau1, m.alpha, J);
  SpectralSequence test = matern_spectrum(m.tau2, m.alpha_prime, J);
  SpectralSequence prior = prior_variances_diagonal(m.p, m.tau3, J);
  const std::size_t underflows =
      design.underflow_count() + test.underflow_count() + prior.underflow_count();
  DiagonalContext c{J,
                    design,
                    prior,
                    truth_eigenvalues(cfg.truth, J),
                    ErrorWeights(design),
                    ErrorWeights(test),
                    {},
                    std::nullopt,
                    0.0,
                    underflows};
  if (m.beta > 0.0) {
    c.noise.resize(J);
    for (std::size_t j = 0; j < J; ++j)
      c.noise[j] = std::pow(static_cast<double>(j + 1), -2.0 * m.beta);
    c.noise_seq.emplace(c.noise);
  }
  for (std::size_t j = 0; j < J; ++j)
    c.test_energy += c.test_w[j] * c.truth.eigenvalues[j] * c.truth.eigenvalues[j];
  return c;
}

MatrixContext make_matrix_context(const ExperimentConfig& cfg, const ModelConfig::Params& m,
                                  std::size_t J) {
  SpectralSequence design = matern_spectrum(m.tau1, m.alpha, J);
  SpectralSequence test = matern_spectrum(m.tau2, m.alpha_prime, J);
  MatrixContext c{J,
                  design,
                  std::vector<double>(test.values().begin(), test.values().end()),
                  galerkin_truth_matrix(elliptic_kind_for(cfg.truth), cfg.a_rate, J,
                                        cfg.galerkin_ratio),
                  volterra_sine_overlap_matrix(J, J),
                  Eigen::MatrixXd(J, J),
                  design.underflow_count() + test.underflow_count()};
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t k = 0; k < J; ++k)
      c.prior(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
          prior_variances_matrix(cfg.truth, m.z, j + 1, k + 1);
  return c;
}

// Tail sum_{j > J_N} w_j truth_j^2 in the normalization of the configured error.
double tail_descriptor(const ExperimentConfig& cfg, const ModelConfig::Params& m,
                       const DiagonalContext& c, std::size_t N) {
  const std::size_t cut = std::min(J_N(m.alpha, m.p, static_cast<double>(N)), c.J);
  switch (cfg.error) {
    case ErrorKind::test_error:
    case ErrorKind::conditional_closed_form:
      return truncation_tail(c.truth.eigenvalues, c.test_w, cut) / c.test_energy;
    case ErrorKind::excess_risk:
    case ErrorKind::gen_gap: return truncation_tail(c.truth.eigenvalues, c.train_w, cut);
  }
  return 0.0;
}

bool use_sufficient(const ExperimentConfig& cfg) {
  if (cfg.sampler == SamplerKind::sufficient) return true;
  if (cfg.sampler == SamplerKind::full) return false;
  return cfg.law == DesignLaw::gaussian;
}

struct ReplicationOutcome {
  double error = 0.0;
  double relative_residual = 0.0;
};

ReplicationOutcome run_diagonal_replication(const ExperimentConfig& cfg,
                                            const ModelConfig::Params& m,
                                            const DiagonalContext& c, std::size_t N,
                                            Rng& design_rng, Rng& noise_rng) {
  Dataset ds;
  if (use_sufficient(cfg)) {
    ds = draw_sufficient_statistics(c.truth, c.design, N, m.gamma, design_rng, noise_rng,
                                    c.noise);
  } else {
    const DesignMatrix x = draw_design(c.design, N, cfg.law, design_rng);
    ds = gen_diagonal_dataset(c.truth, x, m.gamma, noise_rng, c.noise);
  }
  const DiagonalPosterior post =
      c.noise_seq ? diag_posterior_colored(ds, c.prior, m.gamma, *c.noise_seq, N)
                  : diag_posterior(ds, c.prior, m.gamma, N);
  switch (cfg.error) {
    case ErrorKind::test_error:
      return {relative_error_diag(post.mean, c.truth.eigenvalues, c.test_w), 0.0};
    case ErrorKind::excess_risk:
      return {excess_risk(post.mean, c.truth.eigenvalues, c.train_w), 0.0};
    case ErrorKind::gen_gap:
      return {std::abs(generalization_gap_emp(ds, post.mean, c.truth.eigenvalues, c.train_w,
                                              m.gamma)),
              0.0};
    case ErrorKind::conditional_closed_form: {
      const ConditionalRisk risk = conditional_risk_closed_form(
          ds.suff_gg, c.prior, c.truth.eigenvalues, c.test_w, m.gamma, N, c.noise);
      return {risk.mean_error() / c.test_energy, 0.0};
    }
  }
  return {};
}

ReplicationOutcome run_matrix_replication(const ExperimentConfig& cfg,
                                          const ModelConfig::Params& m, const MatrixContext& c,
                                          std::size_t N, Rng& design_rng, Rng& noise_rng) {
  const DesignMatrix x = draw_design(c.design, N, cfg.law, design_rng);
  const Dataset ds = gen_matrix_dataset(c.truth, x, c.overlap, m.gamma, noise_rng);
  const MatrixFit fit = matrix_posterior(ds, c.prior, m.gamma);
  return {relative_error_matrix(fit.rows, c.truth, c.test_spectrum), fit.max_relative_residual};
}

struct RunOutput {
  std::vector<std::vector<double>> errors;
  std::vector<std::size_t> modes;
  std::vector<double> tails;
  std::size_t underflows = 0;
  double max_residual = 0.0;
};

RunOutput run_all(const ExperimentConfig& cfg, unsigned workers) {
  cfg.validate();
  const ModelConfig::Params m = resolved_params(cfg);
  const std::size_t nN = cfg.n_grid.size();
  const std::size_t reps = cfg.replications;

  RunOutput out;
  out.errors.assign(nN, std::vector<double>(reps, 0.0));
  out.modes.resize(nN);
  out.tails.assign(nN, 0.0);

  // Contexts are shared read-only; one per distinct truncation level.
  std::vector<std::size_t> ctx_of(nN);
  std::vector<DiagonalContext> diag;
  std::vector<MatrixContext> mat;
  for (std::size_t i = 0; i < nN; ++i) {
    const std::size_t J = truncation_level(cfg.truncation, m.alpha, m.p, cfg.n_grid[i]);
    out.modes[i] = J;
    if (cfg.estimator == EstimatorKind::diagonal) {
      auto it = std::find_if(diag.begin(), diag.end(), [&](const auto& c) { return c.J == J; });
      if (it == diag.end()) {
        diag.push_back(make_diagonal_context(cfg, m, J));
        out.underflows += diag.back().underflows;
        it = diag.end() - 1;
      }
      ctx_of[i] = static_cast<std::size_t>(it - diag.begin());
      out.tails[i] = tail_descriptor(cfg, m, *it, cfg.n_grid[i]);
    } else {
      auto it = std::find_if(mat.begin(), mat.end(), [&](const auto& c) { return c.J == J; });
      if (it == mat.end()) {
        mat.push_back(make_matrix_context(cfg, m, J));
        out.underflows += mat.back().underflows;
        it = mat.end() - 1;
      }
      ctx_of[i] = static_cast<std::size_t>(it - mat.begin());
    }
  }

  std::vector<std::vector<double>> residuals(nN, std::vector<double>(reps, 0.0));
  const std::size_t tasks = nN * reps;
  std::atomic<std::size_t> next{0};
  std::mutex fail_mutex;
  std::size_t fail_task = tasks;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks) return;
      const std::size_t i = t / reps;
      const std::size_t r = t % reps;
      const std::size_t N = cfg.n_grid[i];
      try {
        Rng design_rng = make_rng(cfg.seed, {i, r, static_cast<std::uint64_t>(StreamPurpose::design)});
        Rng noise_rng = make_rng(cfg.seed, {i, r, static_cast<std::uint64_t>(StreamPurpose::noise)});
        const ReplicationOutcome o =
            cfg.estimator == EstimatorKind::diagonal
                ? run_diagonal_replication(cfg, m, diag[ctx_of[i]], N, design_rng, noise_rng)
                : run_matrix_replication(cfg, m, mat[ctx_of[i]], N, design_rng, noise_rng);
        out.errors[i][r] = o.error;
        residuals[i][r] = o.relative_residual;
      } catch (...) {
        std::lock_guard<std::mutex> lock(fail_mutex);
        if (t < fail_task) {
          fail_task = t;
          failure = std::current_exception();
        }
      }
    }
  };

  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), tasks));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned w = 0; w < n_threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (failure) {
    const std::size_t i = fail_task / reps;
    const std::size_t r = fail_task % reps;
    std::string what;
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
      what = "unknown error";
    }
    throw ExperimentError("experiment '" + cfg.name + "' at N = " +
                              std::to_string(cfg.n_grid[i]) + ", replication " +
                              std::to_string(r) + ": " + what,
                          cfg.n_grid[i], r);
  }
  for (const auto& row : residuals)
    for (double v : row) out.max_residual = std::max(out.max_residual, v);
  return out;
}

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<std::vector<double>> run_replications(const ExperimentConfig& cfg,
                                                  unsigned workers) {
  return run_all(cfg, workers).errors;
}

RateReport run_experiment(const ExperimentConfig& cfg, unsigned workers) {
  RunOutput out = run_all(cfg, workers);
  RateReport rep;
  rep.config = cfg;
  rep.theory = theory_for(cfg);
  rep.spectrum_underflows = out.underflows;
  rep.max_relative_residual = out.max_residual;
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const auto& e = out.errors[i];
    const double n = static_cast<double>(e.size());
    // Fixed-order reduction keeps the report independent of the worker count.
    double mean = 0.0;
    for (double v : e) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : e) ss += (v - mean) * (v - mean);
    RatePoint pt;
    pt.N = cfg.n_grid[i];
    pt.modes = out.modes[i];
    pt.mean_error = mean;
    pt.stderr_ = std::sqrt(ss / (n - 1.0) / n);
    pt.median_error = median_of(e);
    pt.reps = e.size();
    pt.tail_descriptor = out.tails[i];
    rep.points.push_back(pt);
  }
  const std::size_t total = rep.points.size();
  std::size_t first = static_cast<std::size_t>(
      std::floor(cfg.fit_drop_fraction * static_cast<double>(total)));
  first = std::min(first, total - 2);
  rep.fit_first_index = first;
  std::vector<std::size_t> Ns;
  std::vector<double> errs;
  for (std::size_t i = first; i < total; ++i) {
    Ns.push_back(rep.points[i].N);
    errs.push_back(rep.points[i].mean_error);
  }
  rep.fit = fit_rate(Ns, errs);
  return rep;
}

}  // namespace oplearn
