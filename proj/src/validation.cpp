// SPDX-License-Identifier: Apache-2.0
#include "oplearn/validation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oplearn/errors.hpp"
#include "oplearn/format.hpp"
#include "oplearn/metrics.hpp"
#include "oplearn/oracles.hpp"
#include "oplearn/posterior.hpp"
#include "oplearn/rng.hpp"
#include "oplearn/sampling.hpp"
#include "oplearn/spectra.hpp"
#include "oplearn/theory.hpp"

namespace oplearn {

bool SuiteReport::passed() const noexcept { return failures() == 0; }

std::size_t SuiteReport::failures() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
}

const std::vector<std::string>& validation_suites() {
  static const std::vector<std::string> names{"oracle", "identities", "lemmas", "parseval"};
  return names;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

CheckResult at_most(std::string name, double observed, double tol, std::string detail = {}) {
  return {std::move(name), observed <= tol, observed, 0.0, tol, std::move(detail)};
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.engine()() % (hi - lo + 1));
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

std::vector<double> random_positive(Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = log_uniform(rng, lo, hi);
  return v;
}

std::vector<double> random_normal(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

double rel_dev(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = b.cwiseAbs().maxCoeff();
  return scale > 0.0 ? (a - b).cwiseAbs().maxCoeff() / scale : (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

CheckResult check_diag_posterior_oracle(std::uint64_t seed, std::size_t instances) {
  double worst = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng = make_rng(seed, {101, i});
    const std::size_t J = pick(rng, 1, 8);
    const std::size_t N = pick(rng, 1, 16);
    const double gamma = log_uniform(rng, 0.05, 2.0);
    const SpectralSequence theta(random_positive(rng, J, 0.05, 5.0));
    const SpectralSequence prior(random_positive(rng, J, 0.1, 10.0));
    const TruthOperator truth = custom_truth(random_normal(rng, J), 0.0);
    const DesignMatrix x = draw_design(theta, N, DesignLaw::gaussian, rng);
    const Dataset ds = gen_diagonal_dataset(truth, x, gamma, rng);
    const DiagonalPosterior post = diag_posterior(ds, prior, gamma, N);
    const oracle::DensePosterior ref =
        oracle::conjugate_gaussian(ds.g, ds.y, prior.values(), gamma);
    const Eigen::Map<const Eigen::VectorXd> mean(post.mean.data(), static_cast<Eigen::Index>(J));
    const Eigen::Map<const Eigen::VectorXd> var(post.variance.data(),
                                                static_cast<Eigen::Index>(J));
    worst = std::max({worst, rel_dev(mean, ref.mean),
                      rel_dev(var, ref.covariance.diagonal())});
    // The oracle covariance must be diagonal as well.
    const Eigen::MatrixXd off =
        ref.covariance - Eigen::MatrixXd(ref.covariance.diagonal().asDiagonal());
    worst = std::max(worst, off.cwiseAbs().maxCoeff() / ref.covariance.diagonal().maxCoeff());
  }
  return at_most("diag_posterior_dense_oracle", worst, 1e-10,
                 std::to_string(instances) + " instances, J <= 8, N <= 16");
}

CheckResult check_matrix_row_oracle(std::uint64_t seed, std::size_t instances) {
  double worst = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng = make_rng(seed, {102, i});
    const std::size_t J = pick(rng, 1, 6);
    const std::size_t N = pick(rng, 1, 24);
    const double gamma = log_uniform(rng, 0.01, 1.0);
    const SpectralSequence theta(random_positive(rng, J, 0.05, 5.0));
    const std::vector<double> prior = random_positive(rng, J, 0.1, 10.0);
    const DesignMatrix x = draw_design(theta, N, DesignLaw::gaussian, rng);
    Eigen::MatrixXd truth(static_cast<Eigen::Index>(J), static_cast<Eigen::Index>(J));
    for (Eigen::Index r = 0; r < truth.rows(); ++r)
      for (Eigen::Index c = 0; c < truth.cols(); ++c) truth(r, c) = rng.normal();
    const Eigen::MatrixXd overlap = Eigen::MatrixXd::Identity(truth.rows(), truth.cols());
    const Dataset ds = gen_matrix_dataset(truth, x, overlap, gamma, rng);
    for (Eigen::Index r = 0; r < truth.rows(); ++r) {
      const RowSolve row = matrix_posterior_row(*ds.gram, ds.rhs->row(r).transpose(), prior,
                                                gamma, N);
      const Eigen::VectorXd ref = oracle::regularized_risk_minimizer(
          x.coeffs, ds.y.row(r).transpose(), prior, gamma);
      worst = std::max(worst, rel_dev(row.row, ref));
    }
  }
  return at_most("matrix_row_rerm_oracle", worst, 1e-8,
                 std::to_string(instances) + " instances, J <= 6");
}

CheckResult check_gen_gap_identity(std::uint64_t seed, std::size_t instances,
                                   bool inject_sign_error) {
  double worst = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng = make_rng(seed, {103, i});
    const std::size_t J = pick(rng, 1, 12);
    const std::size_t N = pick(rng, 1, 20);
    const double gamma = log_uniform(rng, 0.01, 2.0);
    const std::vector<double> theta_sq = random_positive(rng, J, 0.01, 5.0);
    const TruthOperator truth = custom_truth(random_normal(rng, J), 0.0);
    const std::vector<double> est = random_normal(rng, J);
    const DesignMatrix x = draw_design(SpectralSequence(theta_sq), N, DesignLaw::gaussian, rng);
    const Dataset ds = gen_diagonal_dataset(truth, x, gamma, rng);
    const ErrorWeights w(theta_sq);
    const GapTerms t = generalization_gap_terms(ds, est, truth.eigenvalues, w, gamma);
    const double gap = inject_sign_error ? t.j1 - t.j2 + t.j3 : t.total();
    const double r_inf = oracle::expected_risk(est, truth.eigenvalues, theta_sq);
    const double r_n = oracle::empirical_risk(est, ds.g, ds.y);
    const double scale = std::max({std::abs(r_inf), std::abs(r_n), 1e-300});
    worst = std::max(worst, std::abs(gap - (r_inf - r_n)) / scale);
  }
  return at_most("gen_gap_identity", worst, 1e-10,
                 std::to_string(instances) + " instances" +
                     (inject_sign_error ? ", injected sign error in the second term" : ""));
}

CheckResult check_closed_form_monte_carlo(std::uint64_t seed, std::size_t configs,
                                          std::size_t draws) {
  double worst_z = 0.0;
  std::size_t outside = 0;
  for (std::size_t c = 0; c < configs; ++c) {
    Rng rng = make_rng(seed, {104, c});
    const std::size_t J = pick(rng, 2, 8);
    const std::size_t N = pick(rng, 2, 16);
    const double gamma = log_uniform(rng, 0.05, 1.0);
    const SpectralSequence theta(random_positive(rng, J, 0.05, 5.0));
    const SpectralSequence prior(random_positive(rng, J, 0.1, 10.0));
    const std::vector<double> truth = random_normal(rng, J);
    const ErrorWeights w(random_positive(rng, J, 0.1, 2.0));
    const DesignMatrix x = draw_design(theta, N, DesignLaw::gaussian, rng);
    const Eigen::MatrixXd& g = x.coeffs;
    const SufficientStatistics fixed = compute_sufficient_statistics(g, g);
    const double closed =
        conditional_risk_closed_form(fixed.gg, prior, truth, w, gamma, N).sample_error();

    Rng draw_rng = make_rng(seed, {105, c});
    double sum = 0.0, sum_sq = 0.0;
    Eigen::MatrixXd y(g.rows(), g.cols());
    for (std::size_t d = 0; d < draws; ++d) {
      for (Eigen::Index n = 0; n < g.cols(); ++n)
        for (Eigen::Index j = 0; j < g.rows(); ++j)
          y(j, n) = g(j, n) * truth[static_cast<std::size_t>(j)] + gamma * draw_rng.normal();
      const SufficientStatistics s = compute_sufficient_statistics(g, y);
      const DiagonalPosterior post = diag_posterior(s.gg, s.yg, prior, gamma, N);
      double err = 0.0;
      for (std::size_t j = 0; j < J; ++j) {
        const double sample = post.mean[j] + std::sqrt(post.variance[j]) * draw_rng.normal();
        err += w[j] * (sample - truth[j]) * (sample - truth[j]);
      }
      sum += err;
      sum_sq += err * err;
    }
    const double n = static_cast<double>(draws);
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / (n - 1.0));
    const double z = std::abs(mean - closed) / se;
    worst_z = std::max(worst_z, z);
    if (z > 3.0) ++outside;
  }
  CheckResult r = at_most("closed_form_noise_average", worst_z, 3.0,
                          std::to_string(configs) + " configurations x " +
                              std::to_string(draws) + " draws; " + std::to_string(outside) +
                              " outside 3 standard errors");
  return r;
}

namespace {

CheckResult check_posterior_spread(std::uint64_t seed) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    Rng rng = make_rng(seed, {106, i});
    const std::size_t J = pick(rng, 1, 10);
    const std::size_t N = pick(rng, 1, 30);
    const double gamma = log_uniform(rng, 0.01, 2.0);
    const SpectralSequence prior(random_positive(rng, J, 0.1, 10.0));
    const std::vector<double> gg = random_positive(rng, J, 0.01, 5.0);
    const std::vector<double> yg = random_normal(rng, J);
    const std::vector<double> truth = random_normal(rng, J);
    const ErrorWeights w(random_positive(rng, J, 0.1, 2.0));
    const DiagonalPosterior post = diag_posterior(gg, yg, prior, gamma, N);
    double trace = 0.0;
    for (std::size_t j = 0; j < J; ++j) trace += w[j] * post.variance[j];
    const double i3 = conditional_risk_closed_form(gg, prior, truth, w, gamma, N).i3;
    worst = std::max(worst, std::abs(i3 - trace) / trace);
  }
  return at_most("posterior_spread_trace", worst, 1e-12, "200 instances");
}

CheckResult check_zero_weight_padding(std::uint64_t seed) {
  double worst = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    Rng rng = make_rng(seed, {107, i});
    const std::size_t J = pick(rng, 1, 10);
    const std::size_t pad = pick(rng, 1, 5);
    const std::size_t N = pick(rng, 1, 30);
    const double gamma = log_uniform(rng, 0.01, 2.0);
    std::vector<double> est = random_normal(rng, J), truth = random_normal(rng, J);
    std::vector<double> w = random_positive(rng, J, 0.1, 2.0);
    std::vector<double> prior = random_positive(rng, J, 0.1, 10.0);
    std::vector<double> gg = random_positive(rng, J, 0.01, 5.0);
    const double e0 = relative_error_diag(est, truth, ErrorWeights(w));
    const double c0 = conditional_risk_closed_form(gg, SpectralSequence(prior), truth,
                                                   ErrorWeights(w), gamma, N)
                          .sample_error();
    for (std::size_t k = 0; k < pad; ++k) {
      est.push_back(rng.normal());
      truth.push_back(rng.normal());
      w.push_back(0.0);
      prior.push_back(log_uniform(rng, 0.1, 10.0));
      gg.push_back(log_uniform(rng, 0.01, 5.0));
    }
    const double e1 = relative_error_diag(est, truth, ErrorWeights(w));
    const double c1 = conditional_risk_closed_form(gg, SpectralSequence(prior), truth,
                                                   ErrorWeights(w), gamma, N)
                          .sample_error();
    worst = std::max({worst, std::abs(e1 - e0) / e0, std::abs(c1 - c0) / c0});
  }
  return at_most("zero_weight_padding", worst, 1e-14, "200 instances");
}

SuiteReport oracle_suite(const ValidationOptions& o) {
  SuiteReport r{"oracle", {}};
  r.checks.push_back(check_diag_posterior_oracle(o.seed));
  r.checks.push_back(check_matrix_row_oracle(o.seed));
  return r;
}

SuiteReport identities_suite(const ValidationOptions& o) {
  SuiteReport r{"identities", {}};
  r.checks.push_back(check_gen_gap_identity(o.seed, 1000, o.inject_gap_sign_error));
  r.checks.push_back(check_closed_form_monte_carlo(o.seed));
  r.checks.push_back(check_posterior_spread(o.seed));
  r.checks.push_back(check_zero_weight_padding(o.seed));
  return r;
}

std::string grid_name(const char* prefix, double a, double b, double c) {
  return std::string(prefix) + "(" + format_double(a) + "," + format_double(b) + "," +
         format_double(c) + ")";
}

SuiteReport lemmas_suite() {
  SuiteReport r{"lemmas", {}};
  std::vector<double> Ns;
  for (int e = 8; e <= 24; e += 2) Ns.push_back(std::ldexp(1.0, e));

  // Sharp series order: the ratio to the predicted order must stay within a
  // factor 10 band across N.
  for (double t : {1.5, 2.0, 3.0, 5.0})
    for (double u : {2.0, 3.0, 5.0})
      for (double v : {0.0, 0.5, 1.0, 2.0}) {
        double lo = INFINITY, hi = 0.0;
        for (double N : Ns) {
          const double ratio = lemma_series_partial_sum(t, u, v, N) / lemma_series_order(t, u, v, N);
          lo = std::min(lo, ratio);
          hi = std::max(hi, ratio);
        }
        const double envelope = std::max(hi, 1.0 / lo);
        r.checks.push_back(at_most(grid_name("series_sharp", t, u, v), hi / lo, 10.0,
                                   "ratio in [" + format_double(lo) + ", " + format_double(hi) +
                                       "], envelope constant " + format_double(envelope)));
      }

  // Tail bound for xi_j = (j pi)^(-2), which lies in H^q for q < 3/2.
  const std::size_t modes = std::size_t{1} << 16;
  std::vector<double> xi(modes);
  for (std::size_t j = 1; j <= modes; ++j) xi[j - 1] = std::pow(static_cast<double>(j) * kPi, -2.0);
  for (double q : {0.0, 0.5, 1.4})
    for (double t : {0.0, 1.0, 3.0})
      for (double u : {2.0, 3.0, 5.0}) {
        if (t < -2.0 * q) continue;
        double worst_bound = 0.0;
        double worst_weight_lo = INFINITY;
        for (double N : Ns) {
          const auto cut = static_cast<std::size_t>(std::floor(std::pow(N, 1.0 / u)));
          double tail = 0.0, tail_weighted = 0.0, sobolev = 0.0;
          for (std::size_t j = modes; j > cut; --j) {
            const double jd = static_cast<double>(j);
            const double x2 = xi[j - 1] * xi[j - 1];
            tail += std::pow(jd, -t) * x2;
            tail_weighted += std::pow(jd, -t) * x2 / std::pow(1.0 + N * std::pow(jd, -u), 2.0);
            sobolev += std::pow(jd, 2.0 * q) * x2;
          }
          const double bound = std::pow(N, -(t + 2.0 * q) / u) * sobolev;
          worst_bound = std::max(worst_bound, tail / bound);
          worst_weight_lo = std::min(worst_weight_lo, tail_weighted / tail);
        }
        r.checks.push_back(at_most(grid_name("series_tail_bound", q, t, u), worst_bound,
                                   1.0 + 1e-12, "tail over bound"));
        // (1 + N j^-u)^-2 lies in [1/4, 1] beyond the cut.
        r.checks.push_back({grid_name("series_tail_equivalence", q, t, u),
                            worst_weight_lo >= 0.25 - 1e-12 && worst_weight_lo <= 1.0,
                            worst_weight_lo, 0.25, 1e-12, "min weighted over unweighted tail"});
      }
  return r;
}

SuiteReport parseval_suite() {
  SuiteReport r{"parseval", {}};
  double worst = 0.0;
  for (std::size_t j = 1; j <= 12; ++j)
    for (std::size_t k = 1; k <= 12; ++k)
      worst = std::max(worst, std::abs(volterra_sine_overlap(j, k) - oracle::overlap_quadrature(j, k)));
  r.checks.push_back(at_most("overlap_quadrature", worst, 1e-12, "j, k <= 12"));

  const std::size_t K = std::size_t{1} << 16;
  for (std::size_t j : {1u, 2u, 5u, 20u}) {
    double acc = 0.0;
    for (std::size_t k = K; k >= 1; --k) acc += std::pow(volterra_sine_overlap(j, k), 2);
    // Tail sum_{k > K} M_jk^2 ~ 4 / (pi^2 K).
    const double tail = 4.0 / (kPi * kPi * static_cast<double>(K));
    const double ratio = (1.0 - acc) / tail;
    r.checks.push_back({"overlap_row_parseval_j" + std::to_string(j),
                        ratio > 0.5 && ratio < 2.0, ratio, 1.0, 0.5,
                        "(1 - partial sum) over the predicted tail, K = 2^16"});
  }
  for (std::size_t k : {1u, 2u, 5u, 20u}) {
    double acc = 0.0;
    for (std::size_t j = K; j >= 1; --j) acc += std::pow(volterra_sine_overlap(j, k), 2);
    r.checks.push_back(at_most("overlap_column_parseval_k" + std::to_string(k),
                               std::abs(1.0 - acc), 1e-9, "K = 2^16"));
  }

  const double a_rate = -3.0;
  const std::size_t J = 8;
  const Eigen::MatrixXd fwd = galerkin_truth_matrix(EllipticKind::forward, a_rate, J);
  const Eigen::MatrixXd stiff = sine_stiffness_matrix(a_rate, J);
  double fwd_dev = 0.0, stiff_dev = 0.0;
  for (std::size_t j = 1; j <= J; ++j)
    for (std::size_t k = 1; k <= J; ++k) {
      const auto a = static_cast<Eigen::Index>(j - 1), b = static_cast<Eigen::Index>(k - 1);
      fwd_dev = std::max(fwd_dev, std::abs(fwd(a, b) - oracle::forward_entry_quadrature(a_rate, j, k)));
      stiff_dev = std::max(stiff_dev,
                           std::abs(stiff(a, b) - oracle::stiffness_entry_quadrature(a_rate, j, k)));
    }
  r.checks.push_back(at_most("galerkin_forward_quadrature", fwd_dev / fwd.cwiseAbs().maxCoeff(),
                             1e-10, "J = 8, relative to the largest entry"));
  r.checks.push_back(at_most("sine_stiffness_quadrature", stiff_dev / stiff.cwiseAbs().maxCoeff(),
                             1e-10, "J = 8, relative to the largest entry"));

  const Eigen::MatrixXd inv4 = galerkin_truth_matrix(EllipticKind::inverse, a_rate, 16, 4);
  const Eigen::MatrixXd inv8 = galerkin_truth_matrix(EllipticKind::inverse, a_rate, 16, 8);
  r.checks.push_back(at_most("inverse_galerkin_refinement",
                             (inv4 - inv8).norm() / inv8.norm(), 1e-4,
                             "J = 16, inner space 4J vs 8J"));
  return r;
}

}  // namespace

SuiteReport run_validation_suite(std::string_view suite, const ValidationOptions& opts) {
  if (suite == "oracle") return oracle_suite(opts);
  if (suite == "identities") return identities_suite(opts);
  if (suite == "lemmas") return lemmas_suite();
  if (suite == "parseval") return parseval_suite();
  throw InvalidArgument("unknown validation suite '" + std::string(suite) + "'");
}

}  // namespace oplearn
