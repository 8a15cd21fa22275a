// SPDX-License-Identifier: Apache-2.0
#include "oplearn/metrics.hpp"

#include <cmath>
#include <string>

#include "oplearn/errors.hpp"

namespace oplearn {

ErrorWeights::ErrorWeights(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_)
    if (!std::isfinite(v) || v < 0.0)
      throw InvalidArgument("error weights must be finite and nonnegative");
}

ErrorWeights::ErrorWeights(const SpectralSequence& s)
    : values_(s.values().begin(), s.values().end()) {}

namespace {

void require_sizes(std::span<const double> est, std::span<const double> truth,
                   const ErrorWeights& w, const char* who) {
  if (est.size() != truth.size() || w.size() != truth.size())
    throw DimensionMismatch(std::string(who) + ": estimate, truth and weights differ in length");
}

}  // namespace

double weighted_sq_error(std::span<const double> est, std::span<const double> truth,
                         const ErrorWeights& w) {
  require_sizes(est, truth, w, "weighted_sq_error");
  double acc = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const double d = truth[j] - est[j];
    acc += w[j] * d * d;
  }
  return acc;
}

double relative_error_diag(std::span<const double> est, std::span<const double> truth,
                           const ErrorWeights& w) {
  require_sizes(est, truth, w, "relative_error_diag");
  double denom = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) denom += w[j] * truth[j] * truth[j];
  if (!(denom > 0.0)) throw InvalidArgument("relative_error_diag: truth has zero energy");
  return weighted_sq_error(est, truth, w) / denom;
}

double relative_error_matrix(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth,
                             std::span<const double> input_spectrum) {
  if (est.rows() != truth.rows() || est.cols() != truth.cols() ||
      static_cast<Eigen::Index>(input_spectrum.size()) != truth.cols())
    throw DimensionMismatch("relative_error_matrix: shapes differ");
  const Eigen::Map<const Eigen::RowVectorXd> lam(input_spectrum.data(), truth.cols());
  const double num = ((truth - est).array().square().rowwise() * lam.array()).sum();
  const double denom = (truth.array().square().rowwise() * lam.array()).sum();
  if (!(denom > 0.0)) throw InvalidArgument("relative_error_matrix: truth has zero energy");
  return num / denom;
}

ConditionalRisk conditional_risk_closed_form(std::span<const double> suff_gg,
                                             const SpectralSequence& prior,
                                             std::span<const double> truth,
                                             const ErrorWeights& w, double gamma, std::size_t N,
                                             std::span<const double> noise_spectrum) {
  if (!(gamma > 0.0)) throw InvalidArgument("conditional_risk_closed_form: gamma must be > 0");
  if (N == 0) throw InvalidArgument("conditional_risk_closed_form: N must be at least 1");
  const std::size_t J = suff_gg.size();
  if (truth.size() != J || w.size() != J || prior.size() < J ||
      (!noise_spectrum.empty() && noise_spectrum.size() < J))
    throw DimensionMismatch("conditional_risk_closed_form: sizes differ");
  const double n = static_cast<double>(N);
  ConditionalRisk r;
  for (std::size_t j = 0; j < J; ++j) {
    const double v = gamma * gamma * (noise_spectrum.empty() ? 1.0 : noise_spectrum[j]);
    const double s = prior[j];
    const double a = n * s * suff_gg[j];
    const double d = v + a;
    const double shrink = v / d;  // 1 / (1 + N s <gg> / v)
    r.i1 += w[j] * truth[j] * truth[j] * shrink * shrink;
    r.i2 += w[j] * s * (a / d) * shrink;
    r.i3 += w[j] * s * shrink;
  }
  return r;
}

ConditionalRisk conditional_risk_closed_form(const Dataset& ds, const SpectralSequence& prior,
                                             std::span<const double> truth,
                                             const ErrorWeights& w, double gamma,
                                             std::size_t N) {
  return conditional_risk_closed_form(ds.suff_gg, prior, truth, w, gamma, N);
}

double excess_risk(std::span<const double> est, std::span<const double> truth,
                   const ErrorWeights& train_w) {
  return weighted_sq_error(est, truth, train_w);
}

GapTerms generalization_gap_terms(const Dataset& ds, std::span<const double> est,
                                  std::span<const double> truth, const ErrorWeights& train_w,
                                  double gamma) {
  if (!(gamma > 0.0))
    throw InvalidArgument("generalization_gap_emp: noise products cannot be reconstructed "
                          "without positive gamma");
  require_sizes(est, truth, train_w, "generalization_gap_emp");
  if (ds.suff_gg.size() != truth.size() || ds.suff_yg.size() != truth.size())
    throw DimensionMismatch("generalization_gap_emp: dataset modes differ from truth");
  GapTerms t;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const double gg = ds.suff_gg[j];
    const double theta2 = train_w[j];
    const double d = est[j] - truth[j];
    const double noise_product = ds.suff_yg[j] - truth[j] * gg;
    t.j1 += 0.5 * (theta2 - gg) * d * d;
    t.j2 += 0.5 * (gg - theta2) * truth[j] * truth[j];
    t.j3 += noise_product * est[j];
  }
  return t;
}

double generalization_gap_emp(const Dataset& ds, std::span<const double> est,
                              std::span<const double> truth, const ErrorWeights& train_w,
                              double gamma) {
  return generalization_gap_terms(ds, est, truth, train_w, gamma).total();
}

double truncation_tail(std::span<const double> truth, const ErrorWeights& w, std::size_t J) {
  if (w.size() != truth.size()) throw DimensionMismatch("truncation_tail: sizes differ");
  double acc = 0.0;
  for (std::size_t j = J; j < truth.size(); ++j) acc += w[j] * truth[j] * truth[j];
  return acc;
}

}  // namespace oplearn
