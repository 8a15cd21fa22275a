// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "oplearn/sampling.hpp"
#include "oplearn/spectra.hpp"

namespace oplearn {

/// Nonnegative per-mode weights (test-distribution variances in the output
/// basis).
class ErrorWeights {
 public:
  explicit ErrorWeights(std::vector<double> values);
  explicit ErrorWeights(const SpectralSequence& s);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// sum_j w_j (truth_j - est_j)^2
double weighted_sq_error(std::span<const double> est, std::span<const double> truth,
                         const ErrorWeights& w);

/// weighted_sq_error normalized by sum_k w_k truth_k^2.
double relative_error_diag(std::span<const double> est, std::span<const double> truth,
                           const ErrorWeights& w);

/// sum_{j,k} lambda_k (truth - est)_{jk}^2 / sum_{j,k} lambda_k truth_{jk}^2
double relative_error_matrix(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth,
                             std::span<const double> input_spectrum);

/// The three series of the design-conditional test error. i1 + i2 is the
/// noise average of the posterior-mean error, i1 + i2 + i3 adds the posterior
/// spread.
struct ConditionalRisk {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double mean_error() const noexcept { return i1 + i2; }
  double sample_error() const noexcept { return i1 + i2 + i3; }
};

/// Evaluated at the realized <g_j g_j>. noise_spectrum (optional) scales the
/// noise variance per mode.
ConditionalRisk conditional_risk_closed_form(std::span<const double> suff_gg,
                                             const SpectralSequence& prior,
                                             std::span<const double> truth,
                                             const ErrorWeights& w, double gamma, std::size_t N,
                                             std::span<const double> noise_spectrum = {});
ConditionalRisk conditional_risk_closed_form(const Dataset& ds, const SpectralSequence& prior,
                                             std::span<const double> truth,
                                             const ErrorWeights& w, double gamma, std::size_t N);

/// In-distribution squared prediction error, weights theta_j^2.
double excess_risk(std::span<const double> est, std::span<const double> truth,
                   const ErrorWeights& train_w);

struct GapTerms {
  double j1 = 0.0;
  double j2 = 0.0;
  double j3 = 0.0;
  double total() const noexcept { return j1 + j2 + j3; }
};

/// Expected minus empirical risk of `est`:
///   j1 = 1/2 sum (theta_j^2 - <gg>_j)(est_j - truth_j)^2
///   j2 = 1/2 sum (<gg>_j - theta_j^2) truth_j^2
///   j3 = sum <g_j, gamma xi_j> est_j
/// where <g_j, gamma xi_j> = <yg>_j - truth_j <gg>_j is reconstructed from the
/// stored statistics. gamma must be positive.
GapTerms generalization_gap_terms(const Dataset& ds, std::span<const double> est,
                                  std::span<const double> truth, const ErrorWeights& train_w,
                                  double gamma);
double generalization_gap_emp(const Dataset& ds, std::span<const double> est,
                              std::span<const double> truth, const ErrorWeights& train_w,
                              double gamma);

/// Tail energy sum_{j > J} w_j truth_j^2 over the stored modes beyond index J.
double truncation_tail(std::span<const double> truth, const ErrorWeights& w, std::size_t J);

}  // namespace oplearn
