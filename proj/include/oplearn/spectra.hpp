// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace oplearn {

/// Smallest magnitude a spectrum entry may take before it is flagged.
inline constexpr double kUnderflowFloor = 1e-300;

/// A strictly positive sequence indexed by mode j = 1..J (covariance
/// spectra, prior variances, noise spectra).
///
/// Entries that fall below kUnderflowFloor are clamped to the floor and
/// counted; callers inspect underflow_count() rather than receiving
/// denormals.
class SpectralSequence {
 public:
  explicit SpectralSequence(std::vector<double> values,
                            std::optional<double> decay_exponent_hint = {});

  std::size_t size() const noexcept { return values_.size(); }
  /// 1-based mode access.
  double mode(std::size_t j) const { return values_.at(j - 1); }
  double operator[](std::size_t index) const noexcept { return values_[index]; }
  std::span<const double> values() const noexcept { return values_; }
  std::optional<double> decay_exponent_hint() const noexcept { return hint_; }
  std::size_t underflow_count() const noexcept { return underflow_count_; }

  /// Copy of the first `J` modes.
  SpectralSequence truncated(std::size_t J) const;

 private:
  std::vector<double> values_;
  std::optional<double> hint_;
  std::size_t underflow_count_ = 0;
};

enum class TruthKind { neg_laplacian, identity, inv_neg_laplacian, custom };

std::string_view to_string(TruthKind kind);
TruthKind truth_kind_from_string(std::string_view name);

/// Diagonal truth: eigenvalues in the shared eigenbasis plus the supremum
/// Sobolev exponent of the eigenvalue sequence.
struct TruthOperator {
  TruthKind kind = TruthKind::custom;
  std::vector<double> eigenvalues;
  double s_star = 0.0;

  std::size_t size() const noexcept { return eigenvalues.size(); }
};

/// Supremum Sobolev exponent for the built-in truths.
double truth_s_star(TruthKind kind);

/// Smoothness and scale parameters of one experiment. Construction checks the
/// smoothness-range condition
///   min(alpha - beta, alpha') + s > 0  and  min(alpha - beta, alpha') + p - 1/2 > 0.
class ModelConfig {
 public:
  struct Params {
    double alpha = 4.5;
    double alpha_prime = 4.5;
    double p = 0.0;
    double s = 0.0;
    double tau1 = 15.0;
    double tau2 = 15.0;
    double tau3 = 1.0;
    double gamma = 1e-3;
    double beta = 0.0;
    double z = 0.0;
  };

  explicit ModelConfig(const Params& params);

  /// p = s_star + 1/2 + z and s = s_star for a built-in truth.
  static ModelConfig with_prior_shift(TruthKind truth, double alpha, double alpha_prime,
                                      double z, Params base);
  static ModelConfig with_prior_shift(TruthKind truth, double alpha, double alpha_prime,
                                      double z);

  const Params& params() const noexcept { return params_; }
  double alpha() const noexcept { return params_.alpha; }
  double alpha_prime() const noexcept { return params_.alpha_prime; }
  double p() const noexcept { return params_.p; }
  double s() const noexcept { return params_.s; }
  double gamma() const noexcept { return params_.gamma; }
  double beta() const noexcept { return params_.beta; }

 private:
  Params params_;
};

/// True when the smoothness-range condition holds.
bool smoothness_range_holds(double alpha, double alpha_prime, double p, double s,
                            double beta = 0.0) noexcept;

// Matern-like spectrum tau^(2e-1) * ((j pi)^2 + tau^2)^(-e), j = 1..J.
SpectralSequence matern_spectrum(double tau, double exponent, std::size_t J);

TruthOperator truth_eigenvalues(TruthKind kind, std::size_t J);
TruthOperator custom_truth(std::vector<double> eigenvalues, double s_star);

/// Diagonal prior variances; same closed form as matern_spectrum with tau3, p.
SpectralSequence prior_variances_diagonal(double p, double tau3, std::size_t J);

/// Per-entry prior variance of the non-diagonal (matrix) model, j, k >= 1.
/// Supported kinds: neg_laplacian (the elliptic operator), identity,
/// inv_neg_laplacian (its inverse).
double prior_variances_matrix(TruthKind kind, double z, std::size_t j, std::size_t k);

/// Signed overlap <cos((j-1/2) pi .), sin(k pi .)> of the unit-norm Volterra
/// cosine and sine bases on (0, 1).
double volterra_sine_overlap(std::size_t j, std::size_t k);

struct SeriesSum {
  double value = 0.0;
  double last_term = 0.0;  // magnitude of term K, convergence diagnostic
};

inline constexpr std::size_t kCrossBasisDefaultTerms = std::size_t{1} << 21;

/// Partial sum over k = 1..K of lambda_sq[k] * overlap(j, k)^2: the variance
/// of the j-th output-basis coefficient of a field that is diagonal in the
/// sine basis. Requires lambda_sq.size() >= K.
SeriesSum cross_basis_variance(std::span<const double> lambda_sq, std::size_t j,
                               std::size_t K = kCrossBasisDefaultTerms);
SeriesSum cross_basis_variance(const SpectralSequence& lambda_sq, std::size_t j,
                               std::size_t K = kCrossBasisDefaultTerms);

/// (sum_j j^(2s) v_j^2)^(1/2) over the stored modes.
double sobolev_norm(std::span<const double> v, double s);

}  // namespace oplearn
