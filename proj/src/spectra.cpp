// SPDX-License-Identifier: Apache-2.0
#include "oplearn/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "oplearn/errors.hpp"

namespace oplearn {

namespace {

constexpr double kPi = std::numbers::pi;

// Evaluates tau^(2e-1) * ((j pi)^2 + tau^2)^(-e) in log space so large |e|
// does not overflow before the floor check.
std::vector<double> matern_values(double tau, double exponent, std::size_t J) {
  std::vector<double> out(J);
  const double log_scale = (2.0 * exponent - 1.0) * std::log(tau);
  for (std::size_t j = 1; j <= J; ++j) {
    const double jp = static_cast<double>(j) * kPi;
    // exp of a very negative log underflows to 0; keep it positive so the floor applies
    out[j - 1] = std::max(std::exp(log_scale - exponent * std::log(jp * jp + tau * tau)),
                          std::numeric_limits<double>::denorm_min());
  }
  return out;
}

}  // namespace

SpectralSequence::SpectralSequence(std::vector<double> values,
                                   std::optional<double> decay_exponent_hint)
    : values_(std::move(values)), hint_(decay_exponent_hint) {
  if (values_.empty()) throw InvalidArgument("spectral sequence needs at least one mode");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    double& v = values_[i];
    if (!std::isfinite(v) || !(v > 0.0))
      throw InvalidArgument("spectral sequence entry " + std::to_string(i + 1) +
                            " is not a positive finite number");
    if (v < kUnderflowFloor) {
      v = kUnderflowFloor;
      ++underflow_count_;
    }
  }
}

SpectralSequence SpectralSequence::truncated(std::size_t J) const {
  if (J == 0 || J > values_.size()) throw InvalidArgument("truncation level out of range");
  return SpectralSequence(std::vector<double>(values_.begin(), values_.begin() + J), hint_);
}

std::string_view to_string(TruthKind kind) {
  switch (kind) {
    case TruthKind::neg_laplacian: return "neg_laplacian";
    case TruthKind::identity: return "identity";
    case TruthKind::inv_neg_laplacian: return "inv_neg_laplacian";
    case TruthKind::custom: return "custom";
  }
  return "custom";
}

TruthKind truth_kind_from_string(std::string_view name) {
  if (name == "neg_laplacian" || name == "A") return TruthKind::neg_laplacian;
  if (name == "identity" || name == "id") return TruthKind::identity;
  if (name == "inv_neg_laplacian" || name == "A_inv") return TruthKind::inv_neg_laplacian;
  if (name == "custom") return TruthKind::custom;
  throw InvalidArgument("unknown truth kind '" + std::string(name) + "'");
}

double truth_s_star(TruthKind kind) {
  switch (kind) {
    case TruthKind::neg_laplacian: return -2.5;
    case TruthKind::identity: return -0.5;
    case TruthKind::inv_neg_laplacian: return 1.5;
    case TruthKind::custom: break;
  }
  throw InvalidArgument("custom truths carry their own s_star");
}

bool smoothness_range_holds(double alpha, double alpha_prime, double p, double s,
                            double beta) noexcept {
  const double m = std::min(alpha - beta, alpha_prime);
  return m + s > 0.0 && m + (p - 0.5) > 0.0;
}

ModelConfig::ModelConfig(const Params& params) : params_(params) {
  const auto& q = params_;
  if (!(q.alpha > 0.5)) throw InvalidArgument("alpha must exceed 1/2");
  if (!(q.alpha_prime >= 0.0)) throw InvalidArgument("alpha_prime must be nonnegative");
  if (!(q.beta >= 0.0)) throw InvalidArgument("beta must be nonnegative");
  if (!(q.tau1 > 0.0 && q.tau2 > 0.0 && q.tau3 > 0.0))
    throw InvalidArgument("inverse length scales must be positive");
  if (!(q.gamma >= 0.0)) throw InvalidArgument("noise scale must be nonnegative");
  if (!smoothness_range_holds(q.alpha, q.alpha_prime, q.p, q.s, q.beta))
    throw InvalidArgument("smoothness range violated: need min(alpha-beta, alpha') + s > 0 "
                          "and min(alpha-beta, alpha') + p - 1/2 > 0");
}

ModelConfig ModelConfig::with_prior_shift(TruthKind truth, double alpha, double alpha_prime,
                                          double z, Params base) {
  const double s_star = truth_s_star(truth);
  base.alpha = alpha;
  base.alpha_prime = alpha_prime;
  base.z = z;
  base.s = s_star;
  base.p = s_star + 0.5 + z;
  return ModelConfig(base);
}

ModelConfig ModelConfig::with_prior_shift(TruthKind truth, double alpha, double alpha_prime,
                                          double z) {
  return with_prior_shift(truth, alpha, alpha_prime, z, Params{});
}

SpectralSequence matern_spectrum(double tau, double exponent, std::size_t J) {
  if (!(tau > 0.0)) throw InvalidArgument("matern_spectrum: tau must be positive");
  if (J == 0) throw InvalidArgument("matern_spectrum: J must be at least 1");
  return SpectralSequence(matern_values(tau, exponent, J), exponent);
}

TruthOperator truth_eigenvalues(TruthKind kind, std::size_t J) {
  if (J == 0) throw InvalidArgument("truth_eigenvalues: J must be at least 1");
  TruthOperator t;
  t.kind = kind;
  t.s_star = truth_s_star(kind);
  t.eigenvalues.resize(J);
  for (std::size_t j = 1; j <= J; ++j) {
    const double jp = static_cast<double>(j) * kPi;
    switch (kind) {
      case TruthKind::neg_laplacian: t.eigenvalues[j - 1] = jp * jp; break;
      case TruthKind::identity: t.eigenvalues[j - 1] = 1.0; break;
      case TruthKind::inv_neg_laplacian: t.eigenvalues[j - 1] = 1.0 / (jp * jp); break;
      case TruthKind::custom: break;
    }
  }
  return t;
}

TruthOperator custom_truth(std::vector<double> eigenvalues, double s_star) {
  if (eigenvalues.empty()) throw InvalidArgument("custom_truth: J must be at least 1");
  return TruthOperator{TruthKind::custom, std::move(eigenvalues), s_star};
}

SpectralSequence prior_variances_diagonal(double p, double tau3, std::size_t J) {
  if (!(tau3 > 0.0)) throw InvalidArgument("prior_variances_diagonal: tau3 must be positive");
  if (J == 0) throw InvalidArgument("prior_variances_diagonal: J must be at least 1");
  return SpectralSequence(matern_values(tau3, p, J), p);
}

double prior_variances_matrix(TruthKind kind, double z, std::size_t j, std::size_t k) {
  if (j == 0 || k == 0) throw InvalidArgument("prior_variances_matrix: indices start at 1");
  const double jd = static_cast<double>(j);
  const double kd = static_cast<double>(k);
  const double d = jd - kd;
  const double jk = jd * kd;
  switch (kind) {
    case TruthKind::neg_laplacian: {
      const double r = (1.0 + (kd / jd) * (kd / jd)) / (1.0 + d * d);
      return std::pow(jk, -(z - 2.0)) * r * r;
    }
    case TruthKind::identity: {
      const double r = (kd + kd / jd) / (1.0 + jd + d * d);
      return std::pow(jk, -z) * r * r;
    }
    case TruthKind::inv_neg_laplacian: {
      const double r = (1.0 + jd / kd) / (1.0 + d * d);
      return std::pow(jk, -(z + 2.0)) * r * r;
    }
    case TruthKind::custom: break;
  }
  throw InvalidArgument("prior_variances_matrix: unsupported truth kind");
}

double volterra_sine_overlap(std::size_t j, std::size_t k) {
  if (j == 0 || k == 0) throw InvalidArgument("volterra_sine_overlap: indices start at 1");
  const auto two_j = static_cast<std::int64_t>(2 * j - 1);
  const auto two_k = static_cast<std::int64_t>(2 * k);
  const double denom = static_cast<double>(two_k * two_k - two_j * two_j);
  return 8.0 * static_cast<double>(k) / (kPi * denom);
}

SeriesSum cross_basis_variance(std::span<const double> lambda_sq, std::size_t j,
                               std::size_t K) {
  if (j == 0) throw InvalidArgument("cross_basis_variance: j starts at 1");
  if (K == 0) throw InvalidArgument("cross_basis_variance: K must be at least 1");
  if (lambda_sq.size() < K)
    throw DimensionMismatch("cross_basis_variance: spectrum shorter than K");
  const auto two_j = static_cast<std::int64_t>(2 * j - 1);
  const double jj = static_cast<double>(two_j * two_j);
  constexpr double scale = 64.0 / (kPi * kPi);
  SeriesSum out;
  // Terms are nonnegative; Kahan compensation keeps the sum monotone in K.
  double sum = 0.0;
  double carry = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double kd = static_cast<double>(k);
    const double denom = 4.0 * kd * kd - jj;
    const double term = scale * lambda_sq[k - 1] * kd * kd / (denom * denom);
    const double y = term - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
    if (k == K) out.last_term = term;
  }
  out.value = sum;
  return out;
}

SeriesSum cross_basis_variance(const SpectralSequence& lambda_sq, std::size_t j,
                               std::size_t K) {
  return cross_basis_variance(lambda_sq.values(), j, K);
}

double sobolev_norm(std::span<const double> v, double s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    const double w = std::pow(static_cast<double>(i + 1), 2.0 * s);
    acc += w * v[i] * v[i];
  }
  return std::sqrt(acc);
}

}  // namespace oplearn
