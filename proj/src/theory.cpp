// SPDX-License-Identifier: Apache-2.0
#include "oplearn/theory.hpp"

#include <algorithm>
#include <cmath>

#include "oplearn/errors.hpp"
#include "oplearn/spectra.hpp"

namespace oplearn {

std::string_view to_string(LogFactor f) { return f == LogFactor::log_N ? "log_N" : "none"; }

std::string_view to_string(DominantTerm d) {
  return d == DominantTerm::variance ? "variance" : "bias";
}

std::string_view to_string(RhoBranch b) {
  switch (b) {
    case RhoBranch::interior: return "interior";
    case RhoBranch::boundary: return "boundary";
    case RhoBranch::capped: return "capped";
  }
  return "interior";
}

RhoBranch rho_branch(double alpha, double alpha_prime) {
  const double edge = alpha + 0.5;
  const double tol = 1e-12 * std::max({1.0, std::abs(edge), std::abs(alpha_prime)});
  if (std::abs(alpha_prime - edge) <= tol) return RhoBranch::boundary;
  return alpha_prime < edge ? RhoBranch::interior : RhoBranch::capped;
}

namespace {

double variance_exponent(double alpha, double alpha_prime, double p) {
  if (rho_branch(alpha, alpha_prime) == RhoBranch::interior)
    return 1.0 - (alpha + 0.5 - alpha_prime) / (alpha + p);
  return 1.0;
}

void require_positive_n(double N) {
  if (!(N >= 1.0)) throw InvalidArgument("sample size must be at least 1");
}

}  // namespace

double rho_N(double alpha, double alpha_prime, double p, double N) {
  require_positive_n(N);
  if (!(alpha + p > 0.5)) throw InvalidArgument("rho_N: requires alpha + p > 1/2");
  switch (rho_branch(alpha, alpha_prime)) {
    case RhoBranch::interior:
      return std::pow(N, -variance_exponent(alpha, alpha_prime, p));
    case RhoBranch::boundary: return std::log(N) / N;
    case RhoBranch::capped: return 1.0 / N;
  }
  return 1.0 / N;
}

std::size_t J_N(double alpha, double p, double N) {
  require_positive_n(N);
  if (!(alpha + p > 0.0)) throw InvalidArgument("J_N: requires alpha + p > 0");
  // Nudge up by a few ulps so exact integer roots are not floored away.
  const double root = std::pow(N, 1.0 / (2.0 * (alpha + p)));
  return static_cast<std::size_t>(std::floor(root * (1.0 + 4e-16)));
}

RatePrediction upper_rate_exponent(double alpha, double alpha_prime, double p, double s,
                                   double q) {
  if (!smoothness_range_holds(alpha, alpha_prime, p, s))
    throw InvalidArgument("upper_rate_exponent: smoothness range violated");
  RatePrediction r;
  r.variance_exponent = variance_exponent(alpha, alpha_prime, p);
  r.bias_exponent = (alpha_prime + s) / (alpha + p);
  if (r.variance_exponent <= r.bias_exponent) {
    r.exponent = r.variance_exponent;
    r.dominant_term = DominantTerm::variance;
    if (rho_branch(alpha, alpha_prime) == RhoBranch::boundary) r.log_factor = LogFactor::log_N;
  } else {
    r.exponent = r.bias_exponent;
    r.dominant_term = DominantTerm::bias;
  }
  if (r.bias_exponent <= r.variance_exponent) r.slowly_varying_log_power = 2.0 * q;
  return r;
}

RatePrediction colored_rate_exponent(double alpha, double alpha_prime, double p, double s,
                                     double beta) {
  if (!(beta >= 0.0)) throw InvalidArgument("colored_rate_exponent: beta must be >= 0");
  if (!smoothness_range_holds(alpha, alpha_prime, p, s, beta))
    throw InvalidArgument("colored_rate_exponent: smoothness range violated");
  return upper_rate_exponent(alpha - beta, alpha_prime, p, s);
}

ExcessRiskExponents excess_risk_exponents(double alpha, double p, double s) {
  ExcessRiskExponents e;
  e.upper = upper_rate_exponent(alpha, alpha, p, s);
  e.variance_exponent = (alpha + p - 0.5) / (alpha + p);
  e.bias_exponent = (alpha + s) / (alpha + p);
  return e;
}

double excess_risk_lower_tail(double alpha, double p, double N, std::span<const double> truth) {
  const std::size_t cut = J_N(alpha, p, N);
  double acc = 0.0;
  for (std::size_t j = cut + 1; j <= truth.size(); ++j)
    acc += std::pow(static_cast<double>(j), -2.0 * alpha) * truth[j - 1] * truth[j - 1];
  return acc;
}

RatePrediction gap_rate_exponent(double alpha, double p) {
  if (!(alpha + p > 0.5)) throw InvalidArgument("gap_rate_exponent: requires alpha + p > 1/2");
  RatePrediction r;
  r.variance_exponent = (alpha + p - 0.5) / (alpha + p);
  r.bias_exponent = 0.5;
  r.exponent = std::min(0.5, r.variance_exponent);
  r.dominant_term = r.variance_exponent < 0.5 ? DominantTerm::variance : DominantTerm::bias;
  return r;
}

double contraction_rate(double alpha, double alpha_prime, double p, double s, double N) {
  require_positive_n(N);
  const RatePrediction r = upper_rate_exponent(alpha, alpha_prime, p, s);
  double eps = std::pow(N, -0.5 * r.exponent);
  if (r.log_factor == LogFactor::log_N) eps *= std::sqrt(std::log(N));
  return eps;
}

double lemma_series_order(double t, double u, double v, double N) {
  require_positive_n(N);
  if (!(t > 1.0 && u > 0.0 && v >= 0.0))
    throw InvalidArgument("lemma_series_order: need t > 1, u > 0, v >= 0");
  const double ratio = (t - 1.0) / u;
  const double tol = 1e-12 * std::max(1.0, std::abs(v));
  if (std::abs(ratio - v) <= tol) return std::pow(N, -v) * std::log(N);
  if (ratio < v) return std::pow(N, -ratio);
  return std::pow(N, -v);
}

double lemma_series_partial_sum(double t, double u, double v, double N) {
  require_positive_n(N);
  const auto top = static_cast<std::size_t>(std::floor(std::pow(N, 1.0 / u) * (1.0 + 4e-16)));
  double acc = 0.0;
  // Smallest terms first.
  for (std::size_t j = top; j >= 1; --j) {
    const double jd = static_cast<double>(j);
    acc += std::pow(jd, -t) * std::pow(1.0 + N * std::pow(jd, -u), -v);
  }
  return acc;
}

}  // namespace oplearn
