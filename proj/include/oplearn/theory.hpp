// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace oplearn {

enum class LogFactor { none, log_N };
enum class DominantTerm { variance, bias };

std::string_view to_string(LogFactor f);
std::string_view to_string(DominantTerm d);

/// Predicted error decay N^(-exponent), possibly times a log factor.
struct RatePrediction {
  double exponent = 0.0;
  double variance_exponent = 0.0;  // rho_N branch, capped at 1
  double bias_exponent = 0.0;      // (alpha' + s) / (alpha + p)
  LogFactor log_factor = LogFactor::none;
  DominantTerm dominant_term = DominantTerm::variance;
  /// Power of log N carried by S^2(J_N) when the bias term dominates and the
  /// slowly varying factor is S(x) = log(e + x)^q.
  double slowly_varying_log_power = 0.0;
};

enum class RhoBranch { interior, boundary, capped };
std::string_view to_string(RhoBranch b);

/// Which case of the variance sequence applies; the boundary alpha' = alpha + 1/2
/// is matched with a relative tolerance of 1e-12.
RhoBranch rho_branch(double alpha, double alpha_prime);

/// Variance-rate sequence rho_N(alpha, alpha', p) (natural log on the boundary).
double rho_N(double alpha, double alpha_prime, double p, double N);

/// floor(N^(1 / (2 (alpha + p)))).
std::size_t J_N(double alpha, double p, double N);

/// Sharp rate for regularly varying truths. q is the log power of the slowly
/// varying factor (0 for pure power laws).
RatePrediction upper_rate_exponent(double alpha, double alpha_prime, double p, double s,
                                   double q = 0.0);

/// Colored noise with spectrum ~ j^(-2 beta): alpha replaced by alpha - beta.
RatePrediction colored_rate_exponent(double alpha, double alpha_prime, double p, double s,
                                     double beta);

struct ExcessRiskExponents {
  RatePrediction upper;
  /// min of (alpha + p - 1/2)/(alpha + p) and (alpha + s)/(alpha + p)
  double variance_exponent = 0.0;
  double bias_exponent = 0.0;
};

ExcessRiskExponents excess_risk_exponents(double alpha, double p, double s);

/// sum_{j > J_N(alpha, p)} j^(-2 alpha) truth_j^2 over the supplied modes.
double excess_risk_lower_tail(double alpha, double p, double N, std::span<const double> truth);

/// min(1/2, (alpha + p - 1/2)/(alpha + p)).
RatePrediction gap_rate_exponent(double alpha, double p);

/// eps_N = N^(-r/2), with sqrt(log N) on the boundary branch.
double contraction_rate(double alpha, double alpha_prime, double p, double s, double N);

/// Predicted order of sum_{j <= N^(1/u)} j^(-t) (1 + N j^(-u))^(-v).
double lemma_series_order(double t, double u, double v, double N);

/// The partial sum itself.
double lemma_series_partial_sum(double t, double u, double v, double N);

}  // namespace oplearn
