// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reference computations that share no code path with the production
// estimators. Slow and small-scale by construction.

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

namespace oplearn::oracle {

struct DensePosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

/// Stacks y_jn = g_jn l_j + gamma xi_jn into one linear-Gaussian model
/// y = G l + noise (J N observations) and conditions in data space:
///   mean = S G^T (G S G^T + gamma^2 I)^(-1) y,  cov = S - S G^T (...)^(-1) G S.
DensePosterior conjugate_gaussian(const Eigen::MatrixXd& g, const Eigen::MatrixXd& y,
                                  std::span<const double> prior_var, double gamma);

/// argmin_r (1/N) sum_n (y_n - r . x_n)^2 + (gamma^2 / N) sum_k r_k^2 / prior_k,
/// solved as an augmented least-squares problem by Householder QR.
Eigen::VectorXd regularized_risk_minimizer(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                           std::span<const double> prior_var, double gamma);

/// Coordinate forms of the risks, up to the common constant:
///   R_inf(l) = 1/2 sum theta_j^2 l_j^2 - sum theta_j^2 truth_j l_j
///   R_N(l)   = (1/N) sum_n [1/2 sum_j (l_j g_jn)^2 - sum_j y_jn l_j g_jn]
double expected_risk(std::span<const double> l, std::span<const double> truth,
                     std::span<const double> theta_sq);
double empirical_risk(std::span<const double> l, const Eigen::MatrixXd& g,
                      const Eigen::MatrixXd& y);

/// Adaptive Gauss-Kronrod quadrature of <sqrt2 cos((j-1/2) pi z), sqrt2 sin(k pi z)>.
double overlap_quadrature(std::size_t j, std::size_t k);

/// <sqrt2 cos((j-1/2) pi z), A_a sqrt2 sin(k pi z)> with A_a h = -(a h')',
/// a(z) = exp(a_rate z), by quadrature of the strong form.
double forward_entry_quadrature(double a_rate, std::size_t j, std::size_t k);

/// <phi_k', A_a phi_k> = int a (phi_k')' (phi_k)' dz (weak form) by quadrature.
double stiffness_entry_quadrature(double a_rate, std::size_t kp, std::size_t k);

}  // namespace oplearn::oracle
