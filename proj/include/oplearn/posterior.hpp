// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "oplearn/rng.hpp"
#include "oplearn/sampling.hpp"
#include "oplearn/spectra.hpp"

namespace oplearn {

/// Product-Gaussian posterior over the eigenvalues, one (mean, variance) per
/// mode.
struct DiagonalPosterior {
  std::vector<double> mean;
  std::vector<double> variance;

  std::size_t size() const noexcept { return mean.size(); }
};

/// Conjugate update per mode from <g_j g_j> and <y_j g_j>:
///   mean_j = N s_j <yg>_j / (v_j + N s_j <gg>_j),  var_j = s_j v_j / (v_j + N s_j <gg>_j)
/// with s_j the prior variance and v_j the noise variance of mode j.
DiagonalPosterior diag_posterior(std::span<const double> suff_gg,
                                 std::span<const double> suff_yg,
                                 const SpectralSequence& prior, double gamma, std::size_t N);
DiagonalPosterior diag_posterior(const Dataset& ds, const SpectralSequence& prior, double gamma,
                                 std::size_t N);

/// Same update with per-mode noise variance gamma^2 * gamma_spectrum_j.
DiagonalPosterior diag_posterior_colored(const Dataset& ds, const SpectralSequence& prior,
                                         double gamma, const SpectralSequence& gamma_spectrum,
                                         std::size_t N);

/// M independent draws; draw m is a vector of one normal per mode.
std::vector<std::vector<double>> sample_posterior(const DiagonalPosterior& post, std::size_t M,
                                                  Rng& rng);

struct RowSolve {
  Eigen::VectorXd row;
  double condition_estimate = 0.0;
  double relative_residual = 0.0;
};

/// Posterior mean of one row of the operator matrix:
///   (gram + (gamma^2 / N) diag(1 / row_prior)) row = rhs,
/// solved by Cholesky. Throws NumericalError if the factorization fails.
RowSolve matrix_posterior_row(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs,
                              std::span<const double> row_prior, double gamma, std::size_t N);

struct MatrixFit {
  Eigen::MatrixXd rows;
  std::vector<double> condition_estimates;
  double max_relative_residual = 0.0;
};

/// All rows of the matrix model; row_prior(j, k) is the prior variance of
/// entry (j, k). Requires ds.gram and ds.rhs.
MatrixFit matrix_posterior(const Dataset& ds, const Eigen::MatrixXd& row_prior, double gamma);

// ---------------------------------------------------------------------------
// Non-diagonal truth operators on (0, 1): rows in the Volterra cosine basis,
// columns in the sine basis.

enum class EllipticKind { forward, identity, inverse };

/// J_out x J_in matrix of <cos-basis_j, sin-basis_k>.
Eigen::MatrixXd volterra_sine_overlap_matrix(std::size_t J_out, std::size_t J_in);

/// Sine-basis Galerkin matrix S(k', k) = <phi_k', A_a phi_k> of
/// A_a h = -(a h')' with a(z) = exp(a_rate z).
Eigen::MatrixXd sine_stiffness_matrix(double a_rate, std::size_t J);

/// Truth matrix L(j, k) = <varphi_j, T phi_k> for T = A_a, the identity or
/// A_a^(-1). The inverse is formed on a sine space of size galerkin_ratio * J
/// and compressed through the overlap.
Eigen::MatrixXd galerkin_truth_matrix(EllipticKind kind, double a_rate, std::size_t J,
                                      std::size_t galerkin_ratio = 4);

EllipticKind elliptic_kind_for(TruthKind truth);

}  // namespace oplearn
