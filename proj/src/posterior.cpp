// SPDX-License-Identifier: Apache-2.0
#include "oplearn/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oplearn/errors.hpp"

namespace oplearn {

namespace {

DiagonalPosterior conjugate_update(std::span<const double> gg, std::span<const double> yg,
                                   const SpectralSequence& prior, std::size_t N,
                                   auto&& noise_variance) {
  if (gg.size() != yg.size()) throw DimensionMismatch("diag_posterior: statistic sizes differ");
  if (prior.size() < gg.size())
    throw DimensionMismatch("diag_posterior: prior has fewer modes than the dataset");
  if (N == 0) throw InvalidArgument("diag_posterior: N must be at least 1");
  const double n = static_cast<double>(N);
  DiagonalPosterior post;
  post.mean.resize(gg.size());
  post.variance.resize(gg.size());
  for (std::size_t j = 0; j < gg.size(); ++j) {
    const double s = prior[j];
    const double v = noise_variance(j);
    const double denom = v + n * s * gg[j];
    post.mean[j] = n * s * yg[j] / denom;
    post.variance[j] = s * v / denom;
  }
  return post;
}

}  // namespace

DiagonalPosterior diag_posterior(std::span<const double> suff_gg,
                                 std::span<const double> suff_yg,
                                 const SpectralSequence& prior, double gamma, std::size_t N) {
  if (!(gamma > 0.0)) throw InvalidArgument("diag_posterior: gamma must be positive");
  const double v = gamma * gamma;
  return conjugate_update(suff_gg, suff_yg, prior, N, [v](std::size_t) { return v; });
}

DiagonalPosterior diag_posterior(const Dataset& ds, const SpectralSequence& prior, double gamma,
                                 std::size_t N) {
  return diag_posterior(ds.suff_gg, ds.suff_yg, prior, gamma, N);
}

DiagonalPosterior diag_posterior_colored(const Dataset& ds, const SpectralSequence& prior,
                                         double gamma, const SpectralSequence& gamma_spectrum,
                                         std::size_t N) {
  if (!(gamma > 0.0)) throw InvalidArgument("diag_posterior_colored: gamma must be positive");
  if (gamma_spectrum.size() < ds.suff_gg.size())
    throw DimensionMismatch("diag_posterior_colored: noise spectrum too short");
  const double g2 = gamma * gamma;
  return conjugate_update(ds.suff_gg, ds.suff_yg, prior, N,
                          [&](std::size_t j) { return g2 * gamma_spectrum[j]; });
}

std::vector<std::vector<double>> sample_posterior(const DiagonalPosterior& post, std::size_t M,
                                                  Rng& rng) {
  if (M == 0) throw InvalidArgument("sample_posterior: M must be at least 1");
  std::vector<std::vector<double>> draws(M, std::vector<double>(post.size()));
  for (auto& d : draws)
    for (std::size_t j = 0; j < post.size(); ++j)
      d[j] = post.mean[j] + std::sqrt(post.variance[j]) * rng.normal();
  return draws;
}

RowSolve matrix_posterior_row(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs,
                              std::span<const double> row_prior, double gamma, std::size_t N) {
  const auto J = gram.rows();
  if (gram.cols() != J || rhs.size() != J || static_cast<Eigen::Index>(row_prior.size()) != J)
    throw DimensionMismatch("matrix_posterior_row: gram, rhs and prior sizes differ");
  if (!(gamma > 0.0)) throw InvalidArgument("matrix_posterior_row: gamma must be positive");
  if (N == 0) throw InvalidArgument("matrix_posterior_row: N must be at least 1");

  const double ridge = gamma * gamma / static_cast<double>(N);
  Eigen::MatrixXd system = gram;
  for (Eigen::Index k = 0; k < J; ++k) {
    const double s = row_prior[static_cast<std::size_t>(k)];
    if (!(s > 0.0)) throw InvalidArgument("matrix_posterior_row: prior must be positive");
    system(k, k) += ridge / s;
  }

  Eigen::LLT<Eigen::MatrixXd> llt(system);
  RowSolve out;
  const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  out.condition_estimate = rcond > 0.0 ? 1.0 / rcond : INFINITY;
  if (llt.info() != Eigen::Success)
    throw NumericalError("matrix_posterior_row: Cholesky factorization failed", INFINITY);
  out.row = llt.solve(rhs);
  // One step of iterative refinement.
  out.row += llt.solve(rhs - system * out.row);
  const double rhs_norm = rhs.norm();
  const double res = (system * out.row - rhs).norm();
  out.relative_residual = rhs_norm > 0.0 ? res / rhs_norm : res;
  return out;
}

MatrixFit matrix_posterior(const Dataset& ds, const Eigen::MatrixXd& row_prior, double gamma) {
  if (!ds.gram || !ds.rhs) throw InvalidArgument("matrix_posterior: dataset lacks gram/rhs");
  const auto J = ds.rhs->rows();
  if (row_prior.rows() != J || row_prior.cols() != ds.gram->rows())
    throw DimensionMismatch("matrix_posterior: prior shape does not match the dataset");
  MatrixFit fit;
  fit.rows.resize(J, ds.gram->cols());
  fit.condition_estimates.resize(static_cast<std::size_t>(J));
  std::vector<double> prior_row(static_cast<std::size_t>(row_prior.cols()));
  for (Eigen::Index j = 0; j < J; ++j) {
    for (Eigen::Index k = 0; k < row_prior.cols(); ++k)
      prior_row[static_cast<std::size_t>(k)] = row_prior(j, k);
    const RowSolve r =
        matrix_posterior_row(*ds.gram, ds.rhs->row(j).transpose(), prior_row, gamma, ds.samples);
    fit.rows.row(j) = r.row.transpose();
    fit.condition_estimates[static_cast<std::size_t>(j)] = r.condition_estimate;
    fit.max_relative_residual = std::max(fit.max_relative_residual, r.relative_residual);
  }
  return fit;
}

}  // namespace oplearn
