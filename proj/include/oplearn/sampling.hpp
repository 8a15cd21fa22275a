// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oplearn/rng.hpp"
#include "oplearn/spectra.hpp"

namespace oplearn {

/// Law of the unit-variance KL coefficients zeta.
enum class DesignLaw { gaussian, uniform, rademacher };

std::string_view to_string(DesignLaw law);
DesignLaw design_law_from_string(std::string_view name);

/// Coefficients of N inputs, one column per draw: coeffs(k, n) for mode k+1
/// of sample n+1.
struct DesignMatrix {
  Eigen::MatrixXd coeffs;
  DesignLaw law = DesignLaw::gaussian;

  std::size_t modes() const noexcept { return static_cast<std::size_t>(coeffs.rows()); }
  std::size_t samples() const noexcept { return static_cast<std::size_t>(coeffs.cols()); }
};

/// Realized training data plus per-mode averages <a_j b_j> = (1/N) sum_n a_jn b_jn.
///
/// Raw g and y are empty when the dataset was drawn through its sufficient
/// statistics only. suff_gxi holds <g_j xi_j> for the standard-normal noise
/// when the generator knows it; the noise itself is never stored.
struct Dataset {
  std::size_t modes = 0;
  std::size_t samples = 0;
  double gamma = 0.0;
  Eigen::MatrixXd g;
  Eigen::MatrixXd y;
  std::vector<double> suff_gg;
  std::vector<double> suff_yg;
  std::vector<double> suff_gxi;
  std::optional<Eigen::MatrixXd> gram;  // A(l, k) = <x_l x_k>
  std::optional<Eigen::MatrixXd> rhs;   // row j is b_j with (b_j)_l = <y_j x_l>

  bool has_raw() const noexcept { return g.size() > 0; }
};

/// coeffs(k, n) = sqrt(spectrum_k) * zeta_kn with zeta of the requested law.
/// Draws are taken column by column.
DesignMatrix draw_design(const SpectralSequence& spectrum, std::size_t N, DesignLaw law,
                         Rng& rng);

/// g = overlap * x, mapping input-basis coefficients to output-basis ones.
DesignMatrix project_design(const DesignMatrix& x, const Eigen::MatrixXd& overlap);

/// y_jn = g_jn * l_j + gamma * sqrt(noise_spectrum_j) * xi_jn. An empty noise
/// spectrum means white noise. Sufficient statistics are accumulated while
/// the data are generated.
Dataset gen_diagonal_dataset(const TruthOperator& truth, const DesignMatrix& design,
                             double gamma, Rng& noise_rng,
                             std::span<const double> noise_spectrum = {});

/// y = truth_matrix * x + gamma * xi, with gram and right-hand sides for the
/// row-wise ridge systems. Per-mode statistics use g = overlap * x.
Dataset gen_matrix_dataset(const Eigen::MatrixXd& truth_matrix, const DesignMatrix& x,
                           const Eigen::MatrixXd& overlap, double gamma, Rng& noise_rng);

/// Exact-in-law shortcut for Gaussian designs in the diagonal model: draws
/// N<g_j g_j>/theta_j^2 ~ chi^2(N) and <g_j xi_j> | g ~ N(0, <g_j g_j>/N)
/// without materializing g or y.
Dataset draw_sufficient_statistics(const TruthOperator& truth,
                                   const SpectralSequence& design_variance, std::size_t N,
                                   double gamma, Rng& design_rng, Rng& noise_rng,
                                   std::span<const double> noise_spectrum = {});

struct SufficientStatistics {
  std::vector<double> gg;
  std::vector<double> yg;
};

/// Post-hoc recomputation of <g_j g_j> and <y_j g_j> from raw data.
SufficientStatistics compute_sufficient_statistics(const Eigen::MatrixXd& g,
                                                   const Eigen::MatrixXd& y);

/// Writes (j, n, g, y) rows; requires raw data.
void write_dataset_csv(const Dataset& ds, const std::string& path);

}  // namespace oplearn
