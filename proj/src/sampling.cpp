// SPDX-License-Identifier: Apache-2.0
#include "oplearn/sampling.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "oplearn/errors.hpp"
#include "oplearn/format.hpp"

namespace oplearn {

std::string_view to_string(DesignLaw law) {
  switch (law) {
    case DesignLaw::gaussian: return "gaussian";
    case DesignLaw::uniform: return "uniform";
    case DesignLaw::rademacher: return "rademacher";
  }
  return "gaussian";
}

DesignLaw design_law_from_string(std::string_view name) {
  if (name == "gaussian") return DesignLaw::gaussian;
  if (name == "uniform") return DesignLaw::uniform;
  if (name == "rademacher") return DesignLaw::rademacher;
  throw InvalidArgument("unknown design law '" + std::string(name) + "'");
}

DesignMatrix draw_design(const SpectralSequence& spectrum, std::size_t N, DesignLaw law,
                         Rng& rng) {
  if (N == 0) throw InvalidArgument("draw_design: N must be at least 1");
  const auto J = static_cast<Eigen::Index>(spectrum.size());
  std::vector<double> scale(spectrum.size());
  for (std::size_t k = 0; k < scale.size(); ++k) scale[k] = std::sqrt(spectrum[k]);

  DesignMatrix out;
  out.law = law;
  out.coeffs.resize(J, static_cast<Eigen::Index>(N));
  const double half_width = std::sqrt(3.0);
  for (Eigen::Index n = 0; n < out.coeffs.cols(); ++n) {
    for (Eigen::Index k = 0; k < J; ++k) {
      double zeta = 0.0;
      switch (law) {
        case DesignLaw::gaussian: zeta = rng.normal(); break;
        case DesignLaw::uniform: zeta = rng.uniform(-half_width, half_width); break;
        case DesignLaw::rademacher: zeta = rng.rademacher(); break;
      }
      out.coeffs(k, n) = scale[static_cast<std::size_t>(k)] * zeta;
    }
  }
  return out;
}

DesignMatrix project_design(const DesignMatrix& x, const Eigen::MatrixXd& overlap) {
  if (overlap.cols() != x.coeffs.rows())
    throw DimensionMismatch("project_design: overlap has " + std::to_string(overlap.cols()) +
                            " columns but design has " + std::to_string(x.coeffs.rows()) +
                            " modes");
  DesignMatrix out;
  out.law = x.law;
  out.coeffs.noalias() = overlap * x.coeffs;
  return out;
}

namespace {

double noise_sd(double gamma, std::span<const double> noise_spectrum, Eigen::Index j) {
  if (noise_spectrum.empty()) return gamma;
  return gamma * std::sqrt(noise_spectrum[static_cast<std::size_t>(j)]);
}

void check_noise_spectrum(std::span<const double> noise_spectrum, std::size_t J) {
  if (!noise_spectrum.empty() && noise_spectrum.size() < J)
    throw DimensionMismatch("noise spectrum shorter than the number of modes");
}

}  // namespace

Dataset gen_diagonal_dataset(const TruthOperator& truth, const DesignMatrix& design,
                             double gamma, Rng& noise_rng,
                             std::span<const double> noise_spectrum) {
  if (!(gamma >= 0.0)) throw InvalidArgument("gen_diagonal_dataset: gamma must be >= 0");
  const auto J = design.coeffs.rows();
  const auto N = design.coeffs.cols();
  if (truth.size() < static_cast<std::size_t>(J))
    throw DimensionMismatch("gen_diagonal_dataset: truth has fewer modes than the design");
  check_noise_spectrum(noise_spectrum, static_cast<std::size_t>(J));

  Dataset ds;
  ds.modes = static_cast<std::size_t>(J);
  ds.samples = static_cast<std::size_t>(N);
  ds.gamma = gamma;
  ds.g = design.coeffs;
  ds.y.resize(J, N);
  std::vector<double> gg(ds.modes, 0.0), yg(ds.modes, 0.0), gxi(ds.modes, 0.0);
  for (Eigen::Index n = 0; n < N; ++n) {
    for (Eigen::Index j = 0; j < J; ++j) {
      const double xi = noise_rng.normal();
      const double gjn = ds.g(j, n);
      const double yjn = gjn * truth.eigenvalues[static_cast<std::size_t>(j)] +
                         noise_sd(gamma, noise_spectrum, j) * xi;
      ds.y(j, n) = yjn;
      const auto u = static_cast<std::size_t>(j);
      gg[u] += gjn * gjn;
      yg[u] += yjn * gjn;
      gxi[u] += gjn * xi;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(N);
  for (std::size_t j = 0; j < ds.modes; ++j) {
    gg[j] *= inv_n;
    yg[j] *= inv_n;
    gxi[j] *= inv_n;
  }
  ds.suff_gg = std::move(gg);
  ds.suff_yg = std::move(yg);
  ds.suff_gxi = std::move(gxi);
  return ds;
}

Dataset gen_matrix_dataset(const Eigen::MatrixXd& truth_matrix, const DesignMatrix& x,
                           const Eigen::MatrixXd& overlap, double gamma, Rng& noise_rng) {
  if (!(gamma >= 0.0)) throw InvalidArgument("gen_matrix_dataset: gamma must be >= 0");
  if (truth_matrix.cols() != x.coeffs.rows())
    throw DimensionMismatch("gen_matrix_dataset: truth columns do not match design modes");
  if (overlap.cols() != x.coeffs.rows() || overlap.rows() != truth_matrix.rows())
    throw DimensionMismatch("gen_matrix_dataset: overlap shape does not match truth/design");

  const auto J = truth_matrix.rows();
  const auto N = x.coeffs.cols();
  Dataset ds;
  ds.modes = static_cast<std::size_t>(J);
  ds.samples = static_cast<std::size_t>(N);
  ds.gamma = gamma;
  ds.y.noalias() = truth_matrix * x.coeffs;
  Eigen::MatrixXd xi(J, N);
  for (Eigen::Index n = 0; n < N; ++n)
    for (Eigen::Index j = 0; j < J; ++j) xi(j, n) = noise_rng.normal();
  ds.y += gamma * xi;
  ds.g.noalias() = overlap * x.coeffs;

  const double inv_n = 1.0 / static_cast<double>(N);
  ds.suff_gg.assign(ds.modes, 0.0);
  ds.suff_yg.assign(ds.modes, 0.0);
  ds.suff_gxi.assign(ds.modes, 0.0);
  for (Eigen::Index n = 0; n < N; ++n) {
    for (Eigen::Index j = 0; j < J; ++j) {
      const auto u = static_cast<std::size_t>(j);
      const double gjn = ds.g(j, n);
      ds.suff_gg[u] += gjn * gjn;
      ds.suff_yg[u] += ds.y(j, n) * gjn;
      ds.suff_gxi[u] += gjn * xi(j, n);
    }
  }
  for (std::size_t j = 0; j < ds.modes; ++j) {
    ds.suff_gg[j] *= inv_n;
    ds.suff_yg[j] *= inv_n;
    ds.suff_gxi[j] *= inv_n;
  }

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(x.coeffs.rows(), x.coeffs.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x.coeffs, inv_n);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  ds.gram = std::move(gram);
  ds.rhs = (ds.y * x.coeffs.transpose()) * inv_n;
  return ds;
}

Dataset draw_sufficient_statistics(const TruthOperator& truth,
                                   const SpectralSequence& design_variance, std::size_t N,
                                   double gamma, Rng& design_rng, Rng& noise_rng,
                                   std::span<const double> noise_spectrum) {
  if (N == 0) throw InvalidArgument("draw_sufficient_statistics: N must be at least 1");
  if (!(gamma >= 0.0)) throw InvalidArgument("draw_sufficient_statistics: gamma must be >= 0");
  const std::size_t J = design_variance.size();
  if (truth.size() < J)
    throw DimensionMismatch("draw_sufficient_statistics: truth has fewer modes than design");
  check_noise_spectrum(noise_spectrum, J);

  Dataset ds;
  ds.modes = J;
  ds.samples = N;
  ds.gamma = gamma;
  ds.suff_gg.resize(J);
  ds.suff_yg.resize(J);
  ds.suff_gxi.resize(J);
  const double n = static_cast<double>(N);
  for (std::size_t j = 0; j < J; ++j) {
    const double gg = design_variance[j] * design_rng.chi_squared(n) / n;
    const double gxi = std::sqrt(gg / n) * noise_rng.normal();
    const double sd = noise_spectrum.empty() ? gamma : gamma * std::sqrt(noise_spectrum[j]);
    ds.suff_gg[j] = gg;
    ds.suff_gxi[j] = gxi;
    ds.suff_yg[j] = truth.eigenvalues[j] * gg + sd * gxi;
  }
  return ds;
}

SufficientStatistics compute_sufficient_statistics(const Eigen::MatrixXd& g,
                                                   const Eigen::MatrixXd& y) {
  if (g.rows() != y.rows() || g.cols() != y.cols())
    throw DimensionMismatch("compute_sufficient_statistics: g and y shapes differ");
  SufficientStatistics s;
  const auto J = static_cast<std::size_t>(g.rows());
  s.gg.resize(J);
  s.yg.resize(J);
  const double inv_n = 1.0 / static_cast<double>(g.cols());
  for (Eigen::Index j = 0; j < g.rows(); ++j) {
    s.gg[static_cast<std::size_t>(j)] = g.row(j).squaredNorm() * inv_n;
    s.yg[static_cast<std::size_t>(j)] = g.row(j).dot(y.row(j)) * inv_n;
  }
  return s;
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  if (!ds.has_raw()) throw InvalidArgument("write_dataset_csv: dataset holds no raw samples");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "# " << kSchemaVersion << " dataset\n";
  out << "j,n,g,y\n";
  for (Eigen::Index n = 0; n < ds.g.cols(); ++n)
    for (Eigen::Index j = 0; j < ds.g.rows(); ++j)
      out << (j + 1) << ',' << (n + 1) << ',' << format_double(ds.g(j, n)) << ','
          << format_double(ds.y(j, n)) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace oplearn
