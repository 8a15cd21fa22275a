// SPDX-License-Identifier: Apache-2.0
#include "oplearn/oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "oplearn/errors.hpp"

namespace oplearn::oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;

template <class F>
double integrate01(F f, double cycles) {
  // Split into unit-wavelength panels so each is smooth and low-frequency.
  const int panels = std::max(1, static_cast<int>(std::ceil(cycles)));
  double acc = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = static_cast<double>(i) / panels;
    const double b = static_cast<double>(i + 1) / panels;
    acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-14);
  }
  return acc;
}

}  // namespace

DensePosterior conjugate_gaussian(const Eigen::MatrixXd& g, const Eigen::MatrixXd& y,
                                  std::span<const double> prior_var, double gamma) {
  const Eigen::Index J = g.rows();
  const Eigen::Index N = g.cols();
  if (y.rows() != J || y.cols() != N || static_cast<Eigen::Index>(prior_var.size()) != J)
    throw DimensionMismatch("oracle::conjugate_gaussian: shapes differ");
  const Eigen::Index M = J * N;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(M, J);
  Eigen::VectorXd obs(M);
  for (Eigen::Index n = 0; n < N; ++n)
    for (Eigen::Index j = 0; j < J; ++j) {
      G(n * J + j, j) = g(j, n);
      obs(n * J + j) = y(j, n);
    }
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(J, J);
  for (Eigen::Index j = 0; j < J; ++j) S(j, j) = prior_var[static_cast<std::size_t>(j)];
  const Eigen::MatrixXd SGt = S * G.transpose();
  Eigen::MatrixXd C = G * SGt;
  C.diagonal().array() += gamma * gamma;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
  DensePosterior out;
  out.mean = SGt * lu.solve(obs);
  out.covariance = S - SGt * lu.solve(SGt.transpose());
  return out;
}

Eigen::VectorXd regularized_risk_minimizer(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                           std::span<const double> prior_var, double gamma) {
  const Eigen::Index J = x.rows();
  const Eigen::Index N = x.cols();
  if (y.size() != N || static_cast<Eigen::Index>(prior_var.size()) != J)
    throw DimensionMismatch("oracle::regularized_risk_minimizer: shapes differ");
  const double rn = 1.0 / std::sqrt(static_cast<double>(N));
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N + J, J);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(N + J);
  A.topRows(N) = rn * x.transpose();
  b.head(N) = rn * y;
  for (Eigen::Index k = 0; k < J; ++k)
    A(N + k, k) = gamma * rn / std::sqrt(prior_var[static_cast<std::size_t>(k)]);
  return A.householderQr().solve(b);
}

double expected_risk(std::span<const double> l, std::span<const double> truth,
                     std::span<const double> theta_sq) {
  if (l.size() != truth.size() || theta_sq.size() != truth.size())
    throw DimensionMismatch("oracle::expected_risk: sizes differ");
  double acc = 0.0;
  for (std::size_t j = 0; j < l.size(); ++j)
    acc += 0.5 * theta_sq[j] * l[j] * l[j] - theta_sq[j] * truth[j] * l[j];
  return acc;
}

double empirical_risk(std::span<const double> l, const Eigen::MatrixXd& g,
                      const Eigen::MatrixXd& y) {
  if (static_cast<Eigen::Index>(l.size()) != g.rows() || g.rows() != y.rows() ||
      g.cols() != y.cols())
    throw DimensionMismatch("oracle::empirical_risk: shapes differ");
  double acc = 0.0;
  for (Eigen::Index n = 0; n < g.cols(); ++n) {
    double sample = 0.0;
    for (Eigen::Index j = 0; j < g.rows(); ++j) {
      const double pred = l[static_cast<std::size_t>(j)] * g(j, n);
      sample += 0.5 * pred * pred - y(j, n) * pred;
    }
    acc += sample;
  }
  return acc / static_cast<double>(g.cols());
}

double overlap_quadrature(std::size_t j, std::size_t k) {
  const double w = (static_cast<double>(j) - 0.5) * kPi;
  const double kk = static_cast<double>(k) * kPi;
  auto f = [&](double z) { return 2.0 * std::cos(w * z) * std::sin(kk * z); };
  return integrate01(f, static_cast<double>(j + k));
}

double forward_entry_quadrature(double a_rate, std::size_t j, std::size_t k) {
  const double w = (static_cast<double>(j) - 0.5) * kPi;
  const double kk = static_cast<double>(k) * kPi;
  auto f = [&](double z) {
    const double a = std::exp(a_rate * z);
    // -(a h')' = -a' h' - a h'' for h = sqrt2 sin(k pi z)
    const double h1 = std::sqrt(2.0) * kk * std::cos(kk * z);
    const double h2 = -std::sqrt(2.0) * kk * kk * std::sin(kk * z);
    return std::sqrt(2.0) * std::cos(w * z) * (-a_rate * a * h1 - a * h2);
  };
  return integrate01(f, static_cast<double>(j + k));
}

double stiffness_entry_quadrature(double a_rate, std::size_t kp, std::size_t k) {
  const double a1 = static_cast<double>(kp) * kPi;
  const double a2 = static_cast<double>(k) * kPi;
  auto f = [&](double z) {
    return std::exp(a_rate * z) * 2.0 * a1 * std::cos(a1 * z) * a2 * std::cos(a2 * z);
  };
  return integrate01(f, static_cast<double>(kp + k));
}

}  // namespace oplearn::oracle
