// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <complex>
#include <numbers>

#include "oplearn/errors.hpp"
#include "oplearn/posterior.hpp"

namespace oplearn {

namespace {

constexpr double kPi = std::numbers::pi;

// int_0^1 exp(c z) exp(i w z) dz
std::complex<double> exp_trig_integral(double c, double w) {
  const std::complex<double> q(c, w);
  if (std::abs(q) < 1e-14) return {1.0, 0.0};
  return (std::exp(q) - 1.0) / q;
}

double exp_cos(double c, double w) { return exp_trig_integral(c, w).real(); }
double exp_sin(double c, double w) { return exp_trig_integral(c, w).imag(); }

// <sqrt2 cos((j-1/2) pi z), A_a sqrt2 sin(k pi z)>
double forward_entry(double c, std::size_t j, std::size_t k) {
  const double omega = (static_cast<double>(j) - 0.5) * kPi;
  const double kp = static_cast<double>(k) * kPi;
  return kp * kp * (exp_sin(c, kp + omega) + exp_sin(c, kp - omega)) -
         c * kp * (exp_cos(c, kp + omega) + exp_cos(c, kp - omega));
}

// <sqrt2 sin(k' pi z), A_a sqrt2 sin(k pi z)>
double stiffness_entry(double c, std::size_t kr, std::size_t k) {
  const double kp = static_cast<double>(k) * kPi;
  const double krp = static_cast<double>(kr) * kPi;
  return kp * kp * (exp_cos(c, kp - krp) - exp_cos(c, kp + krp)) -
         c * kp * (exp_sin(c, krp + kp) + exp_sin(c, krp - kp));
}

}  // namespace

Eigen::MatrixXd volterra_sine_overlap_matrix(std::size_t J_out, std::size_t J_in) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(J_out), static_cast<Eigen::Index>(J_in));
  for (std::size_t j = 1; j <= J_out; ++j)
    for (std::size_t k = 1; k <= J_in; ++k)
      m(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(k - 1)) =
          volterra_sine_overlap(j, k);
  return m;
}

Eigen::MatrixXd sine_stiffness_matrix(double a_rate, std::size_t J) {
  if (J == 0) throw InvalidArgument("sine_stiffness_matrix: J must be at least 1");
  const auto n = static_cast<Eigen::Index>(J);
  Eigen::MatrixXd s(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index k = 0; k < n; ++k)
      s(r, k) = stiffness_entry(a_rate, static_cast<std::size_t>(r + 1),
                                static_cast<std::size_t>(k + 1));
  // Symmetric in exact arithmetic; remove rounding asymmetry.
  return 0.5 * (s + s.transpose());
}

Eigen::MatrixXd galerkin_truth_matrix(EllipticKind kind, double a_rate, std::size_t J,
                                      std::size_t galerkin_ratio) {
  if (J == 0) throw InvalidArgument("galerkin_truth_matrix: J must be at least 1");
  const auto n = static_cast<Eigen::Index>(J);
  switch (kind) {
    case EllipticKind::identity: return volterra_sine_overlap_matrix(J, J);
    case EllipticKind::forward: {
      Eigen::MatrixXd l(n, n);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
          l(j, k) = forward_entry(a_rate, static_cast<std::size_t>(j + 1),
                                  static_cast<std::size_t>(k + 1));
      return l;
    }
    case EllipticKind::inverse: {
      if (galerkin_ratio == 0) throw InvalidArgument("galerkin_truth_matrix: ratio must be >= 1");
      const std::size_t big = galerkin_ratio * J;
      const Eigen::MatrixXd stiffness = sine_stiffness_matrix(a_rate, big);
      Eigen::LLT<Eigen::MatrixXd> llt(stiffness);
      if (llt.info() != Eigen::Success)
        throw NumericalError("galerkin_truth_matrix: stiffness matrix not positive definite",
                             INFINITY);
      const auto nb = static_cast<Eigen::Index>(big);
      const Eigen::MatrixXd cols = llt.solve(Eigen::MatrixXd::Identity(nb, n));
      return volterra_sine_overlap_matrix(J, big) * cols;
    }
  }
  throw InvalidArgument("galerkin_truth_matrix: unknown kind");
}

EllipticKind elliptic_kind_for(TruthKind truth) {
  switch (truth) {
    case TruthKind::neg_laplacian: return EllipticKind::forward;
    case TruthKind::identity: return EllipticKind::identity;
    case TruthKind::inv_neg_laplacian: return EllipticKind::inverse;
    case TruthKind::custom: break;
  }
  throw InvalidArgument("no elliptic operator for a custom truth");
}

}  // namespace oplearn
