#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oplearn/errors.hpp"
#include "oplearn/spectra.hpp"
#include "oplearn/theory.hpp"

using namespace oplearn;

namespace {
double table_exponent(TruthKind truth, double alpha_prime, double z) {
  const double s = truth_s_star(truth);
  return upper_rate_exponent(4.5, alpha_prime, s + 0.5 + z, s).exponent;
}
}  // namespace

TEST_SUITE("theory") {
  TEST_CASE("rho_N branches") {
    CHECK(rho_N(4.5, 4.5, -2.0, 1024.0) == doctest::Approx(0.00390625).epsilon(1e-14));
    CHECK(rho_N(4.5, 5.0, -2.0, 10.0) == doctest::Approx(0.1 * std::log(10.0)).epsilon(1e-12));
    CHECK(rho_N(4.5, 6.0, -2.0, 1000.0) == doctest::Approx(0.001).epsilon(1e-14));
    CHECK(rho_branch(4.5, 4.5) == RhoBranch::interior);
    CHECK(rho_branch(4.5, 5.0) == RhoBranch::boundary);
    CHECK(rho_branch(4.5, 5.25) == RhoBranch::capped);
  }

  TEST_CASE("J_N") {
    CHECK(J_N(4.5, -2.0, 32.0) == 2);
    CHECK(J_N(4.5, -2.0, 100.0) == 2);
    CHECK(J_N(4.5, -2.0, 1.0) == 1);
    CHECK(J_N(2.0, 0.0, 1.0) == 1);
    CHECK_THROWS_AS(J_N(1.0, -1.0, 10.0), InvalidArgument);
  }

  TEST_CASE("upper rate examples") {
    CHECK(upper_rate_exponent(4.5, 4.5, -2.0, -2.5).exponent == doctest::Approx(0.8));
    const auto smooth = upper_rate_exponent(4.5, 4.5, 2.75, 1.5);
    CHECK(smooth.exponent == doctest::Approx(6.0 / 7.25));
    CHECK(smooth.dominant_term == DominantTerm::bias);
    CHECK(upper_rate_exponent(4.5, 4.0, -2.0, -2.5).exponent == doctest::Approx(0.6));
    CHECK(upper_rate_exponent(4.5, 5.25, -2.0, -2.5).exponent == doctest::Approx(1.0));
  }

  TEST_CASE("first table of exponents") {
    const TruthKind truths[] = {TruthKind::neg_laplacian, TruthKind::identity,
                                TruthKind::inv_neg_laplacian};
    const double expected[3][3] = {
        {0.714, 0.800, 0.615}, {0.867, 0.889, 0.762}, {0.913, 0.923, 0.828}};
    const double zs[] = {-0.75, 0.0, 0.75};
    for (int t = 0; t < 3; ++t)
      for (int k = 0; k < 3; ++k)
        CHECK(std::round(table_exponent(truths[t], 4.5, zs[k]) * 1000) / 1000 ==
              doctest::Approx(expected[t][k]).epsilon(1e-12));
  }

  TEST_CASE("second table of exponents") {
    const TruthKind truths[] = {TruthKind::neg_laplacian, TruthKind::identity,
                                TruthKind::inv_neg_laplacian};
    const double zs[] = {-0.75, 0.0, 0.75};
    // rows: truth; columns: z; first block alpha' = 4, second alpha' = 5.25
    const double ap4[3][3] = {{0.429, 0.600, 0.462}, {0.733, 0.778, 0.667}, {0.826, 0.846, 0.759}};
    const double ap525[3][3] = {{1.000, 1.000, 0.846}, {1.000, 1.000, 0.905}, {1.000, 1.000, 0.931}};
    for (int t = 0; t < 3; ++t)
      for (int k = 0; k < 3; ++k) {
        CHECK(std::round(table_exponent(truths[t], 4.0, zs[k]) * 1000) / 1000 ==
              doctest::Approx(ap4[t][k]).epsilon(1e-12));
        CHECK(std::round(table_exponent(truths[t], 5.25, zs[k]) * 1000) / 1000 ==
              doctest::Approx(ap525[t][k]).epsilon(1e-12));
      }
  }

  TEST_CASE("boundary branch carries a log factor") {
    const auto r = upper_rate_exponent(4.5, 5.0, -2.0, -2.5);
    CHECK(r.log_factor == LogFactor::log_N);
    CHECK(r.exponent == doctest::Approx(1.0));
  }

  TEST_CASE("colored noise") {
    const auto white = upper_rate_exponent(4.5, 4.5, -2.0, -2.5);
    const auto zero = colored_rate_exponent(4.5, 4.5, -2.0, -2.5, 0.0);
    CHECK(zero.exponent == white.exponent);
    // alpha becomes 3.5 while alpha' stays 4.5, so the variance term is capped
    const auto c = colored_rate_exponent(4.5, 4.5, -2.0, -2.5, 1.0);
    CHECK(c.variance_exponent == doctest::Approx(1.0));
    CHECK(c.bias_exponent == doctest::Approx(4.0 / 3.0));
    CHECK(c.exponent == doctest::Approx(1.0));
  }

  TEST_CASE("excess risk exponents") {
    const auto a = excess_risk_exponents(4.5, -2.0, -2.5);
    CHECK(std::min(a.variance_exponent, a.bias_exponent) == doctest::Approx(0.8));
    const auto b = excess_risk_exponents(4.5, 2.75, 1.5);
    CHECK(std::min(b.variance_exponent, b.bias_exponent) == doctest::Approx(6.0 / 7.25));
  }

  TEST_CASE("gap exponent") {
    CHECK(gap_rate_exponent(4.5, -3.5).exponent == doctest::Approx(0.5));
    CHECK(gap_rate_exponent(4.5, -2.0).exponent == doctest::Approx(0.5));
    CHECK(gap_rate_exponent(4.5, -3.75).exponent == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("contraction rate") {
    // r = 0.8 for the matching unbounded configuration
    CHECK(contraction_rate(4.5, 4.5, -2.0, -2.5, std::pow(2.0, 20)) ==
          doctest::Approx(0.00390625).epsilon(1e-12));
  }

  TEST_CASE("rate monotonicity on a grid") {
    for (double ap = 1.0; ap <= 8.0; ap += 0.25) {
      double prev = 1e9;
      for (double alpha = 1.0; alpha <= 8.0; alpha += 0.05) {
        const double p = -2.0, s = -2.5;
        if (!smoothness_range_holds(alpha, ap, p, s)) continue;
        const double e = upper_rate_exponent(alpha, ap, p, s).exponent;
        CHECK(e <= prev + 1e-12);
        prev = e;
      }
    }
    for (double alpha = 3.0; alpha <= 8.0; alpha += 0.5) {
      double prev = -1e9;
      for (double ap = 0.5; ap <= 9.0; ap += 0.05) {
        if (!smoothness_range_holds(alpha, ap, -2.0, -2.5)) continue;
        const double e = upper_rate_exponent(alpha, ap, -2.0, -2.5).exponent;
        CHECK(e >= prev - 1e-12);
        CHECK(e <= 1.0 + 1e-12);
        prev = e;
      }
    }
  }

  TEST_CASE("inverse problems are harder than forward ones") {
    for (double z = -1.0; z <= 1.5; z += 0.05) {
      const double inv = upper_rate_exponent(4.5, 4.5, -2.0 + z, -2.5).exponent;
      const double fwd = upper_rate_exponent(2.5, 2.5, 2.0 + z, 1.5).exponent;
      CHECK(inv < fwd);
    }
  }

  TEST_CASE("invalid regimes are rejected") {
    CHECK_THROWS_AS(upper_rate_exponent(1.0, 4.5, -2.0, -2.5), InvalidArgument);
    CHECK_THROWS_AS(rho_N(1.0, 1.0, -1.0, 10.0), InvalidArgument);
  }
}
