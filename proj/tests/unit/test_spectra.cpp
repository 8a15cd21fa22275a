#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oplearn/errors.hpp"
#include "oplearn/spectra.hpp"

using namespace oplearn;
using std::numbers::pi;

TEST_SUITE("spectra") {
  TEST_CASE("matern spectrum closed form") {
    const auto s = matern_spectrum(15.0, 4.5, 10000);
    // long double evaluation of tau^(2e-1) ((j pi)^2 + tau^2)^(-e)
    const long double ref = std::pow(15.0L, 8.0L) *
                            std::pow(std::pow(std::numbers::pi_v<long double>, 2) + 225.0L, -4.5L);
    CHECK(s.mode(1) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
    CHECK(s.mode(1) == doctest::Approx(5.50e-2).epsilon(5e-3));

    const double limit = std::pow(15.0, 8.0) * std::pow(pi, -9.0);
    CHECK(s.mode(10000) * std::pow(10000.0, 9.0) == doctest::Approx(limit).epsilon(0.01));

    const auto flat = matern_spectrum(1.0, 0.0, 16);
    for (double v : flat.values()) CHECK(v == 1.0);
  }

  TEST_CASE("matern spectrum rejects bad arguments") {
    CHECK_THROWS_AS(matern_spectrum(0.0, 1.0, 4), InvalidArgument);
    CHECK_THROWS_AS(matern_spectrum(-1.0, 1.0, 4), InvalidArgument);
    CHECK_THROWS_AS(matern_spectrum(1.0, 1.0, 0), InvalidArgument);
  }

  TEST_CASE("spectral sequences reject nonpositive entries") {
    CHECK_THROWS_AS(SpectralSequence(std::vector<double>{1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(SpectralSequence(std::vector<double>{1.0, -2.0}), InvalidArgument);
  }

  TEST_CASE("truth eigenvalues") {
    CHECK(truth_eigenvalues(TruthKind::neg_laplacian, 4).eigenvalues[0] ==
          doctest::Approx(pi * pi));
    CHECK(truth_eigenvalues(TruthKind::identity, 8).eigenvalues[6] == 1.0);
    CHECK(truth_eigenvalues(TruthKind::inv_neg_laplacian, 4).eigenvalues[1] ==
          doctest::Approx(1.0 / (4 * pi * pi)));
    CHECK(truth_s_star(TruthKind::neg_laplacian) == -2.5);
    CHECK(truth_s_star(TruthKind::identity) == -0.5);
    CHECK(truth_s_star(TruthKind::inv_neg_laplacian) == 1.5);
  }

  TEST_CASE("diagonal prior variances") {
    CHECK(prior_variances_diagonal(0.0, 1.0, 5).mode(3) == doctest::Approx(1.0));
    const double ref = (pi * pi + 1) * (pi * pi + 1);
    CHECK(prior_variances_diagonal(-2.0, 1.0, 5).mode(1) == doctest::Approx(ref).epsilon(1e-13));
    CHECK(prior_variances_diagonal(-2.0, 1.0, 5).mode(1) == doctest::Approx(118.14).epsilon(1e-4));
  }

  TEST_CASE("matrix prior variances") {
    CHECK(prior_variances_matrix(TruthKind::neg_laplacian, 0.0, 1, 1) == doctest::Approx(4.0));
    CHECK(prior_variances_matrix(TruthKind::identity, 0.0, 1, 1) == doctest::Approx(1.0));
    CHECK(prior_variances_matrix(TruthKind::inv_neg_laplacian, 0.0, 1, 1) == doctest::Approx(4.0));
  }

  TEST_CASE("cross basis variance") {
    std::vector<double> delta(64, 0.0);
    delta[0] = 1.0;
    CHECK(cross_basis_variance(delta, 1, 64).value ==
          doctest::Approx(64.0 / (9.0 * pi * pi)).epsilon(1e-12));
    std::vector<double> zero(64, 0.0);
    CHECK(cross_basis_variance(zero, 3, 64).value == 0.0);
  }

  TEST_CASE("overlap squares sum to one along a row") {
    double sum = 0.0;
    for (std::size_t k = 1; k <= 200000; ++k) sum += std::pow(volterra_sine_overlap(3, k), 2);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-4));
  }

  TEST_CASE("sobolev norm") {
    CHECK(sobolev_norm(std::vector<double>{1.0, 0.0, 0.0}, 3.0) == doctest::Approx(1.0));
    CHECK(sobolev_norm(std::vector<double>{1, 1, 1, 1, 0, 0}, 0.5) ==
          doctest::Approx(std::sqrt(10.0)));
    CHECK(sobolev_norm(std::vector<double>(5, 0.0), 1.0) == 0.0);
  }

  TEST_CASE("model configuration enforces the smoothness range") {
    for (auto truth : {TruthKind::neg_laplacian, TruthKind::identity, TruthKind::inv_neg_laplacian})
      for (double ap : {4.0, 4.5, 5.25})
        for (double z : {-0.75, 0.0, 0.75})
          CHECK_NOTHROW(ModelConfig::with_prior_shift(truth, 4.5, ap, z));
    ModelConfig::Params bad;
    bad.alpha = 1.0;
    bad.p = -2.0;
    bad.s = -2.5;
    CHECK_THROWS_AS(ModelConfig{bad}, InvalidArgument);
  }
}
