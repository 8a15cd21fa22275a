#include <cmath>
#include <vector>

#include "doctest.h"
#include "oplearn/errors.hpp"
#include "oplearn/oracles.hpp"
#include "oplearn/posterior.hpp"

using namespace oplearn;

namespace {
Dataset one_mode(std::vector<double> g, std::vector<double> y) {
  Dataset ds;
  ds.modes = 1;
  ds.samples = g.size();
  ds.g = Eigen::Map<Eigen::MatrixXd>(g.data(), 1, g.size());
  ds.y = Eigen::Map<Eigen::MatrixXd>(y.data(), 1, y.size());
  const auto ss = compute_sufficient_statistics(ds.g, ds.y);
  ds.suff_gg = ss.gg;
  ds.suff_yg = ss.yg;
  return ds;
}
}  // namespace

TEST_SUITE("posterior") {
  TEST_CASE("hand-worked conjugate updates") {
    const SpectralSequence prior(std::vector<double>{1.0});
    auto ds = one_mode({1, 1}, {2, 4});
    CHECK(ds.suff_gg[0] == 1.0);
    CHECK(ds.suff_yg[0] == 3.0);
    auto post = diag_posterior(ds, prior, 1.0, 2);
    CHECK(post.mean[0] == doctest::Approx(2.0));
    CHECK(post.variance[0] == doctest::Approx(1.0 / 3.0));

    ds = one_mode({2}, {6});
    post = diag_posterior(ds, prior, 1.0, 1);
    CHECK(post.mean[0] == doctest::Approx(2.4));
    CHECK(post.variance[0] == doctest::Approx(0.2));
  }

  TEST_CASE("hand-worked updates match the dense oracle") {
    auto ds = one_mode({1, 1}, {2, 4});
    const std::vector<double> pv{1.0};
    const auto o = oracle::conjugate_gaussian(ds.g, ds.y, pv, 1.0);
    CHECK(o.mean(0) == doctest::Approx(2.0));
    CHECK(o.covariance(0, 0) == doctest::Approx(1.0 / 3.0));
  }

  TEST_CASE("no information returns the prior") {
    const SpectralSequence prior(std::vector<double>{2.0, 3.0});
    const std::vector<double> zero{0.0, 0.0};
    const auto post = diag_posterior(zero, zero, prior, 0.5, 10);
    CHECK(post.mean[0] == 0.0);
    CHECK(post.variance[1] == 3.0);
  }

  TEST_CASE("positive noise is required") {
    const SpectralSequence prior(std::vector<double>{1.0});
    const std::vector<double> v{1.0};
    CHECK_THROWS_AS(diag_posterior(v, v, prior, 0.0, 1), InvalidArgument);
  }

  TEST_CASE("colored noise") {
    const SpectralSequence prior(std::vector<double>{1.0});
    auto ds = one_mode({1, 1}, {2, 4});
    const auto white = diag_posterior(ds, prior, 1.0, 2);
    const auto unit = diag_posterior_colored(ds, prior, 1.0, SpectralSequence({1.0}), 2);
    CHECK(unit.mean[0] == doctest::Approx(white.mean[0]));
    const auto four = diag_posterior_colored(ds, prior, 1.0, SpectralSequence({4.0}), 2);
    CHECK(four.mean[0] == doctest::Approx(1.0));
    CHECK(four.variance[0] == doctest::Approx(2.0 / 3.0));
    const auto huge = diag_posterior_colored(ds, prior, 1.0, SpectralSequence({1e300}), 2);
    CHECK(huge.mean[0] == doctest::Approx(0.0));
    CHECK(huge.variance[0] == doctest::Approx(1.0));
  }

  TEST_CASE("posterior sampling moments") {
    DiagonalPosterior post{{1.5, -2.0}, {0.25, 4.0}};
    Rng rng = make_rng(3, 0);
    const std::size_t M = 100000;
    const auto draws = sample_posterior(post, M, rng);
    REQUIRE(draws.size() == M);
    for (std::size_t j = 0; j < 2; ++j) {
      double s = 0, ss = 0;
      for (const auto& d : draws) { s += d[j]; ss += d[j] * d[j]; }
      const double mean = s / M, var = ss / M - mean * mean;
      const double sd = std::sqrt(post.variance[j]);
      CHECK(std::abs(mean - post.mean[j]) < 3 * sd / std::sqrt(double(M)));
      CHECK(std::abs(var - post.variance[j]) < 3 * post.variance[j] * std::sqrt(2.0 / M));
    }
  }

  TEST_CASE("matrix row solve") {
    // 1x1 reduces to the diagonal mean
    Eigen::MatrixXd gram(1, 1);
    gram << 2.0;
    Eigen::VectorXd rhs(1);
    rhs << 3.0;
    const std::vector<double> pv{0.7};
    const auto r = matrix_posterior_row(gram, rhs, pv, 0.4, 5);
    const auto d = diag_posterior(std::vector<double>{2.0}, std::vector<double>{3.0},
                                  SpectralSequence({0.7}), 0.4, 5);
    CHECK(r.row(0) == doctest::Approx(d.mean[0]).epsilon(1e-14));

    // identity gram and prior with gamma^2 / N = 1 halves the right-hand side
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(4, 1.0, 4.0);
    const auto half = matrix_posterior_row(Eigen::MatrixXd::Identity(4, 4), b,
                                           std::vector<double>(4, 1.0), 2.0, 4);
    CHECK((half.row - b / 2).norm() < 1e-14);

    // small noise approaches least squares
    Eigen::MatrixXd G(3, 3);
    G << 4, 1, 0, 1, 3, 1, 0, 1, 2;
    const Eigen::VectorXd c(Eigen::Vector3d(1, -2, 0.5));
    const auto ridge = matrix_posterior_row(G, c, std::vector<double>(3, 1.0), 1e-6, 10);
    CHECK((ridge.row - G.ldlt().solve(c)).norm() < 1e-4);
  }

  TEST_CASE("galerkin operators") {
    const std::size_t J = 8;
    const auto M = volterra_sine_overlap_matrix(J, J);
    const auto id = galerkin_truth_matrix(EllipticKind::identity, -3.0, J);
    CHECK((id - M).norm() < 1e-12);
    const auto fwd = galerkin_truth_matrix(EllipticKind::forward, 0.0, J);
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t k = 0; k < J; ++k) {
        const double kp = (k + 1) * std::numbers::pi;
        CHECK(fwd(j, k) == doctest::Approx(kp * kp * M(j, k)).epsilon(1e-10));
      }
    for (std::size_t j = 1; j <= 3; ++j)
      for (std::size_t k = 1; k <= 3; ++k)
        CHECK(galerkin_truth_matrix(EllipticKind::forward, -3.0, J)(j - 1, k - 1) ==
              doctest::Approx(oracle::forward_entry_quadrature(-3.0, j, k)).epsilon(1e-9));
  }
}
