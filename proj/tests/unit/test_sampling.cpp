#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oplearn/posterior.hpp"
#include "oplearn/rng.hpp"
#include "oplearn/sampling.hpp"

using namespace oplearn;

TEST_SUITE("sampling") {
  TEST_CASE("streams are reproducible") {
    Rng a = make_rng(7, 3), b = make_rng(7, 3);
    for (int i = 0; i < 1000; ++i) CHECK(a.normal() == b.normal());
    Rng c = make_rng(7, {1, 2, 3}), d = make_rng(7, {1, 2, 3});
    for (int i = 0; i < 100; ++i) CHECK(c.engine()() == d.engine()());
  }

  TEST_CASE("distinct streams are uncorrelated") {
    Rng a = make_rng(11, 0), b = make_rng(11, 1);
    const int n = 1000000;
    double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < n; ++i) {
      const double x = a.normal(), y = b.normal();
      sxy += x * y; sx += x; sy += y; sxx += x * x; syy += y * y;
    }
    const double cov = sxy / n - (sx / n) * (sy / n);
    const double r = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
    CHECK(std::abs(r) < 0.004);
  }

  TEST_CASE("gaussian design variance") {
    Rng rng = make_rng(5, 0);
    const SpectralSequence spec(std::vector<double>{4.0, 1.0});
    const auto x = draw_design(spec, 100000, DesignLaw::gaussian, rng);
    const auto row = x.coeffs.row(0);
    const double mean = row.mean();
    const double var = (row.array() - mean).square().sum() / (row.size() - 1);
    CHECK(std::abs(var - 4.0) < 0.06);
  }

  TEST_CASE("rademacher design support") {
    Rng rng = make_rng(5, 1);
    const SpectralSequence ones(std::vector<double>(6, 1.0));
    const auto x = draw_design(ones, 500, DesignLaw::rademacher, rng);
    for (Eigen::Index i = 0; i < x.coeffs.size(); ++i)
      CHECK(std::abs(x.coeffs.data()[i]) == 1.0);
  }

  TEST_CASE("uniform design has the requested variance") {
    Rng rng = make_rng(5, 2);
    const SpectralSequence spec(std::vector<double>{9.0});
    const auto x = draw_design(spec, 200000, DesignLaw::uniform, rng);
    CHECK(x.coeffs.row(0).array().square().mean() == doctest::Approx(9.0).epsilon(0.02));
  }

  TEST_CASE("projection by identity is a no-op") {
    Rng rng = make_rng(1, 0);
    const auto x = draw_design(SpectralSequence(std::vector<double>{1, 2, 3}), 10,
                               DesignLaw::gaussian, rng);
    const auto g = project_design(x, Eigen::MatrixXd::Identity(3, 3));
    CHECK((g.coeffs - x.coeffs).norm() == 0.0);
  }

  TEST_CASE("projected single mode keeps unit energy") {
    const std::size_t J = 4096;
    DesignMatrix x;
    x.coeffs = Eigen::MatrixXd::Zero(J, 1);
    x.coeffs(0, 0) = 1.0;
    const auto g = project_design(x, volterra_sine_overlap_matrix(J, J));
    for (std::size_t j = 1; j <= 5; ++j)
      CHECK(g.coeffs(j - 1, 0) == doctest::Approx(volterra_sine_overlap(j, 1)));
    CHECK(g.coeffs.col(0).squaredNorm() == doctest::Approx(1.0).epsilon(1e-3));
  }

  TEST_CASE("projected variance matches the cross-basis series") {
    const std::size_t J = 256, N = 100000;
    Rng rng = make_rng(9, 0);
    const auto lambda = matern_spectrum(15.0, 1.5, J);
    const auto x = draw_design(lambda, N, DesignLaw::gaussian, rng);
    const auto g = project_design(x, volterra_sine_overlap_matrix(8, J));
    double chi2 = 0.0;
    for (std::size_t j = 1; j <= 8; ++j) {
      const double target = cross_basis_variance(lambda, j, J).value;
      const double var = g.coeffs.row(j - 1).array().square().mean();
      const double z = (var - target) / (target * std::sqrt(2.0 / N));
      CHECK(std::abs(z) < 4.0);
      chi2 += z * z;
    }
    CHECK(chi2 < 26.12);  // 99.9% point of chi-square with 8 degrees of freedom
  }

  TEST_CASE("noise-free diagonal data") {
    Rng rng = make_rng(2, 0), noise = make_rng(2, 1);
    const auto truth = truth_eigenvalues(TruthKind::neg_laplacian, 5);
    const auto x = draw_design(SpectralSequence(std::vector<double>(5, 1.0)), 20,
                               DesignLaw::gaussian, rng);
    const auto ds = gen_diagonal_dataset(truth, x, 0.0, noise);
    for (int j = 0; j < 5; ++j)
      for (int n = 0; n < 20; ++n) CHECK(ds.y(j, n) == ds.g(j, n) * truth.eigenvalues[j]);

    const auto id = truth_eigenvalues(TruthKind::identity, 5);
    const auto ds2 = gen_diagonal_dataset(id, x, 0.0, noise);
    for (int j = 0; j < 5; ++j) CHECK(ds2.suff_yg[j] == doctest::Approx(ds2.suff_gg[j]));
  }

  TEST_CASE("matrix data with a diagonal truth matches the diagonal generator") {
    Rng rng = make_rng(3, 0);
    const std::size_t J = 6;
    const auto truth = truth_eigenvalues(TruthKind::neg_laplacian, J);
    const auto x = draw_design(SpectralSequence(std::vector<double>(J, 1.0)), 12,
                               DesignLaw::gaussian, rng);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(J, J);
    for (std::size_t j = 0; j < J; ++j) L(j, j) = truth.eigenvalues[j];
    Rng n1 = make_rng(3, 1), n2 = make_rng(3, 1);
    const auto a = gen_diagonal_dataset(truth, x, 0.1, n1);
    const auto b = gen_matrix_dataset(L, x, Eigen::MatrixXd::Identity(J, J), 0.1, n2);
    CHECK((a.y - b.y).norm() == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("noise-free matrix rows are recoverable") {
    Rng rng = make_rng(4, 0), noise = make_rng(4, 1);
    const std::size_t J = 5;
    const Eigen::MatrixXd L = Eigen::MatrixXd::Random(J, J);
    const auto x = draw_design(SpectralSequence(std::vector<double>(J, 1.0)), 40,
                               DesignLaw::gaussian, rng);
    const auto ds = gen_matrix_dataset(L, x, Eigen::MatrixXd::Identity(J, J), 0.0, noise);
    REQUIRE(ds.gram.has_value());
    for (std::size_t j = 0; j < J; ++j) {
      const Eigen::VectorXd row = ds.gram->ldlt().solve(ds.rhs->row(j).transpose());
      CHECK((row - L.row(j).transpose()).norm() < 1e-10);
    }
  }

  TEST_CASE("sufficient statistics agree with raw sums in distribution") {
    // Means of <gg> and <yg> over many replications: raw sampler vs direct law.
    const std::size_t J = 4, N = 16, reps = 20000;
    const auto truth = truth_eigenvalues(TruthKind::identity, J);
    const SpectralSequence theta(std::vector<double>{1.0, 0.5, 0.25, 0.125});
    std::vector<double> raw_gg(J), raw_yg(J), suf_gg(J), suf_yg(J);
    for (std::size_t r = 0; r < reps; ++r) {
      Rng d = make_rng(17, {r, 1}), n = make_rng(17, {r, 2});
      const auto x = draw_design(theta, N, DesignLaw::gaussian, d);
      const auto ds = gen_diagonal_dataset(truth, x, 0.5, n);
      Rng d2 = make_rng(18, {r, 1}), n2 = make_rng(18, {r, 2});
      const auto ss = draw_sufficient_statistics(truth, theta, N, 0.5, d2, n2);
      for (std::size_t j = 0; j < J; ++j) {
        raw_gg[j] += ds.suff_gg[j] / reps;
        raw_yg[j] += ds.suff_yg[j] / reps;
        suf_gg[j] += ss.suff_gg[j] / reps;
        suf_yg[j] += ss.suff_yg[j] / reps;
      }
    }
    for (std::size_t j = 0; j < J; ++j) {
      const double t = theta[j];
      const double se = t * std::sqrt(2.0 / N / reps);
      CHECK(std::abs(raw_gg[j] - suf_gg[j]) < 5 * se);
      CHECK(std::abs(raw_yg[j] - suf_yg[j]) < 5 * std::sqrt(se * se + t * 0.25 / N / reps));
      CHECK(std::abs(suf_gg[j] - t) < 5 * se);
    }
  }
}
