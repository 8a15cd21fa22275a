#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "oplearn/errors.hpp"
#include "oplearn/harness.hpp"

using namespace oplearn;

namespace {
ExperimentConfig small_config(TruthKind truth = TruthKind::identity) {
  ExperimentConfig c;
  c.name = "small";
  c.truth = truth;
  c.n_grid = pow2_grid(4, 9);
  c.replications = 40;
  c.truncation = TruncationPolicy::fixed(512);
  return c;
}
}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("fit of an exact power law") {
    const auto N = pow2_grid(4, 12);
    std::vector<double> e;
    for (auto n : N) e.push_back(7.0 * std::pow(double(n), -0.8));
    const auto f = fit_rate(N, e);
    CHECK(f.exponent == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(f.stderr_ < 1e-12);
    CHECK(std::exp(f.intercept) == doctest::Approx(7.0).epsilon(1e-10));
  }

  TEST_CASE("a log factor biases the fitted slope below one") {
    const auto N = pow2_grid(10, 20);
    std::vector<double> e;
    for (auto n : N) e.push_back(std::log(double(n)) / double(n));
    const double r = fit_rate(N, e).exponent;
    CHECK(r > 0.90);
    CHECK(r < 1.00);
  }

  TEST_CASE("two-point fits are flagged") {
    const std::vector<std::size_t> N{16, 64};
    const std::vector<double> e{1.0, 0.25};
    const auto f = fit_rate(N, e);
    CHECK(f.degenerate);
    CHECK(f.stderr_ == 0.0);
    CHECK(f.exponent == doctest::Approx(1.0));
    CHECK_THROWS_AS(fit_rate(N, std::vector<double>{1.0, 0.0}), InvalidArgument);
  }

  TEST_CASE("truncation levels") {
    CHECK(truncation_level(TruncationPolicy::fixed(4096), 4.5, -2.0, 16) == 4096);
    CHECK(truncation_level(TruncationPolicy::fixed(4096), 4.5, -2.0, 1u << 20) == 4096);
    const double c = 16384.0 / 18.0;  // J at N = 2^21 is floor(2^4.2) = 18
    const auto J = truncation_level(TruncationPolicy::n_dependent(c), 4.5, -2.0, 1u << 21);
    CHECK(std::abs(std::log2(double(J)) - 14.0) < 0.05);
    CHECK(truncation_level(TruncationPolicy::n_dependent(1e-3), 4.5, -2.0, 16) == kMinTruncation);
  }

  TEST_CASE("experiment file parsing") {
    const auto cfgs = parse_experiment_text(
        "# defaults\nreplications = 12\nn_grid = 2^4..2^7\n\n[one]\ntruth = A\nz = -0.75\n"
        "[two]\ntruth = inv_neg_laplacian\nn_grid = 16, 32, 64, 128, 256\n"
        "truncation = n_dependent(3.5) ; comment\nsampler = full\n");
    REQUIRE(cfgs.size() == 2);
    CHECK(cfgs[0].name == "one");
    CHECK(cfgs[0].replications == 12);
    CHECK(cfgs[0].n_grid == std::vector<std::size_t>{16, 32, 64, 128});
    CHECK(cfgs[0].model.z == -0.75);
    CHECK(cfgs[1].n_grid.size() == 5);
    CHECK(cfgs[1].truncation.kind == TruncationPolicy::Kind::n_dependent);
    CHECK(cfgs[1].truncation.factor == 3.5);
    CHECK(cfgs[1].sampler == SamplerKind::full);
  }

  TEST_CASE("parse errors name the key and the line") {
    try {
      parse_experiment_text("[a]\ntruth = A\nalpha = four\n");
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 3);
      CHECK(e.key() == "alpha");
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
      CHECK(std::string(e.what()).find("alpha") != std::string::npos);
    }
    try {
      parse_experiment_text("[a]\n\nbogus = 1\n");
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 3);
      CHECK(e.key() == "bogus");
    }
    CHECK_THROWS_AS(parse_experiment_text("[a]\n[a]\n"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_text("[a]\ntruncation = sometimes(3)\n"), ConfigError);
  }

  TEST_CASE("inconsistent configurations are rejected") {
    auto c = small_config();
    c.n_grid = {16, 32, 64};
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = small_config();
    c.replications = 1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = small_config();
    c.gamma_override = 0.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = small_config();
    c.model.alpha = 0.3;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
  }

  TEST_CASE("identity truth at desk scale") {
    ExperimentConfig c;
    c.truth = TruthKind::identity;
    c.n_grid = pow2_grid(4, 12);
    c.replications = 100;
    c.truncation = TruncationPolicy::fixed(4096);
    const auto r = run_experiment(c, 1);
    CHECK(std::abs(r.fit.exponent - 0.889) <= 0.1);
    CHECK(r.theory.exponent == doctest::Approx(8.0 / 9.0));
    CHECK(r.points.size() == 9);
  }

  TEST_CASE("results do not depend on the worker count") {
    auto c = small_config(TruthKind::neg_laplacian);
    const auto a = report_csv(run_experiment(c, 1));
    const auto b = report_csv(run_experiment(c, 3));
    CHECK(a == b);
    c.estimator = EstimatorKind::matrix;
    c.truncation = TruncationPolicy::fixed(16);
    c.replications = 4;
    CHECK(report_csv(run_experiment(c, 1)) == report_csv(run_experiment(c, 2)));
  }

  TEST_CASE("the seed changes the numbers") {
    auto c = small_config();
    const auto a = report_csv(run_experiment(c, 1));
    c.seed += 1;
    CHECK(a != report_csv(run_experiment(c, 1)));
  }

  TEST_CASE("closed-form conditional error agrees with sampled test error") {
    auto c = small_config(TruthKind::neg_laplacian);
    c.replications = 200;
    c.sampler = SamplerKind::full;
    const auto sampled = run_experiment(c, 1);
    c.error = ErrorKind::conditional_closed_form;
    const auto closed = run_experiment(c, 1);
    for (std::size_t i = 0; i < sampled.points.size(); ++i) {
      const auto& a = sampled.points[i];
      const auto& b = closed.points[i];
      CHECK(std::abs(a.mean_error - b.mean_error) <=
            3.0 * std::hypot(a.stderr_, b.stderr_));
    }
  }

  TEST_CASE("full and sufficient samplers agree in law") {
    auto c = small_config(TruthKind::inv_neg_laplacian);
    c.replications = 300;
    c.sampler = SamplerKind::full;
    const auto full = run_experiment(c, 1);
    c.sampler = SamplerKind::sufficient;
    const auto suff = run_experiment(c, 1);
    for (std::size_t i = 0; i < full.points.size(); ++i) {
      const auto& a = full.points[i];
      const auto& b = suff.points[i];
      CHECK(std::abs(a.mean_error - b.mean_error) <= 4.0 * std::hypot(a.stderr_, b.stderr_));
    }
    CHECK(std::abs(full.fit.exponent - suff.fit.exponent) < 0.1);
  }

  TEST_CASE("reports carry the schema version") {
    const auto r = run_experiment(small_config(), 1);
    const auto csv = report_csv(r);
    CHECK(csv.rfind("# schema=oplearn-schema/1", 0) == 0);
    CHECK(report_json(r).find("\"schema\": \"oplearn-schema/1\"") != std::string::npos);
  }

  TEST_CASE("the fit window drops the smallest sample sizes") {
    auto c = small_config();
    c.n_grid = pow2_grid(4, 11);  // 8 points, 2 dropped
    const auto r = run_experiment(c, 1);
    CHECK(r.fit_first_index == 2);
    CHECK(r.fit.points == 6);
    c.fit_drop_fraction = 0.0;
    CHECK(run_experiment(c, 1).fit.points == 8);
  }

  TEST_CASE("excess risk and gap experiments run") {
    auto c = small_config(TruthKind::neg_laplacian);
    c.error = ErrorKind::excess_risk;
    CHECK(run_experiment(c, 1).fit.exponent > 0.0);
    c.error = ErrorKind::gen_gap;
    c.gamma_override = 0.1;
    c.truncation = TruncationPolicy::n_dependent(16384.0 / 18.0);
    CHECK(run_experiment(c, 1).fit.exponent > 0.0);
  }
}
