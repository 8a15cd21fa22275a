#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <oplearn/oplearn.h>

#include <cstring>
#include <string>

#include "doctest.h"

TEST_CASE("version strings") {
  CHECK(std::string(opl_version()) == "0.1.0");
  CHECK(std::string(opl_schema_version()) == "oplearn-schema/1");
  CHECK(std::string(opl_status_string(OPL_CONFIG_ERROR)).size() > 0);
}

TEST_CASE("rates through the C interface") {
  double s = 0;
  REQUIRE(opl_truth_s_star("A", &s) == OPL_OK);
  CHECK(s == -2.5);
  opl_rate r{};
  REQUIRE(opl_upper_rate(4.5, 4.5, -2.0, -2.5, &r) == OPL_OK);
  CHECK(r.exponent == doctest::Approx(0.8));
  CHECK(r.branch == OPL_BRANCH_INTERIOR);
  CHECK(opl_upper_rate(1.0, 4.5, -2.0, -2.5, &r) == OPL_INVALID_ARGUMENT);
  CHECK(std::strlen(opl_last_error()) > 0);
  CHECK(opl_truth_s_star("sideways", &s) == OPL_INVALID_ARGUMENT);
  size_t J = 0;
  REQUIRE(opl_j_n(4.5, -2.0, 32.0, &J) == OPL_OK);
  CHECK(J == 2);
  CHECK(opl_upper_rate(4.5, 4.5, -2.0, -2.5, nullptr) == OPL_INVALID_ARGUMENT);
}

TEST_CASE("configuration errors report the line") {
  opl_experiment_set* set = nullptr;
  CHECK(opl_experiments_parse("[a]\ntruth = A\nz = zero\n", &set) == OPL_CONFIG_ERROR);
  CHECK(set == nullptr);
  CHECK(opl_last_error_line() == 3);
  CHECK(std::string(opl_last_error()).find("'z'") != std::string::npos);
  CHECK(opl_experiments_load("/nonexistent/file.cfg", &set) != OPL_OK);
}

TEST_CASE("running an experiment") {
  opl_experiment_set* set = nullptr;
  REQUIRE(opl_experiments_parse("[tiny]\ntruth = identity\nn_grid = 2^4..2^8\n"
                                "replications = 10\ntruncation = fixed(128)\n",
                                &set) == OPL_OK);
  REQUIRE(opl_experiments_count(set) == 1);
  CHECK(std::string(opl_experiments_name(set, 0)) == "tiny");
  CHECK(opl_experiments_override(set, "seed", "99") == OPL_OK);
  CHECK(opl_experiments_override(set, "replications", "1") == OPL_CONFIG_ERROR);
  opl_report* rep = nullptr;
  REQUIRE(opl_run_experiment(set, 0, 2, &rep) == OPL_OK);
  CHECK(opl_report_point_count(rep) == 5);
  opl_rate_point pt{};
  REQUIRE(opl_report_point(rep, 0, &pt) == OPL_OK);
  CHECK(pt.N == 16);
  CHECK(pt.reps == 10);
  CHECK(opl_report_point(rep, 5, &pt) == OPL_INVALID_ARGUMENT);
  opl_fit_summary fit{};
  REQUIRE(opl_report_fit(rep, &fit) == OPL_OK);
  CHECK(fit.fitted_exponent > 0.0);
  CHECK(std::string(opl_report_json(rep)).find("\"seed\": 99") != std::string::npos);
  CHECK(std::string(opl_report_csv(rep)).rfind("# schema=", 0) == 0);
  opl_report_free(rep);
  CHECK(opl_run_experiment(set, 3, 1, &rep) == OPL_INVALID_ARGUMENT);
  opl_experiments_free(set);
}

TEST_CASE("validation suites through the C interface") {
  REQUIRE(opl_validation_suite_count() == 4);
  CHECK(std::string(opl_validation_suite_name(0)) == "oracle");
  opl_validation* v = nullptr;
  CHECK(opl_validate("nonsense", 1, 0, &v) == OPL_INVALID_ARGUMENT);
  REQUIRE(opl_validate("parseval", 1, 0, &v) == OPL_OK);
  CHECK(opl_validation_passed(v) == 1);
  opl_check c{};
  REQUIRE(opl_validation_check(v, 0, &c) == OPL_OK);
  CHECK(std::strlen(c.name) > 0);
  opl_validation_free(v);
}

TEST_CASE("covariance decay and slope") {
  const size_t j[] = {256, 1024, 4096};
  double values[3], last[3];
  REQUIRE(opl_covdecay(1.5, j, 3, size_t{1} << 18, values, last) == OPL_OK);
  double slope = 0, se = 0;
  const double x[] = {256, 1024, 4096};
  REQUIRE(opl_loglog_slope(x, values, 3, &slope, &se) == OPL_OK);
  CHECK(slope == doctest::Approx(-3.0).epsilon(0.05));
}
