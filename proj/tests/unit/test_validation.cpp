#include "doctest.h"
#include "oplearn/errors.hpp"
#include "oplearn/validation.hpp"

using namespace oplearn;

TEST_SUITE("validation") {
  TEST_CASE("every suite passes on a clean build") {
    for (const auto& name : validation_suites()) {
      const auto report = run_validation_suite(name);
      for (const auto& c : report.checks) {
        INFO(name << "/" << c.name << " observed " << c.observed << " " << c.detail);
        CHECK(c.passed);
      }
    }
  }

  TEST_CASE("the mutation fixture is caught") {
    ValidationOptions o;
    o.inject_gap_sign_error = true;
    const auto report = run_validation_suite("identities", o);
    CHECK_FALSE(report.passed());
    bool named = false;
    for (const auto& c : report.checks)
      if (!c.passed && c.name == "gen_gap_identity") named = true;
    CHECK(named);
  }

  TEST_CASE("unknown suites are rejected") {
    CHECK_THROWS_AS(run_validation_suite("astrology"), InvalidArgument);
  }
}
