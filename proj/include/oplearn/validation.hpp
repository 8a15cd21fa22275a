// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace oplearn {

struct CheckResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const noexcept;
  std::size_t failures() const noexcept;
};

struct ValidationOptions {
  std::uint64_t seed = 0x5eed;
  /// Mutation fixture: evaluates the generalization gap with the sign of
  /// its second term flipped. The identities suite must then fail.
  bool inject_gap_sign_error = false;
};

/// oracle, identities, lemmas, parseval
const std::vector<std::string>& validation_suites();

/// Throws InvalidArgument for an unknown suite name.
SuiteReport run_validation_suite(std::string_view suite, const ValidationOptions& opts = {});

// Individual checks, shared with the acceptance tests.
CheckResult check_diag_posterior_oracle(std::uint64_t seed, std::size_t instances = 1000);
CheckResult check_matrix_row_oracle(std::uint64_t seed, std::size_t instances = 1000);
CheckResult check_gen_gap_identity(std::uint64_t seed, std::size_t instances = 1000,
                                   bool inject_sign_error = false);
CheckResult check_closed_form_monte_carlo(std::uint64_t seed, std::size_t configs = 50,
                                          std::size_t draws = 10000);

}  // namespace oplearn
