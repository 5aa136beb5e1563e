#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tropot {

struct CheckResult {
  std::string name;
  std::string property;
  std::size_t trials = 0;
  std::size_t passed = 0;
  /// Description of the first failing trial, empty when all passed.
  std::string first_failure;

  bool ok() const { return passed == trials; }
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::vector<CheckResult> checks;

  bool ok() const;
};

/// Names of the property suites, in report order.
std::vector<std::string> verify_check_names();

/// Runs every suite with `trials` random instances each. Each suite draws
/// from its own stream derived from `seed` and its name.
VerifyReport run_verify(std::size_t trials, std::uint64_t seed);

}  // namespace tropot
