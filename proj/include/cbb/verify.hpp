#pragma once

#include <string>
#include <vector>

namespace cbb {

enum class VerifyLevel { Fast, Full };

struct CheckResult {
  std::string name;
  bool pass = false;
  bool warn_only = false;  // red flag, not a hard failure
  std::string measured;
};

// Executes the statistical and structural property checks declared across
// the library and reports one entry per check with the measured values.
std::vector<CheckResult> verify_suite(VerifyLevel level);

std::string format_report(const std::vector<CheckResult>& results);

}  // namespace cbb
