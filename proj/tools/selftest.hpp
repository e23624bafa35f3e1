#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace distopt::selftest {

struct SuiteResult {
  std::string name;
  bool passed = true;
  int checks = 0;
  double millis = 0.0;
  std::vector<std::string> failures;
};

struct Report {
  std::vector<SuiteResult> suites;
  bool all_passed = true;
};

// Runs the built-in consistency suites: analytic derivatives against finite
// differences, closed forms against search oracles, and the curvature
// decomposition identities. `only` restricts to one suite by name;
// `fault_suite` zeroes the named suite's tolerances so the failure path can
// be exercised deliberately.
Report run(std::uint64_t seed, const std::string& only = "",
           const std::string& fault_suite = "");

}  // namespace distopt::selftest
