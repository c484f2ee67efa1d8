#pragma once

// Seeded property suites behind `qfluct verify`.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace qfluct {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;      ///< worst measured quantity
  double tolerance = 0.0;  ///< the threshold it was held to
};

struct SuiteResult {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;

  int passed() const;
  int failed() const;
};

/// algebra, bounds, bloch, truncation
const std::vector<std::string>& suite_names();

/// Runs one suite, or every suite for "all". Throws std::invalid_argument
/// for an unknown name.
std::vector<SuiteResult> run_suites(const std::string& name, std::uint64_t seed);

nlohmann::ordered_json suites_json(const std::vector<SuiteResult>& results);

}  // namespace qfluct
