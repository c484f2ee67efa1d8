#pragma once

// Byte-stable serialization: CSV series, JSON reports, atomic file writes.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfluct/scenarios.hpp"

namespace qfluct {

inline constexpr const char* kVersion = "1.0.0";

/// Column order of the series CSV.
inline constexpr const char* kCsvHeader =
    "t,mu,sigma,mu_dot,sigma_dot,sigma_v,v2_mean,lhs_sq_sum,rhs_v2,residual_r2,cs_residual,tight,degenerate,"
    "norm_defect";

/// Shortest round-trip decimal form; empty for NaN.
std::string format_number(double x);

/// Degenerate rows leave sigma_dot, lhs_sq_sum and residual_r2 empty.
std::string series_csv(const std::vector<BoundReport>& reports);

struct RunManifest {
  std::string config_path;
  std::string output_dir;
  std::vector<std::string> files;  ///< file names relative to output_dir
};

/// Echoed config, summary statistics, overlays, flags and the manifest.
/// Non-finite numbers become null.
nlohmann::ordered_json report_json(const ScenarioReport& report, const RunManifest& manifest);

/// Writes to a temporary sibling and renames it into place, so readers never
/// see a partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace qfluct
