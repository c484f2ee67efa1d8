#pragma once

// JSON scenario configuration. Complex numbers are [re, im] pairs, coefficient
// functions are either a whitelisted name ("t", "t^2", "cos t", "sin t",
// "const") or {"fn": name, "scale": k}. Every validation failure raises
// ConfigError naming the offending field.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qfluct/scenarios.hpp"

namespace qfluct {

ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical echo of a configuration with every default filled in.
nlohmann::ordered_json config_to_json(const ScenarioConfig& config);

}  // namespace qfluct
