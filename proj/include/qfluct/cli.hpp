#pragma once

// Subcommand implementations behind the qfluct executable. Each returns the
// process exit code and reports progress and diagnostics on the given streams.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qfluct {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitBadConfig = 2,
  kExitInvariant = 3,
  kExitDegenerate = 4,
};

/// $QFLUCT_OUT_DIR when set and non-empty, the working directory otherwise.
std::filesystem::path default_output_dir();

/// Writes <label>_series.csv and <label>_report.json into out_dir.
int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir, std::ostream& out,
            std::ostream& err);

/// Prints the suite JSON to out, and also writes it to json_path when given.
int cmd_verify(const std::string& suite, std::uint64_t seed, std::ostream& out, std::ostream& err,
               const std::optional<std::filesystem::path>& json_path = std::nullopt);

/// param is a dotted config path ("params.nu0", "grid.steps"); a bare name
/// means params.<name>. values is a comma or space separated number list.
int cmd_sweep(const std::filesystem::path& config_path, const std::string& param, const std::string& values,
              const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

/// Parses "0.5, 1,2" into numbers; throws std::invalid_argument on junk.
std::vector<double> parse_value_list(const std::string& text);

}  // namespace qfluct
