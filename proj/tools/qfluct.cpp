#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qfluct/cli.hpp"
#include "qfluct/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qfluct: fluctuation-rate bounds for unitary quantum dynamics"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = qfluct::default_output_dir().string();

  auto* run = app.add_subcommand("run", "Run one scenario and write <label>_series.csv and <label>_report.json");
  run->add_option("-c,--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", out_dir, "Output directory (default $QFLUCT_OUT_DIR or .)");

  std::string suite = "all";
  std::uint64_t seed = 20240607;
  std::string json_out;
  auto* verify = app.add_subcommand("verify", "Run seeded property suites and print pass/fail JSON");
  verify->add_option("suite", suite, "algebra, bounds, bloch, truncation or all")
      ->check(CLI::IsMember({"algebra", "bounds", "bloch", "truncation", "all"}));
  verify->add_option("--seed", seed, "Seed for randomized draws");
  verify->add_option("--json", json_out, "Also write the JSON to this file");

  std::string param;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario once per parameter value and summarize");
  sweep->add_option("-c,--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("-p,--param", param, "Config path to vary, e.g. nu0 or grid.steps")->required();
  sweep->add_option("-v,--values", values, "Comma separated values")->required();
  sweep->add_option("-o,--out", out_dir, "Output directory (default $QFLUCT_OUT_DIR or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qfluct::kExitBadConfig;
  }

  if (run->parsed()) return qfluct::cmd_run(config, out_dir, std::cout, std::cerr);
  if (verify->parsed()) {
    std::optional<std::filesystem::path> path;
    if (!json_out.empty()) path = json_out;
    return qfluct::cmd_verify(suite, seed, std::cout, std::cerr, path);
  }
  return qfluct::cmd_sweep(config, param, values, out_dir, std::cout, std::cerr);
}
