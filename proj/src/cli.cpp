#include "qfluct/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <ostream>

#include "qfluct/config.hpp"
#include "qfluct/errors.hpp"
#include "qfluct/report_io.hpp"
#include "qfluct/scenarios.hpp"
#include "qfluct/verify.hpp"

namespace qfluct {

namespace {

using nlohmann::json;

struct Outcome {
  std::optional<ScenarioReport> report;
  int code = kExitOk;
  std::string message;
};

Outcome run_guarded(const ScenarioConfig& config) {
  Outcome o;
  try {
    o.report = run_scenario(config);
    if (!o.report->ok()) o.code = kExitInvariant;
  } catch (const ConfigError& e) {
    o.code = kExitBadConfig, o.message = e.what();
  } catch (const DegenerateDispersion& e) {
    o.code = kExitDegenerate, o.message = e.what();
  } catch (const EigenSolverError& e) {
    o.code = kExitDegenerate, o.message = e.what();
  } catch (const std::invalid_argument& e) {
    o.code = kExitBadConfig, o.message = e.what();
  } catch (const std::exception& e) {
    o.code = kExitInvariant, o.message = e.what();
  }
  return o;
}

// Writes the series and report for one finished run; returns the file names.
std::vector<std::string> emit(const ScenarioReport& report, const std::string& label,
                              const std::filesystem::path& config_path, const std::filesystem::path& out_dir) {
  const std::string series = label + "_series.csv";
  const std::string report_name = label + "_report.json";
  RunManifest manifest{config_path.string(), out_dir.string(), {series, report_name}};
  write_atomic(out_dir / series, series_csv(report.reports));
  write_atomic(out_dir / report_name, report_json(report, manifest).dump(2) + "\n");
  return manifest.files;
}

void describe(const ScenarioReport& r, std::ostream& out) {
  out << to_string(r.config.kind) << ": " << r.reports.size() << " points, tight fraction "
      << format_number(r.tight_fraction) << ", min residual " << format_number(r.min_residual)
      << ", max norm defect " << format_number(r.max_norm_defect) << '\n';
  for (const auto& w : r.warnings) out << "  warning: " << w << '\n';
  for (const auto& f : r.flags) out << "  FLAG: " << f << '\n';
}

bool prepare_dir(const std::filesystem::path& dir, std::ostream& err) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create output directory '" << dir.string() << "': " << ec.message() << '\n';
    return false;
  }
  return true;
}

std::string sweep_pointer(const std::string& param) {
  const std::string dotted = param.find('.') == std::string::npos ? "params." + param : param;
  std::string ptr;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    ptr += "/" + dotted.substr(start, dot - start);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return ptr;
}

std::string file_token(std::string s) {
  for (char& c : s) {
    if (c == '.' || c == '/' || c == ' ') c = '_';
  }
  return s;
}

}  // namespace

std::filesystem::path default_output_dir() {
  const char* env = std::getenv("QFLUCT_OUT_DIR");
  if (env != nullptr && *env != '\0') return env;
  return ".";
}

int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir, std::ostream& out,
            std::ostream& err) {
  ScenarioConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitBadConfig;
  }
  const Outcome o = run_guarded(config);
  if (!o.report) {
    err << "error: " << o.message << '\n';
    return o.code;
  }
  if (!prepare_dir(out_dir, err)) return kExitInvariant;
  try {
    for (const auto& f : emit(*o.report, config.output_label(), config_path, out_dir)) {
      out << "wrote " << (out_dir / f).string() << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
  describe(*o.report, out);
  return o.code;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, std::ostream& out, std::ostream& err,
               const std::optional<std::filesystem::path>& json_path) {
  std::vector<SuiteResult> results;
  try {
    results = run_suites(suite, seed);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const std::exception& e) {
    err << "error: verification aborted: " << e.what() << '\n';
    return kExitVerifyFailed;
  }
  const auto doc = suites_json(results);
  const std::string text = doc.dump(2) + "\n";
  out << text;
  if (json_path) write_atomic(*json_path, text);
  return doc["ok"].get<bool>() ? kExitOk : kExitVerifyFailed;
}

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> values;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == ',' || text[i] == ' ' || text[i] == '\t') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && text[j] != ',' && text[j] != ' ' && text[j] != '\t') ++j;
    double v = 0.0;
    const auto res = std::from_chars(text.data() + i, text.data() + j, v);
    if (res.ec != std::errc() || res.ptr != text.data() + j || !std::isfinite(v)) {
      throw std::invalid_argument("not a number: '" + text.substr(i, j - i) + "'");
    }
    values.push_back(v);
    i = j;
  }
  return values;
}

int cmd_sweep(const std::filesystem::path& config_path, const std::string& param, const std::string& values_text,
              const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err) {
  std::vector<double> values;
  try {
    values = parse_value_list(values_text);
  } catch (const std::invalid_argument& e) {
    err << "config error: values: " << e.what() << '\n';
    return kExitBadConfig;
  }
  if (values.empty()) {
    err << "config error: values: empty value list\n";
    return kExitBadConfig;
  }

  json base;
  {
    std::ifstream in(config_path);
    if (!in) {
      err << "config error: cannot open config file '" << config_path.string() << "'\n";
      return kExitBadConfig;
    }
    try {
      base = json::parse(in);
    } catch (const json::parse_error& e) {
      err << "config error: invalid JSON: " << e.what() << '\n';
      return kExitBadConfig;
    }
  }

  const std::string ptr = sweep_pointer(param);
  const std::string token = file_token(param);
  std::vector<ScenarioConfig> configs;
  try {
    for (const double v : values) {
      json doc = base;
      const bool integral = std::floor(v) == v && std::abs(v) < 1e9;
      doc[json::json_pointer(ptr)] = integral ? json(static_cast<long long>(v)) : json(v);
      ScenarioConfig c = parse_config(doc);
      c.label = base.value("label", to_string(c.kind)) + "_" + token + "_" + format_number(v);
      configs.push_back(std::move(c));
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const json::exception& e) {
    err << "config error: " << param << ": not addressable (" << e.what() << ")\n";
    return kExitBadConfig;
  }

  const int n = static_cast<int>(configs.size());
  std::vector<Outcome> outcomes(n);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n; ++k) outcomes[k] = run_guarded(configs[k]);

  if (!prepare_dir(out_dir, err)) return kExitInvariant;
  int code = kExitOk;
  std::string summary = "value,min_residual,tight_fraction,max_norm_defect\n";
  try {
    for (int k = 0; k < n; ++k) {
      const Outcome& o = outcomes[k];
      code = std::max(code, o.code);
      if (!o.report) {
        err << "error: " << param << " = " << format_number(values[k]) << ": " << o.message << '\n';
        continue;
      }
      emit(*o.report, configs[k].output_label(), config_path, out_dir);
      describe(*o.report, out);
      summary += format_number(values[k]) + "," + format_number(o.report->min_residual) + "," +
                 format_number(o.report->tight_fraction) + "," + format_number(o.report->max_norm_defect) + "\n";
    }
    const std::string label = base.value("label", base.value("name", std::string("sweep")));
    const auto summary_path = out_dir / (label + "_sweep_" + token + ".csv");
    write_atomic(summary_path, summary);
    out << "wrote " << summary_path.string() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return code;
}

}  // namespace qfluct
