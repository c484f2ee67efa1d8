#include "qfluct/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include "qfluct/config.hpp"
#include "qfluct/errors.hpp"

namespace qfluct {

namespace {

using nlohmann::ordered_json;

ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

ordered_json number_map(const std::map<std::string, double>& m) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : m) out[k] = number(v);
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string series_csv(const std::vector<BoundReport>& reports) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : reports) {
    const bool d = r.degenerate;
    const double cells[] = {r.t,         r.mu,        r.sigma,
                            r.mu_dot,    d ? NAN : r.sigma_dot,
                            r.sigma_v,   r.v2_mean,   d ? NAN : r.lhs_sq_sum(),
                            r.v2_mean,   d ? NAN : r.residual_r2,
                            r.cs_residual};
    for (double c : cells) {
      out += format_number(c);
      out += ',';
    }
    out += r.tight ? '1' : '0';
    out += ',';
    out += d ? '1' : '0';
    out += ',';
    out += format_number(r.norm_defect);
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json report_json(const ScenarioReport& r, const RunManifest& manifest) {
  ordered_json out;
  out["version"] = kVersion;
  out["config"] = config_to_json(r.config);

  ordered_json summary;
  summary["points"] = r.reports.size();
  summary["degenerate_points"] = r.degenerate_count;
  summary["tight_fraction"] = number(r.tight_fraction);
  summary["min_residual_r2"] = number(r.min_residual);
  summary["min_cs_residual"] = number(r.min_cs_residual);
  summary["max_norm_defect"] = number(r.max_norm_defect);
  if (r.config.kind == ScenarioKind::example3) {
    summary["cutoff"] = r.cutoff;
    summary["tail_mass"] = number(r.tail_mass);
    summary["truncation_warning"] = r.truncation_warning;
  }
  out["summary"] = std::move(summary);

  if (!r.overlay_max_dev.empty()) out["overlay_max_deviation"] = number_map(r.overlay_max_dev);
  if (!r.bloch_max_dev.empty()) out["bloch_max_deviation"] = number_map(r.bloch_max_dev);
  if (r.config.kind == ScenarioKind::example2) {
    ordered_json pts = ordered_json::array();
    for (const auto& sp : r.special_points) {
      pts.push_back({{"t", sp.t},
                     {"residual_r2", number(sp.residual)},
                     {"expected", sp.expected},
                     {"degenerate", sp.degenerate}});
    }
    out["special_points"] = std::move(pts);
  }

  out["flags"] = r.flags;
  out["warnings"] = r.warnings;
  out["ok"] = r.ok();
  out["manifest"] = {{"config_path", manifest.config_path},
                     {"output_dir", manifest.output_dir},
                     {"files", manifest.files}};
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move '" + tmp.string() + "' into place");
  }
}

}  // namespace qfluct
