#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qfluct/config.hpp"
#include "qfluct/errors.hpp"
#include "qfluct/report_io.hpp"

using namespace qfluct;
using nlohmann::json;

namespace {

std::string error_path(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

json example1() {
  return json::parse(R"({"name": "example1", "params": {"omega0": 1.0, "nu0": 1.0, "a": "t"}})");
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "qfluct_config_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("shipped configs parse") {
  for (const char* name : {"example1", "example2", "example3"}) {
    const auto cfg = load_config(std::filesystem::path(QFLUCT_SOURCE_DIR) / "configs" / (std::string(name) + ".json"));
    CHECK(cfg.output_label() == name);
    CHECK(cfg.method == Method::exact_commuting);
    CHECK(cfg.seed == 20240607u);
  }
}

TEST_CASE("defaults fill unspecified sections") {
  const auto cfg = parse_config(example1());
  CHECK(cfg.grid.t1 == 5.0);
  CHECK(cfg.grid.n_steps == 5000);
  CHECK_FALSE(cfg.method);
  CHECK(cfg.tol.overlay == 1e-7);
}

TEST_CASE("coefficients as names or objects") {
  auto doc = example1();
  doc["params"]["a"] = {{"fn", "sin t"}, {"scale", 0.5}};
  const auto cfg = parse_config(doc);
  CHECK(cfg.params.a(1.0) == doctest::Approx(0.5 * std::sin(1.0)));
}

TEST_CASE("validation names the offending field") {
  auto doc = example1();
  doc["params"].erase("nu0");
  CHECK(error_path(doc) == "params.nu0");

  doc = example1();
  doc["params"]["extra"] = 1;
  CHECK(error_path(doc) == "params.extra");

  doc = example1();
  doc["params"]["omega0"] = -1.0;
  CHECK(error_path(doc) == "params.omega0");

  doc = example1();
  doc["params"]["a"] = "exp t";
  CHECK(error_path(doc) == "params.a");

  doc = example1();
  doc["grid"] = {{"t0", 1.0}, {"t1", 0.0}};
  CHECK(error_path(doc) == "grid.t1");

  doc = example1();
  doc["method"] = "rk4";
  CHECK(error_path(doc) == "method");

  doc = example1();
  doc["seed"] = -3;
  CHECK(error_path(doc) == "seed");

  doc = example1();
  doc["label"] = "a/b";
  CHECK(error_path(doc) == "label");

  doc = example1();
  doc["tolerances"] = {{"overlay", 0.0}};
  CHECK(error_path(doc) == "tolerances.overlay");

  doc = example1();
  doc["name"] = "example9";
  CHECK(error_path(doc) == "name");

  CHECK(error_path(json::parse(R"({"name": "example2", "params": {"omega0": 1, "nu0": 1, "a": "t"}})")) ==
        "params.b");
}

TEST_CASE("custom scenario schema") {
  const auto doc = json::parse(R"({
    "name": "custom",
    "custom": {
      "hamiltonian": [{"fn": "cos t", "matrix": [[1, 0], [0, -1]]}],
      "observable": [{"fn": "t", "matrix": [[0, 1], [1, 0]]}],
      "psi0": [0.7071067811865476, 0.7071067811865476]
    }
  })");
  const auto cfg = parse_config(doc);
  REQUIRE(cfg.custom);
  CHECK(cfg.custom->hamiltonian.size() == 1);
  CHECK(cfg.custom->psi0.size() == 2);

  auto bad = doc;
  bad["custom"]["observable"][0]["matrix"] = {{0, 1}, {2, 0}};
  CHECK(error_path(bad) == "custom.observable[0].matrix");
  bad = doc;
  bad["custom"]["psi0"] = {1.0, 1.0};
  CHECK(error_path(bad) == "custom.psi0");
  bad = doc;
  bad["custom"]["psi0"] = {1.0, 0.0, 0.0};
  CHECK(error_path(bad) == "custom.psi0");
}

TEST_CASE("config echo round-trips") {
  for (const char* name : {"example1", "example2", "example3"}) {
    const auto cfg = load_config(std::filesystem::path(QFLUCT_SOURCE_DIR) / "configs" / (std::string(name) + ".json"));
    const auto echo = config_to_json(cfg);
    const auto again = parse_config(json::parse(echo.dump()));
    CHECK(config_to_json(again).dump() == echo.dump());
  }
}

TEST_CASE("load_config reports unreadable files") {
  CHECK_THROWS_AS(load_config(scratch("missing.json")), ConfigError);
  const auto path = scratch("broken.json");
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(load_config(path), ConfigError);
}

TEST_CASE("number formatting round-trips") {
  for (double x : {0.0, 1.0, -2.5, 0.1, 1e-300, 3.141592653589793, 6.02214076e23}) {
    CHECK(std::stod(format_number(x)) == x);
  }
  CHECK(format_number(std::nan("")) == "");
  CHECK(format_number(0.1) == "0.1");
}

TEST_CASE("series CSV layout") {
  BoundReport ok;
  ok.t = 0.5;
  ok.mu = 1.0;
  ok.sigma = 0.25;
  ok.tight = true;
  BoundReport degen;
  degen.degenerate = true;
  degen.sigma_dot = degen.residual_r1 = degen.residual_r2 = std::nan("");
  const std::string csv = series_csv({ok, degen});
  std::istringstream in(csv);
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  CHECK(header == kCsvHeader);
  CHECK(std::count(row1.begin(), row1.end(), ',') == std::count(header.begin(), header.end(), ','));
  CHECK(row1.rfind("0.5,1,0.25,", 0) == 0);
  CHECK(row2.find(",,") != std::string::npos);
  CHECK(row2.substr(row2.size() - 4) == ",1,0");
}

TEST_CASE("report JSON carries version, flags and manifest") {
  ScenarioReport rep;
  rep.config = ScenarioConfig::defaults(ScenarioKind::example1);
  rep.min_residual = std::nan("");
  rep.flags = {"not_tight"};
  const auto doc = report_json(rep, {"cfg.json", "out", {"example1_series.csv"}});
  CHECK(doc["version"] == kVersion);
  CHECK(doc["ok"] == false);
  CHECK(doc["flags"][0] == "not_tight");
  CHECK(doc["summary"]["min_residual"].is_null());
  CHECK(doc["manifest"]["files"][0] == "example1_series.csv");
}

TEST_CASE("atomic write replaces the file and leaves no temporary") {
  const auto path = scratch("atomic.txt");
  write_atomic(path, "one");
  write_atomic(path, "two");
  std::ifstream in(path);
  std::string s;
  std::getline(in, s);
  CHECK(s == "two");
  for (const auto& entry : std::filesystem::directory_iterator(path.parent_path())) {
    CHECK(entry.path().extension() != ".tmp");
  }
}
