#include "qfluct/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "qfluct/errors.hpp"

namespace qfluct {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) throw ConfigError(join(path, item.key()), "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError(join(path, key), "required field missing");
  return obj.at(key);
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

double to_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

double to_positive(const json& j, const std::string& path) {
  const double v = to_number(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

int to_int(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<int>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::floor(v) == v && std::abs(v) < 1e9) return static_cast<int>(v);
  }
  throw ConfigError(path, "expected an integer");
}

cplx to_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {to_number(j, path), 0.0};
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected a complex number as [re, im]");
  return {to_number(j[0], index(path, 0)), to_number(j[1], index(path, 1))};
}

Coefficient to_coefficient(const json& j, const std::string& path) {
  std::string fn;
  double scale = 1.0;
  if (j.is_string()) {
    fn = j.get<std::string>();
  } else if (j.is_object()) {
    reject_unknown(j, path, {"fn", "scale"});
    const json& f = require(j, path, "fn");
    if (!f.is_string()) throw ConfigError(join(path, "fn"), "expected a function name");
    fn = f.get<std::string>();
    if (j.contains("scale")) scale = to_number(j["scale"], join(path, "scale"));
  } else {
    throw ConfigError(path, "expected a function name or {\"fn\", \"scale\"}");
  }
  try {
    return Coefficient::parse(fn, scale);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
}

CMatrix to_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty square matrix");
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = j[r];
    const std::string rp = index(path, r);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw ConfigError(rp, "row length mismatch");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = to_complex(row[c], index(rp, c));
  }
  if (!is_hermitian(m, 1e-12).ok) throw ConfigError(path, "matrix is not Hermitian");
  return m;
}

OperatorTerms to_terms(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty list of terms");
  OperatorTerms terms;
  Eigen::Index dim = -1;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string tp = index(path, i);
    const json& term = require_object(j[i], tp);
    reject_unknown(term, tp, {"fn", "scale", "matrix"});
    json coeff = json::object();
    coeff["fn"] = term.contains("fn") ? term["fn"] : json("const");
    if (term.contains("scale")) coeff["scale"] = term["scale"];
    Coefficient c = to_coefficient(coeff, tp);
    CMatrix m = to_matrix(require(term, tp, "matrix"), join(tp, "matrix"));
    if (dim >= 0 && m.rows() != dim) throw ConfigError(join(tp, "matrix"), "dimension differs from earlier terms");
    dim = m.rows();
    terms.emplace_back(c, std::move(m));
  }
  return terms;
}

ScenarioKind to_kind(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a scenario name");
  const auto s = j.get<std::string>();
  if (s == "example1") return ScenarioKind::example1;
  if (s == "example2") return ScenarioKind::example2;
  if (s == "example3") return ScenarioKind::example3;
  if (s == "custom") return ScenarioKind::custom;
  throw ConfigError(path, "unknown scenario '" + s + "' (expected example1, example2, example3 or custom)");
}

void parse_params(const json& j, ScenarioConfig& c) {
  const std::string path = "params";
  require_object(j, path);
  reject_unknown(j, path, {"omega0", "nu0", "a", "b", "theta", "alpha", "z", "s", "hbar", "mass", "omega"});
  ScenarioParams& p = c.params;
  auto has = [&](const char* key) { return j.contains(key); };
  auto at = [&](const char* key) -> const json& { return require(j, path, key); };

  switch (c.kind) {
    case ScenarioKind::example1:
    case ScenarioKind::example2:
      p.omega0 = to_positive(at("omega0"), join(path, "omega0"));
      p.nu0 = to_positive(at("nu0"), join(path, "nu0"));
      p.a = to_coefficient(at("a"), join(path, "a"));
      if (c.kind == ScenarioKind::example2) p.b = to_coefficient(at("b"), join(path, "b"));
      break;
    case ScenarioKind::example3:
      p.alpha = to_complex(at("alpha"), join(path, "alpha"));
      p.z = to_complex(at("z"), join(path, "z"));
      if (has("s")) {
        p.s = to_int(j["s"], join(path, "s"));
        if (*p.s < 1) throw ConfigError(join(path, "s"), "cutoff must be >= 1");
      } else {
        p.s.reset();
      }
      if (has("theta")) p.theta = to_coefficient(j["theta"], join(path, "theta"));
      if (has("mass")) p.mass = to_positive(j["mass"], join(path, "mass"));
      if (has("omega")) p.omega = to_positive(j["omega"], join(path, "omega"));
      break;
    case ScenarioKind::custom:
      break;
  }
  if (has("hbar")) p.hbar = to_positive(j["hbar"], join(path, "hbar"));
}

void parse_tolerances(const json& j, ScenarioTolerances& t) {
  const std::string path = "tolerances";
  require_object(j, path);
  const std::pair<const char*, double ScenarioTolerances::*> fields[] = {
      {"overlay", &ScenarioTolerances::overlay},         {"tight", &ScenarioTolerances::tight},
      {"residual_floor", &ScenarioTolerances::residual_floor}, {"norm_defect", &ScenarioTolerances::norm_defect},
      {"tail_mass", &ScenarioTolerances::tail_mass},     {"sigma_floor", &ScenarioTolerances::sigma_floor},
      {"special_point", &ScenarioTolerances::special_point}, {"bloch", &ScenarioTolerances::bloch}};
  std::set<std::string> allowed;
  for (const auto& [key, field] : fields) {
    allowed.insert(key);
    if (j.contains(key)) t.*field = to_positive(j[key], join(path, key));
  }
  reject_unknown(j, path, allowed);
}

void parse_custom(const json& j, ScenarioConfig& c) {
  const std::string path = "custom";
  require_object(j, path);
  reject_unknown(j, path, {"hamiltonian", "observable", "psi0"});
  CustomScenario cs;
  cs.hamiltonian = to_terms(require(j, path, "hamiltonian"), join(path, "hamiltonian"));
  cs.observable = to_terms(require(j, path, "observable"), join(path, "observable"));
  const json& psi = require(j, path, "psi0");
  const std::string pp = join(path, "psi0");
  if (!psi.is_array() || psi.empty()) throw ConfigError(pp, "expected a non-empty list of amplitudes");
  cs.psi0.resize(static_cast<Eigen::Index>(psi.size()));
  for (std::size_t i = 0; i < psi.size(); ++i) cs.psi0[static_cast<Eigen::Index>(i)] = to_complex(psi[i], index(pp, i));
  const Eigen::Index dim = cs.hamiltonian.front().second.rows();
  if (cs.observable.front().second.rows() != dim) {
    throw ConfigError(join(path, "observable"), "dimension differs from the Hamiltonian");
  }
  if (cs.psi0.size() != dim) throw ConfigError(pp, "length differs from the operator dimension");
  if (!is_normalized(cs.psi0, Tolerances{}.norm).ok) throw ConfigError(pp, "state is not normalized");
  c.custom = std::move(cs);
}

ordered_json complex_json(cplx z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json coefficient_json(const Coefficient& c) {
  if (c.scale() == 1.0) return c.name();
  return ordered_json{{"fn", c.name()}, {"scale", c.scale()}};
}

ordered_json terms_json(const OperatorTerms& terms) {
  ordered_json out = ordered_json::array();
  for (const auto& [coeff, m] : terms) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index col = 0; col < m.cols(); ++col) row.push_back(complex_json(m(r, col)));
      rows.push_back(std::move(row));
    }
    out.push_back({{"fn", coeff.name()}, {"scale", coeff.scale()}, {"matrix", std::move(rows)}});
  }
  return out;
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "", {"name", "label", "params", "grid", "method", "tolerances", "seed", "custom"});
  const ScenarioKind kind = to_kind(require(doc, "", "name"), "name");
  ScenarioConfig c = ScenarioConfig::defaults(kind);

  if (doc.contains("label")) {
    const json& l = doc["label"];
    if (!l.is_string() || l.get<std::string>().empty()) throw ConfigError("label", "expected a non-empty string");
    const auto s = l.get<std::string>();
    if (s.find_first_of("/\\") != std::string::npos) throw ConfigError("label", "must not contain path separators");
    c.label = s;
  }

  if (kind == ScenarioKind::custom) {
    parse_custom(require(doc, "", "custom"), c);
    if (doc.contains("params")) parse_params(doc["params"], c);
  } else {
    if (doc.contains("custom")) throw ConfigError("custom", "only allowed for the custom scenario");
    parse_params(require(doc, "", "params"), c);
  }

  if (doc.contains("grid")) {
    const json& g = require_object(doc["grid"], "grid");
    reject_unknown(g, "grid", {"t0", "t1", "steps"});
    const double t0 = g.contains("t0") ? to_number(g["t0"], "grid.t0") : c.grid.t0;
    const double t1 = g.contains("t1") ? to_number(g["t1"], "grid.t1") : c.grid.t1;
    const int steps = g.contains("steps") ? to_int(g["steps"], "grid.steps") : c.grid.n_steps;
    if (!(t1 > t0)) throw ConfigError("grid.t1", "must exceed grid.t0");
    if (steps < 1) throw ConfigError("grid.steps", "must be >= 1");
    c.grid = TimeGrid(t0, t1, steps);
  }

  if (doc.contains("method")) {
    const json& m = doc["method"];
    const std::string s = m.is_string() ? m.get<std::string>() : "";
    if (s == "exact_commuting") c.method = Method::exact_commuting;
    else if (s == "midpoint") c.method = Method::midpoint;
    else if (s == "auto") c.method.reset();
    else throw ConfigError("method", "expected auto, exact_commuting or midpoint");
  }

  if (doc.contains("tolerances")) parse_tolerances(doc["tolerances"], c.tol);

  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError("seed", "expected a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

ordered_json config_to_json(const ScenarioConfig& c) {
  ordered_json out;
  out["name"] = to_string(c.kind);
  out["label"] = c.output_label();
  const ScenarioParams& p = c.params;
  ordered_json params;
  switch (c.kind) {
    case ScenarioKind::example1:
    case ScenarioKind::example2:
      params["omega0"] = p.omega0;
      params["nu0"] = p.nu0;
      params["a"] = coefficient_json(p.a);
      if (c.kind == ScenarioKind::example2) params["b"] = coefficient_json(p.b);
      break;
    case ScenarioKind::example3:
      params["alpha"] = complex_json(p.alpha);
      params["z"] = complex_json(p.z);
      params["s"] = p.s ? ordered_json(*p.s) : ordered_json(nullptr);
      params["theta"] = coefficient_json(p.theta);
      params["mass"] = p.mass;
      params["omega"] = p.omega;
      break;
    case ScenarioKind::custom:
      break;
  }
  params["hbar"] = p.hbar;
  out["params"] = std::move(params);
  out["grid"] = {{"t0", c.grid.t0}, {"t1", c.grid.t1}, {"steps", c.grid.n_steps}};
  out["method"] = c.method ? to_string(*c.method) : "auto";
  out["tolerances"] = {{"overlay", c.tol.overlay},         {"tight", c.tol.tight},
                       {"residual_floor", c.tol.residual_floor}, {"norm_defect", c.tol.norm_defect},
                       {"tail_mass", c.tol.tail_mass},     {"sigma_floor", c.tol.sigma_floor},
                       {"special_point", c.tol.special_point}, {"bloch", c.tol.bloch}};
  out["seed"] = c.seed;
  if (c.custom) {
    ordered_json psi = ordered_json::array();
    for (Eigen::Index i = 0; i < c.custom->psi0.size(); ++i) psi.push_back(complex_json(c.custom->psi0[i]));
    out["custom"] = {{"hamiltonian", terms_json(c.custom->hamiltonian)},
                     {"observable", terms_json(c.custom->observable)},
                     {"psi0", std::move(psi)}};
  }
  return out;
}

}  // namespace qfluct
