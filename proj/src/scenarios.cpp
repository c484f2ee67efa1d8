#include "qfluct/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qfluct/errors.hpp"
#include "qfluct/hilbert.hpp"

namespace qfluct {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double xi_of(const ScenarioParams& p, double t) { return 2.0 * (p.omega0 / p.nu0) * std::sin(p.nu0 * t); }

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string("scenario: ") + what + " must be positive and finite");
  }
}

TimeDepOperator qubit_hamiltonian(const ScenarioParams& p) {
  const double w0 = p.omega0;
  const double nu = p.nu0;
  const double hbar = p.hbar;
  // hbar w0 cos(nu t) sz as a scaled cosine coefficient of nu t.
  const CMatrix sz = pauli(Axis::z);
  return TimeDepOperator(
      2,
      [=](double t, int k) -> CMatrix {
        const double c = hbar * w0 * std::pow(nu, k) * std::cos(nu * t + k * M_PI_2);
        return c * sz;
      },
      TimeDepOperator::kUnlimited, true);
}

TimeDepOperator qubit_observable(const ScenarioParams& p, bool with_b) {
  OperatorTerms terms{{p.a, pauli(Axis::x)}};
  if (with_b) terms.emplace_back(p.b, pauli(Axis::z));
  return TimeDepOperator::linear_combination(std::move(terms));
}

TimeDepOperator homodyne_observable(const Quadratures& q, const Coefficient& theta) {
  return TimeDepOperator(
      q.x.rows(),
      [q, theta](double t, int k) -> CMatrix {
        const double th = theta(t);
        const double c = std::cos(th);
        const double s = std::sin(th);
        const CMatrix along = c * q.x + s * q.p;
        const CMatrix across = -s * q.x + c * q.p;
        switch (k) {
          case 0:
            return along;
          case 1:
            return theta.derivative(t, 1) * across;
          default: {
            const double d1 = theta.derivative(t, 1);
            return theta.derivative(t, 2) * across - d1 * d1 * along;
          }
        }
      },
      2, false);
}

Method choose_method(const ScenarioConfig& config, const TimeDepOperator& h) {
  if (config.method) return *config.method;
  return h.commuting_family() ? Method::exact_commuting : Method::midpoint;
}

void summarize(ScenarioReport& r, const Trajectory& traj) {
  r.tight_fraction = 0.0;
  r.min_residual = std::numeric_limits<double>::infinity();
  r.min_cs_residual = std::numeric_limits<double>::infinity();
  r.degenerate_count = 0;
  int tight = 0;
  int regular = 0;
  for (const auto& b : r.reports) {
    r.min_cs_residual = std::min(r.min_cs_residual, b.cs_residual);
    if (b.degenerate) {
      ++r.degenerate_count;
      continue;
    }
    ++regular;
    if (b.tight) ++tight;
    r.min_residual = std::min(r.min_residual, b.residual_r2);
  }
  r.tight_fraction = regular > 0 ? static_cast<double>(tight) / regular : 0.0;
  if (regular == 0) r.min_residual = kNaN;
  r.max_norm_defect = traj.max_norm_defect();

  const auto& tol = r.config.tol;
  if (regular > 0 && r.min_residual < -tol.residual_floor) r.flags.push_back("residual_negative");
  if (r.max_norm_defect > tol.norm_defect) r.flags.push_back("norm_defect");
  if (traj.budget_exceeded) r.flags.push_back("norm_budget_exceeded");
}

void compare_overlay(ScenarioReport& r) {
  const Overlay& o = *r.overlay;
  double dmu = 0.0, dsigma = 0.0, dv2 = 0.0;
  for (std::size_t k = 0; k < r.reports.size(); ++k) {
    const auto& b = r.reports[k];
    dmu = std::max(dmu, std::abs(b.mu - o.mu[k]));
    dsigma = std::max(dsigma, std::abs(b.sigma - o.sigma[k]));
    dv2 = std::max(dv2, std::abs(b.v2_mean - o.v2_mean[k]));
  }
  r.overlay_max_dev = {{"mu", dmu}, {"sigma", dsigma}, {"v2_mean", dv2}};
  for (const auto& [channel, dev] : r.overlay_max_dev) {
    if (!(dev <= r.config.tol.overlay)) r.flags.push_back("overlay_deviation:" + channel);
  }
}

void compare_bloch(ScenarioReport& r, bool with_b) {
  const BlochModel model = qubit_bloch_model(r.config.params, with_b);
  double dmu = 0.0, dvar = 0.0, dv = 0.0, dv2 = 0.0;
  for (const auto& b : r.reports) {
    const BlochStats s = bloch_stats(model, b.t);
    dmu = std::max(dmu, std::abs(b.mu - s.mean));
    dvar = std::max(dvar, std::abs(b.sigma * b.sigma - s.sigma_sq));
    dv = std::max(dv, std::abs(b.mu_dot - s.v_mean));
    dv2 = std::max(dv2, std::abs(b.v2_mean - s.v2_mean));
  }
  r.bloch_max_dev = {{"mu", dmu}, {"sigma_sq", dvar}, {"v_mean", dv}, {"v2_mean", dv2}};
  for (const auto& [channel, dev] : r.bloch_max_dev) {
    if (!(dev <= r.config.tol.bloch)) r.flags.push_back("bloch_mismatch:" + channel);
  }
}

CVector state_at(const ScenarioSetup& setup, double t) {
  if (t <= setup.grid.t0) return setup.psi0;
  PropagationOptions opts = setup.prop;
  opts.keep_propagators = false;
  return propagate(setup.h, setup.psi0, TimeGrid(setup.grid.t0, t, 1), opts).states.back();
}

ScenarioReport run_qubit(const ScenarioConfig& config, bool with_b) {
  const ScenarioSetup setup = setup_scenario(config);
  const Trajectory traj = propagate(setup.h, setup.psi0, setup.grid, setup.prop);

  ScenarioReport r;
  r.config = config;
  r.reports = bound_series(setup.a, setup.h, traj, setup.rate);
  r.overlay = qubit_overlay(config.params, setup.grid, with_b);
  summarize(r, traj);
  compare_overlay(r);
  compare_bloch(r, with_b);
  return r;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::example1: return "example1";
    case ScenarioKind::example2: return "example2";
    case ScenarioKind::example3: return "example3";
    case ScenarioKind::custom: return "custom";
  }
  return "unknown";
}

std::string to_string(Method method) {
  return method == Method::exact_commuting ? "exact_commuting" : "midpoint";
}

ScenarioConfig ScenarioConfig::defaults(ScenarioKind kind) {
  ScenarioConfig c;
  c.kind = kind;
  if (kind == ScenarioKind::example3) {
    c.grid = TimeGrid(0.0, 2.0 * M_PI, 4000);
    c.params.s = 20;
  }
  return c;
}

ScenarioSetup setup_scenario(const ScenarioConfig& config) {
  const ScenarioParams& p = config.params;
  require_positive(p.hbar, "hbar");

  RateOptions rate;
  rate.hbar = p.hbar;
  rate.sigma_floor = config.tol.sigma_floor;
  rate.tight_tol = config.tol.tight;

  PropagationOptions prop;
  prop.hbar = p.hbar;
  prop.norm_budget = 1e-8;
  rate.stats.norm_tol = prop.norm_budget;

  switch (config.kind) {
    case ScenarioKind::example1:
    case ScenarioKind::example2: {
      require_positive(p.omega0, "omega0");
      require_positive(p.nu0, "nu0");
      TimeDepOperator h = qubit_hamiltonian(p);
      TimeDepOperator a = qubit_observable(p, config.kind == ScenarioKind::example2);
      prop.method = choose_method(config, h);
      return {std::move(a), std::move(h), qubit_plus(), config.grid, prop, rate, 0, 0.0};
    }
    case ScenarioKind::example3: {
      require_positive(p.omega, "omega");
      require_positive(p.mass, "mass");
      const int s = p.s ? *p.s : recommended_cutoff(std::norm(p.alpha), 1e-6);
      if (s < 1) throw std::invalid_argument("scenario: cutoff s must be >= 1");
      const FockSpace space(s, p.hbar, p.mass, p.omega);
      const CMatrix energy =
          p.hbar * p.omega * (number_op(space) + 0.5 * CMatrix::Identity(space.dim(), space.dim()));
      TimeDepOperator h = TimeDepOperator::constant(energy);
      TimeDepOperator a = homodyne_observable(quadratures(space), p.theta);
      const PreparedState prepared = displaced_squeezed_vacuum(space, {p.alpha, p.z});
      prop.method = choose_method(config, h);
      return {std::move(a), std::move(h), prepared.state, config.grid, prop, rate, s, tail_mass(prepared.state, 2)};
    }
    case ScenarioKind::custom: {
      if (!config.custom) throw std::invalid_argument("scenario: custom scenario needs operator tables");
      const auto& c = *config.custom;
      TimeDepOperator h = TimeDepOperator::linear_combination(c.hamiltonian).without_analytic_derivatives();
      TimeDepOperator a = TimeDepOperator::linear_combination(c.observable).without_analytic_derivatives();
      if (h.dim() != a.dim() || h.dim() != c.psi0.size()) {
        throw DimensionError("scenario: custom operators and psi0 disagree in dimension");
      }
      prop.method = choose_method(config, h);
      return {std::move(a), std::move(h), c.psi0, config.grid, prop, rate, 0, 0.0};
    }
  }
  throw std::invalid_argument("scenario: unknown kind");
}

Overlay qubit_overlay(const ScenarioParams& p, const TimeGrid& grid, bool with_b) {
  Overlay o;
  const int n = grid.size();
  o.mu.resize(n);
  o.sigma.resize(n);
  o.v2_mean.resize(n);
  for (int k = 0; k < n; ++k) {
    const double t = grid.time(k);
    const double xi = xi_of(p, t);
    const double a = p.a(t);
    const double da = p.a.derivative(t, 1);
    const double b = with_b ? p.b(t) : 0.0;
    const double db = with_b ? p.b.derivative(t, 1) : 0.0;
    const double c = std::cos(p.nu0 * t);
    const double as = a * std::sin(xi);
    o.mu[k] = a * std::cos(xi);
    o.sigma[k] = std::sqrt(as * as + b * b);
    o.v2_mean[k] = da * da + db * db + 4.0 * p.omega0 * p.omega0 * a * a * c * c;
  }
  return o;
}

BlochModel qubit_bloch_model(const ScenarioParams& p, bool with_b) {
  BlochModel m;
  m.a = [p](double t) {
    const double xi = xi_of(p, t);
    return Vec3(std::cos(xi), std::sin(xi), 0.0);
  };
  m.h = [p](double t) { return Vec3(0.0, 0.0, p.omega0 * std::cos(p.nu0 * t)); };
  m.m = [p, with_b](double t) { return Vec3(p.a(t), 0.0, with_b ? p.b(t) : 0.0); };
  m.m_dot = [p, with_b](double t) {
    return Vec3(p.a.derivative(t, 1), 0.0, with_b ? p.b.derivative(t, 1) : 0.0);
  };
  return m;
}

std::vector<double> xi_roots(const ScenarioParams& p, double t0, double t1) {
  // sin(nu0 t) = n pi nu0 / (2 w0) for every integer n with |rhs| <= 1.
  std::vector<double> roots;
  const double ratio = M_PI * p.nu0 / (2.0 * p.omega0);
  const int n_max = static_cast<int>(std::floor(1.0 / ratio));
  const double period = 2.0 * M_PI / p.nu0;
  for (int n = -n_max; n <= n_max; ++n) {
    const double base = std::asin(std::clamp(n * ratio, -1.0, 1.0));
    for (const double phase : {base, M_PI - base}) {
      const double t_first = phase / p.nu0;
      const long k_lo = static_cast<long>(std::ceil((t0 - t_first) / period));
      for (long k = k_lo;; ++k) {
        const double t = t_first + k * period;
        if (t > t1) break;
        if (t >= t0) roots.push_back(t);
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); }),
              roots.end());
  return roots;
}

ScenarioReport run_example1(const ScenarioConfig& config) {
  if (config.kind != ScenarioKind::example1) throw std::invalid_argument("run_example1: wrong scenario kind");
  ScenarioReport r = run_qubit(config, false);
  if (r.tight_fraction < 1.0) r.flags.push_back("not_tight");
  return r;
}

ScenarioReport run_example2(const ScenarioConfig& config) {
  if (config.kind != ScenarioKind::example2) throw std::invalid_argument("run_example2: wrong scenario kind");
  ScenarioReport r = run_qubit(config, true);
  if (r.reports.size() - r.degenerate_count > 0 && r.tight_fraction >= 1.0) r.flags.push_back("not_loose");

  const ScenarioSetup setup = setup_scenario(config);
  const ScenarioParams& p = config.params;
  bool mismatch = false;
  for (const double t : xi_roots(p, config.grid.t0, config.grid.t1)) {
    const BoundReport b = bound_report_at(setup.a, setup.h, state_at(setup, t), t, setup.rate);
    SpecialPoint sp;
    sp.t = t;
    const double a = p.a(t);
    const double c = std::cos(p.nu0 * t);
    sp.expected = 4.0 * p.omega0 * p.omega0 * a * a * c * c;
    sp.degenerate = b.degenerate;
    sp.residual = b.degenerate ? kNaN : b.residual_r2;
    if (!b.degenerate && !(std::abs(sp.residual - sp.expected) <= config.tol.special_point)) mismatch = true;
    r.special_points.push_back(sp);
  }
  if (mismatch) r.flags.push_back("special_point_mismatch");
  return r;
}

ScenarioReport run_example3(const ScenarioConfig& config) {
  if (config.kind != ScenarioKind::example3) throw std::invalid_argument("run_example3: wrong scenario kind");
  const ScenarioSetup setup = setup_scenario(config);
  const Trajectory traj = propagate(setup.h, setup.psi0, setup.grid, setup.prop);

  ScenarioReport r;
  r.config = config;
  r.cutoff = setup.cutoff;
  r.tail_mass = setup.tail_mass;
  r.reports = bound_series(setup.a, setup.h, traj, setup.rate);
  summarize(r, traj);
  if (r.tail_mass > config.tol.tail_mass) {
    r.truncation_warning = true;
    r.warnings.push_back("truncation_tail_mass");
  }
  return r;
}

ScenarioReport run_custom(const ScenarioConfig& config) {
  if (config.kind != ScenarioKind::custom) throw std::invalid_argument("run_custom: wrong scenario kind");
  const ScenarioSetup setup = setup_scenario(config);
  const Trajectory traj = propagate(setup.h, setup.psi0, setup.grid, setup.prop);
  ScenarioReport r;
  r.config = config;
  r.reports = bound_series(setup.a, setup.h, traj, setup.rate);
  summarize(r, traj);
  return r;
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
  switch (config.kind) {
    case ScenarioKind::example1: return run_example1(config);
    case ScenarioKind::example2: return run_example2(config);
    case ScenarioKind::example3: return run_example3(config);
    case ScenarioKind::custom: return run_custom(config);
  }
  throw std::invalid_argument("run_scenario: unknown kind");
}

double picture_equivalence_check(const TimeDepOperator& a, const TimeDepOperator& h, const Trajectory& traj,
                                 double hbar) {
  const int n = static_cast<int>(traj.states.size());
  if (static_cast<int>(traj.propagators.size()) != n) {
    throw std::invalid_argument("picture_equivalence_check: trajectory carries no propagators");
  }
  const CVector& psi0 = traj.states.front();
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (int k = 0; k < n; ++k) {
    const CMatrix v = velocity_observable(a, h, traj.grid.time(k), hbar);
    const CMatrix& u = traj.propagators[k];
    const CMatrix heisenberg = u.adjoint() * v * u;
    const cplx lhs = psi0.dot(heisenberg * psi0);
    const cplx rhs = traj.states[k].dot(v * traj.states[k]);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

TruncationStability truncation_stability(const ScenarioConfig& config) {
  if (config.kind != ScenarioKind::example3) {
    throw std::invalid_argument("truncation_stability: example3 configuration required");
  }
  ScenarioConfig lo = config;
  const int s = config.params.s ? *config.params.s : recommended_cutoff(std::norm(config.params.alpha), 1e-6);
  lo.params.s = s;
  ScenarioConfig hi = config;
  hi.params.s = 2 * s;
  const auto r_lo = run_example3(lo);
  const auto r_hi = run_example3(hi);

  TruncationStability out;
  out.s = s;
  const std::pair<const char*, double BoundReport::*> channels[] = {
      {"mu", &BoundReport::mu},           {"sigma", &BoundReport::sigma},
      {"mu_dot", &BoundReport::mu_dot},   {"sigma_dot", &BoundReport::sigma_dot},
      {"sigma_v", &BoundReport::sigma_v}, {"v2_mean", &BoundReport::v2_mean},
      {"residual_r2", &BoundReport::residual_r2}, {"cs_residual", &BoundReport::cs_residual}};
  for (const auto& [name, field] : channels) {
    double dev = 0.0;
    for (std::size_t k = 0; k < r_lo.reports.size(); ++k) {
      const double x = r_lo.reports[k].*field;
      const double y = r_hi.reports[k].*field;
      if (std::isnan(x) && std::isnan(y)) continue;
      dev = std::max(dev, std::isnan(x) || std::isnan(y) ? std::numeric_limits<double>::infinity()
                                                         : std::abs(x - y));
    }
    out.channel_max_dev[name] = dev;
    out.max_dev = std::max(out.max_dev, dev);
  }
  return out;
}

}  // namespace qfluct
