#include "qfluct/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qfluct/bloch.hpp"
#include "qfluct/bounds.hpp"
#include "qfluct/fluctuation.hpp"
#include "qfluct/hilbert.hpp"
#include "qfluct/sampling.hpp"
#include "qfluct/scenarios.hpp"

namespace qfluct {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::array<Eigen::Index, 4> kDims{2, 3, 4, 8};

class Recorder {
 public:
  Recorder(std::string suite, std::uint64_t seed) { result_.suite = std::move(suite), result_.seed = seed; }

  void at_most(std::string name, double value, double bound) { add(std::move(name), value <= bound, value, bound); }
  void at_least(std::string name, double value, double bound) { add(std::move(name), value >= bound, value, bound); }
  void holds(std::string name, bool ok) { add(std::move(name), ok, ok ? 1.0 : 0.0, 1.0); }

  SuiteResult take() { return std::move(result_); }

 private:
  void add(std::string name, bool pass, double value, double tol) {
    result_.checks.push_back({std::move(name), pass, value, tol});
  }
  SuiteResult result_;
};

CMatrix bloch_operator(const Vec3& v) {
  return v.x() * pauli(Axis::x) + v.y() * pauli(Axis::y) + v.z() * pauli(Axis::z);
}

// Pure qubit state with Bloch vector n (unit).
CVector state_from_bloch(const Vec3& n) {
  const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
  const double phi = std::atan2(n.y(), n.x());
  CVector psi(2);
  psi << std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi);
  return psi;
}

Coefficient random_coefficient(Rng& rng) {
  static const char* names[] = {"t", "t^2", "cos t", "sin t", "const"};
  const int pick = std::uniform_int_distribution<int>(0, 4)(rng);
  return Coefficient::parse(names[pick], uniform(rng, -2.0, 2.0));
}

struct Example1Run {
  ScenarioSetup setup;
  Trajectory traj;
  std::vector<BoundReport> reports;
};

Example1Run example1_run(ScenarioKind kind = ScenarioKind::example1, bool keep_propagators = false) {
  const ScenarioConfig config = ScenarioConfig::defaults(kind);
  ScenarioSetup setup = setup_scenario(config);
  setup.prop.keep_propagators = keep_propagators;
  Trajectory traj = propagate(setup.h, setup.psi0, setup.grid, setup.prop);
  auto reports = bound_series(setup.a, setup.h, traj, setup.rate);
  return {std::move(setup), std::move(traj), std::move(reports)};
}

// ---------------------------------------------------------------------------

SuiteResult algebra_suite(std::uint64_t seed) {
  Recorder rec("algebra", seed);
  Rng rng(seed);

  double worst_cs = kInf;
  double worst_cov = kInf;
  double worst_carlino = 0.0;
  double worst_split = 0.0;
  for (int draw = 0; draw < 1000; ++draw) {
    const Eigen::Index d = kDims[draw % kDims.size()];
    const CMatrix a = random_hermitian(d, rng);
    const CMatrix b = random_hermitian(d, rng);
    const CVector psi = random_state(d, rng);

    const double va = variance(a, psi);
    const double vb = variance(b, psi);
    const double cov = covariance(a, b, psi);
    worst_cs = std::min(worst_cs, va * vb - cov * cov);
    worst_cov = std::min(worst_cov, std::sqrt(va * vb) - std::abs(cov));

    const CMatrix id = CMatrix::Identity(d, d);
    const CMatrix da = a - expectation(a, psi) * id;
    const CMatrix db = b - expectation(b, psi) * id;
    const cplx prod = psi.dot(da * db * psi);
    const cplx comm = psi.dot(commutator(da, db) * psi);
    const cplx anti = psi.dot(anticommutator(da, db) * psi);
    const double lhs = 4.0 * std::norm(prod);
    const double rhs = std::norm(comm) + std::norm(anti);
    worst_carlino = std::max(worst_carlino, std::abs(lhs - rhs) / std::max(1.0, lhs));

    const CMatrix split = 0.5 * anticommutator(a, b) + 0.5 * commutator(a, b);
    const CMatrix ab = a * b;
    worst_split = std::max(worst_split, (split - ab).cwiseAbs().maxCoeff() / std::max(1.0, ab.cwiseAbs().maxCoeff()));
  }
  rec.at_least("cauchy_schwarz_var_product_minus_cov_sq", worst_cs, -1e-10);
  rec.at_least("covariance_bound_sigma_product_minus_abs_cov", worst_cov, -1e-10);
  rec.at_most("product_commutator_anticommutator_identity_rel", worst_carlino, 1e-10);
  rec.at_most("product_splits_into_half_anticommutator_plus_half_commutator_rel", worst_split, 1e-10);

  double worst_unitary = 0.0;
  for (int draw = 0; draw < 200; ++draw) {
    const Eigen::Index d = kDims[draw % kDims.size()];
    const CMatrix h = random_hermitian(d, rng, 5.0);
    worst_unitary = std::max(worst_unitary, is_unitary(herm_expm(h, cplx(0.0, -uniform(rng, 0.0, 3.0))), 0.0).max_defect);
  }
  rec.at_most("hermitian_exponential_unitarity", worst_unitary, 1e-10);

  double worst_ehrenfest = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const Eigen::Index d = kDims[draw % kDims.size()];
    const auto a = TimeDepOperator::linear_combination(
        {{random_coefficient(rng), random_hermitian(d, rng)}, {random_coefficient(rng), random_hermitian(d, rng)}});
    const auto h = TimeDepOperator::constant(random_hermitian(d, rng));
    const CVector psi0 = random_state(d, rng);
    const double t = uniform(rng, 0.2, 2.0);
    const double step = 1e-4;
    PropagationOptions opts;
    opts.method = Method::exact_commuting;
    const auto traj = propagate(h, psi0, TimeGrid(t - step, t + step, 2), opts);
    const double fd = (expectation(a(t + step), traj.states[2], {1e-10, 1e-8, 1e-10}) -
                       expectation(a(t - step), traj.states[0], {1e-10, 1e-8, 1e-10})) /
                      (2.0 * step);
    const double v = expectation(velocity_observable(a, h, t), traj.states[1], {1e-10, 1e-8, 1e-10});
    worst_ehrenfest = std::max(worst_ehrenfest, std::abs(fd - v) / std::max(1.0, std::abs(v)));
  }
  rec.at_most("velocity_expectation_matches_mean_rate_rel", worst_ehrenfest, 1e-5);
  return rec.take();
}

// ---------------------------------------------------------------------------

SuiteResult bounds_suite(std::uint64_t seed) {
  Recorder rec("bounds", seed);
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);

  double worst_r1 = kInf, worst_r2 = kInf, worst_cs = kInf;
  for (int draw = 0; draw < 500; ++draw) {
    const Eigen::Index d = kDims[draw % kDims.size()];
    const auto a = TimeDepOperator::linear_combination({{Coefficient::constant(1.0), random_hermitian(d, rng)},
                                                        {random_coefficient(rng), random_hermitian(d, rng)},
                                                        {random_coefficient(rng), random_hermitian(d, rng)}});
    const auto h = TimeDepOperator::linear_combination(
        {{Coefficient::constant(1.0), random_hermitian(d, rng)}, {random_coefficient(rng), random_hermitian(d, rng)}});
    const auto r = bound_report_at(a, h, random_state(d, rng), uniform(rng, 0.0, 3.0));
    const double scale = std::max(1.0, r.v2_mean);
    worst_cs = std::min(worst_cs, r.cs_residual / std::max(1.0, r.sigma * r.sigma * r.sigma_v * r.sigma_v));
    if (r.degenerate) continue;
    worst_r1 = std::min(worst_r1, r.residual_r1 / scale);
    worst_r2 = std::min(worst_r2, r.residual_r2 / scale);
  }
  rec.at_least("rate_bound_residual_random_rel", worst_r1, -1e-10);
  rec.at_least("mean_and_sigma_rate_bound_residual_random_rel", worst_r2, -1e-10);
  rec.at_least("cauchy_schwarz_certificate_random_rel", worst_cs, -1e-10);

  const Example1Run ex1 = example1_run();
  double worst_identity = 0.0;
  for (int k = 0; k < ex1.setup.grid.size(); ++k) {
    worst_identity =
        std::max(worst_identity, variance_rate_identity_defect(ex1.setup.a, ex1.setup.h, ex1.traj, k, ex1.setup.rate));
  }
  rec.at_most("variance_rate_identity_example1", worst_identity, 1e-4);

  double worst_accel = kInf;
  for (int k = 0; k < ex1.setup.grid.size(); ++k) {
    worst_accel = std::min(worst_accel, acceleration_limit(ex1.setup.h, ex1.traj.states[k], ex1.setup.grid.time(k)).residual);
  }
  double worst_mt = mt_integral_check(ex1.setup.h, ex1.traj).min_defect;
  for (int draw = 0; draw < 200; ++draw) {
    const Vec3 n = random_direction(rng);
    const Vec3 m = random_direction(rng);
    const auto h = TimeDepOperator::linear_combination(
        {{random_coefficient(rng), bloch_operator(n)}, {random_coefficient(rng), bloch_operator(m)}});
    const CVector psi0 = random_state(2, rng);
    PropagationOptions opts;
    opts.method = h.commuting_family() ? Method::exact_commuting : Method::midpoint;
    const auto traj = propagate(h, psi0, TimeGrid(0.0, 2.0, 2000), opts);
    for (int k = 0; k < traj.grid.size(); ++k) {
      worst_accel = std::min(worst_accel, acceleration_limit(h, traj.states[k], traj.grid.time(k)).residual);
    }
    worst_mt = std::min(worst_mt, mt_integral_check(h, traj).min_defect);
  }
  rec.at_least("acceleration_limit_example1_and_random_qubits", worst_accel, -1e-8);
  rec.at_least("mt_integral_defect_all_trajectories", worst_mt, -1e-6);

  {
    const double omega = 1.3;
    const auto h = TimeDepOperator::constant(omega * pauli(Axis::z));
    PropagationOptions opts;
    opts.method = Method::exact_commuting;
    const auto traj = propagate(h, qubit_plus(), TimeGrid(0.0, M_PI / (2.0 * omega), 2000), opts);
    const auto mt = mt_integral_check(h, traj);
    rec.at_most("mt_rabi_saturation_at_quarter_period", std::abs(mt.defect.back()), 1e-6);
    const auto times = mt_ml_times(omega * pauli(Axis::z), qubit_plus());
    rec.at_most("mt_time_rabi", std::abs(times.tau_mt.value_or(kInf) - M_PI / (2.0 * omega)), 1e-12);
  }

  bool unified_exact = true;
  for (int draw = 0; draw < 100; ++draw) {
    const Eigen::Index d = kDims[draw % kDims.size()];
    CMatrix h = random_hermitian(d, rng);
    h += (h.cwiseAbs().sum() + 1.0) * CMatrix::Identity(d, d);
    const auto r = mt_ml_times(h, random_state(d, rng));
    unified_exact = unified_exact && r.tau_unified && r.tau_mt && r.tau_ml &&
                    *r.tau_unified == std::max(*r.tau_mt, *r.tau_ml);
  }
  rec.holds("unified_time_is_max_of_mt_and_ml", unified_exact);

  {
    const auto snr = snr_trace(ex1.reports, ex1.setup.grid.dt());
    double worst = kInf;
    for (std::size_t k = 0; k < snr.t.size(); ++k) {
      if (snr.t[k] < 0.1 - 1e-12 || !snr.snr_finite[k]) continue;
      worst = std::min(worst, snr.snr[k] - snr.snr_min[k]);
    }
    rec.at_least("snr_floor_example1", worst, -1e-8);

    const auto coarse = snr_trace(ex1.reports, ex1.setup.grid.dt(), Quadrature::upper_riemann);
    const auto trap = snr_trace(ex1.reports, ex1.setup.grid.dt(), Quadrature::trapezoid);
    bool monotone = true;
    for (std::size_t k = 1; k < coarse.t.size(); ++k) monotone = monotone && !(coarse.snr_min[k] > trap.snr_min[k]);
    rec.holds("snr_floor_larger_integral_never_raises_floor", monotone);
  }

  {
    const Example1Run ex2 = example1_run(ScenarioKind::example2);
    double lo = kInf, hi = -kInf, v_lo = kInf, v_hi = -kInf;
    for (std::size_t k = 0; k < ex1.reports.size(); ++k) {
      const auto& r1 = ex1.reports[k];
      const auto& r2 = ex2.reports[k];
      if (r2.sigma > 0.0) {
        const double ratio = (r1.sigma * r1.sigma) / (r2.sigma * r2.sigma);
        lo = std::min(lo, ratio), hi = std::max(hi, ratio);
      }
      if (r2.v2_mean > 0.0) {
        const double ratio = r1.v2_mean / r2.v2_mean;
        v_lo = std::min(v_lo, ratio), v_hi = std::max(v_hi, ratio);
      }
    }
    rec.holds("snr_ratio_example2_over_example1_in_unit_interval", lo >= 0.0 && hi <= 1.0);
    rec.holds("v2_ratio_example1_over_example2_in_unit_interval", v_lo >= 0.0 && v_hi <= 1.0);
  }

  {
    const auto chain = higher_order_chain(ex1.setup.a, ex1.setup.h, 3);
    for (int n = 0; n <= 2; ++n) {
      double worst = kInf;
      for (int k = 0; k < ex1.setup.grid.size(); k += 5) {
        const auto c = chain_residual(chain[n], chain[n + 1], ex1.traj.states[k], ex1.setup.grid.time(k), ex1.setup.rate);
        worst = std::min(worst, c.residual);
      }
      rec.at_least("higher_order_chain_n" + std::to_string(n), worst, -1e-6);
    }
  }

  {
    // eps^2 = tan^2(xi) for example 1; compare against a fine central difference.
    const ScenarioParams p;
    const auto eps2 = [&](double t) {
      const double x = std::tan(2.0 * (p.omega0 / p.nu0) * std::sin(p.nu0 * t));
      return x * x;
    };
    double worst = 0.0;
    for (const auto& r : ex1.reports) {
      if (r.degenerate || std::abs(r.mu) < 0.3 * std::abs(r.t)) continue;
      const double h = 1e-5;
      const double fd = (eps2(r.t + h) - eps2(r.t - h)) / (2.0 * h);
      const double rate = relative_uncertainty_rate(r.mu, r.sigma, r.mu_dot, r.sigma_dot).value();
      worst = std::max(worst, std::abs(fd - rate) / std::max(1.0, std::abs(rate)));
    }
    rec.at_most("relative_uncertainty_rate_matches_finite_difference", worst, 1e-6);
  }

  for (const auto kind : {ScenarioKind::example1, ScenarioKind::example2}) {
    const auto r = run_scenario(ScenarioConfig::defaults(kind));
    rec.holds(to_string(kind) + "_runs_without_flags", r.ok());
  }
  {
    const auto r = run_scenario(ScenarioConfig::defaults(ScenarioKind::example3));
    rec.at_least("example3_min_residual", r.min_residual, -1e-8);
    rec.at_most("example3_max_norm_defect", r.max_norm_defect, 1e-9);
  }
  return rec.take();
}

// ---------------------------------------------------------------------------

SuiteResult bloch_suite(std::uint64_t seed) {
  Recorder rec("bloch", seed);
  Rng rng(seed ^ 0xc2b2ae3d27d4eb4fULL);

  double worst_stats = 0.0;
  double worst_geom = kInf;
  for (int draw = 0; draw < 500; ++draw) {
    const Vec3 a = random_direction(rng);
    const Vec3 h = uniform(rng, 0.1, 3.0) * random_direction(rng);
    const Vec3 m = uniform(rng, 0.1, 3.0) * random_direction(rng);
    const Vec3 md = uniform(rng, 0.0, 3.0) * random_direction(rng);
    const CMatrix mm = bloch_operator(m);
    const CMatrix mdm = bloch_operator(md);
    const TimeDepOperator op(
        2, [mm](double) { return mm; }, OperatorFn([mdm](double) { return mdm; }), false);
    const auto hop = TimeDepOperator::constant(bloch_operator(h));
    const auto r = bound_report_at(op, hop, state_from_bloch(a), 0.0);
    const auto s = bloch_stats(a, h, m, md);
    worst_stats = std::max({worst_stats, std::abs(r.mu - s.mean), std::abs(r.sigma * r.sigma - s.sigma_sq),
                            std::abs(r.mu_dot - s.v_mean), std::abs(r.v2_mean - s.v2_mean)});
    const auto g = geometric_residual(a, h, m, md);
    if (!g.degenerate) worst_geom = std::min(worst_geom, g.residual / std::max(1.0, g.rhs));
  }
  rec.at_most("bloch_closed_forms_match_matrices_random", worst_stats, 1e-10);
  rec.at_least("geometric_residual_random_rel", worst_geom, -1e-10);

  for (const auto kind : {ScenarioKind::example1, ScenarioKind::example2}) {
    const auto r = run_scenario(ScenarioConfig::defaults(kind));
    double worst = 0.0;
    for (const auto& [channel, dev] : r.bloch_max_dev) worst = std::max(worst, dev);
    rec.at_most(to_string(kind) + "_bloch_vs_matrix_channels", worst, 1e-8);
  }

  {
    const ScenarioParams p;
    const BlochModel ex1 = qubit_bloch_model(p, false);
    const Example1Run run = example1_run();
    bool coupled = true;
    double worst_span = 0.0;
    for (std::size_t k = 0; k < run.reports.size(); ++k) {
      const double t = run.reports[k].t;
      const auto span = tightness_span_test(ex1, t);
      worst_span = std::max(worst_span, span.defect);
      if (!run.reports[k].degenerate) coupled = coupled && span.member && run.reports[k].tight;
    }
    rec.holds("example1_span_member_and_tight_at_every_point", coupled);
    rec.at_most("example1_span_defect", worst_span, 1e-8);

    const BlochModel ex2 = qubit_bloch_model(p, true);
    const auto span2 = tightness_span_test(ex2, 1.0);
    const auto geo2 = geometric_residual(ex2, 1.0);
    rec.holds("example2_not_span_member_at_t1", !span2.member);
    rec.at_least("example2_geometric_residual_positive_at_t1", geo2.residual, 1e-6);

    const auto path = bloch_evolve(ex1.h, ex1.a(0.0), run.setup.grid);
    double worst_path = 0.0;
    for (std::size_t k = 0; k < path.a.size(); ++k) {
      worst_path = std::max(worst_path, (path.a[k] - bloch_vector(run.traj.states[k])).norm());
    }
    rec.at_most("bloch_evolution_matches_state_propagation", worst_path, 1e-8);
    rec.holds("bloch_evolution_norm_drift_within_limit", !path.too_coarse);
  }
  return rec.take();
}

// ---------------------------------------------------------------------------

SuiteResult truncation_suite(std::uint64_t seed) {
  Recorder rec("truncation", seed);

  const double err = truncation_error(5.0, 20);
  rec.at_least("truncation_error_5_20_lower", err, 1e-7);
  rec.at_most("truncation_error_5_20_upper", err, 1e-5);
  rec.at_most("truncated_mean_consistent_with_error", std::abs(std::abs(5.0 - truncated_mean_photon(5.0, 20)) - err),
              1e-12);

  const int s = recommended_cutoff(5.0, 1e-6);
  rec.holds("recommended_cutoff_is_smallest_meeting_eps",
            truncation_error(5.0, s) <= 1e-6 && truncation_error(5.0, s - 1) > 1e-6);

  bool decreasing = true;
  for (int k = 1; k < 80; ++k) decreasing = decreasing && truncation_error(5.0, k + 1) < truncation_error(5.0, k);
  rec.holds("truncation_error_strictly_decreasing_in_s", decreasing);

  {
    const FockSpace space(60);
    const cplx alpha(2.0, 1.0), z(0.5, 0.5);
    const auto prepared = displaced_squeezed_vacuum(space, {alpha, z});
    rec.at_most("prepared_state_norm_defect_s60", prepared.norm_defect, 1e-10);
    const double r = std::abs(z);
    const double expected = std::norm(alpha) + std::sinh(r) * std::sinh(r);
    rec.at_most("prepared_state_mean_photon_s60", std::abs(expectation(number_op(space), prepared.state) - expected),
                1e-8);
  }

  {
    ScenarioConfig c = ScenarioConfig::defaults(ScenarioKind::example3);
    c.params.s = 40;
    rec.at_most("example3_doubling_cutoff_from_40", truncation_stability(c).max_dev, 1e-5);
    c.params.s = 20;
    rec.holds("example3_s20_flags_tail_mass", run_example3(c).truncation_warning);
  }
  return rec.take();
}

}  // namespace

int SuiteResult::passed() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.pass; }));
}

int SuiteResult::failed() const { return static_cast<int>(checks.size()) - passed(); }

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"algebra", "bounds", "bloch", "truncation"};
  return names;
}

std::vector<SuiteResult> run_suites(const std::string& name, std::uint64_t seed) {
  std::vector<SuiteResult> out;
  const auto run_one = [&](const std::string& n) {
    if (n == "algebra") out.push_back(algebra_suite(seed));
    else if (n == "bounds") out.push_back(bounds_suite(seed));
    else if (n == "bloch") out.push_back(bloch_suite(seed));
    else if (n == "truncation") out.push_back(truncation_suite(seed));
    else throw std::invalid_argument("unknown suite '" + n + "'");
  };
  if (name == "all") {
    for (const auto& n : suite_names()) run_one(n);
  } else {
    run_one(name);
  }
  return out;
}

nlohmann::ordered_json suites_json(const std::vector<SuiteResult>& results) {
  using nlohmann::ordered_json;
  ordered_json suites = ordered_json::array();
  int passed = 0, failed = 0;
  for (const auto& s : results) {
    ordered_json checks = ordered_json::array();
    for (const auto& c : s.checks) {
      checks.push_back({{"name", c.name},
                        {"pass", c.pass},
                        {"value", std::isfinite(c.value) ? ordered_json(c.value) : ordered_json(nullptr)},
                        {"tolerance", c.tolerance}});
    }
    suites.push_back({{"suite", s.suite},
                      {"seed", s.seed},
                      {"passed", s.passed()},
                      {"failed", s.failed()},
                      {"checks", std::move(checks)}});
    passed += s.passed();
    failed += s.failed();
  }
  return {{"version", "1.0.0"}, {"passed", passed}, {"failed", failed}, {"ok", failed == 0}, {"suites", std::move(suites)}};
}

}  // namespace qfluct
