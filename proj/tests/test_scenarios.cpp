#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qfluct/hilbert.hpp"
#include "qfluct/scenarios.hpp"

using namespace qfluct;

namespace {

// Closed forms for A = a(t) sx (+ b(t) sz), H = w0 cos(nu0 t) sz, psi0 = |+>,
// written out directly from the rotating state.
struct QubitOracle {
  double w0, nu0;
  Coefficient a, b;
  bool with_b;

  double xi(double t) const { return 2.0 * w0 / nu0 * std::sin(nu0 * t); }
  double mu(double t) const { return a(t) * std::cos(xi(t)); }
  double sigma(double t) const {
    const double s = a(t) * std::sin(xi(t));
    return std::sqrt(s * s + (with_b ? b(t) * b(t) : 0.0));
  }
  double v2(double t) const {
    const double ad = a.derivative(t, 1), c = std::cos(nu0 * t);
    return ad * ad + 4.0 * w0 * w0 * a(t) * a(t) * c * c + (with_b ? std::pow(b.derivative(t, 1), 2) : 0.0);
  }
};

}  // namespace

TEST_CASE("example 1 against direct closed forms") {
  auto cfg = ScenarioConfig::defaults(ScenarioKind::example1);
  cfg.params.omega0 = 1.3;
  cfg.params.nu0 = 0.7;
  cfg.params.a = Coefficient::parse("cos t", 2.0);
  const auto rep = run_example1(cfg);
  CHECK(rep.ok());
  const QubitOracle o{1.3, 0.7, cfg.params.a, cfg.params.b, false};
  double worst = 0.0;
  for (const auto& r : rep.reports) {
    worst = std::max({worst, std::abs(r.mu - o.mu(r.t)), std::abs(r.sigma - o.sigma(r.t)),
                      std::abs(r.v2_mean - o.v2(r.t))});
  }
  CHECK(worst < 1e-9);
  CHECK(rep.tight_fraction == 1.0);
  CHECK(rep.min_residual >= -1e-8);
  for (const auto& [ch, dev] : rep.bloch_max_dev) CHECK_MESSAGE(dev < 1e-8, ch);
}

TEST_CASE("example 2 is loose except at the special points") {
  const auto cfg = ScenarioConfig::defaults(ScenarioKind::example2);
  const auto rep = run_example2(cfg);
  CHECK(rep.ok());
  CHECK(rep.tight_fraction < 0.05);
  CHECK(rep.min_residual > -1e-8);
  const QubitOracle o{1.0, 1.0, cfg.params.a, cfg.params.b, true};
  for (std::size_t k = 0; k < rep.reports.size(); k += 97) {
    const auto& r = rep.reports[k];
    CHECK(r.sigma == doctest::Approx(o.sigma(r.t)).epsilon(1e-9).scale(1.0));
    CHECK(r.v2_mean == doctest::Approx(o.v2(r.t)).epsilon(1e-9).scale(1.0));
  }
  REQUIRE_FALSE(rep.special_points.empty());
  for (const auto& sp : rep.special_points) {
    CHECK(std::abs(o.xi(sp.t) / M_PI - std::round(o.xi(sp.t) / M_PI)) < 1e-10);
    if (sp.degenerate) continue;
    CHECK(sp.residual == doctest::Approx(sp.expected).epsilon(1e-4));
  }
}

TEST_CASE("xi roots") {
  ScenarioParams p;
  const auto roots = xi_roots(p, 0.0, 5.0);
  // xi = 2 sin t, |xi| <= 2 < pi: only sin t = 0.
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == doctest::Approx(0.0));
  CHECK(roots[1] == doctest::Approx(M_PI));
  p.omega0 = 3.0;
  for (double t : xi_roots(p, 0.0, 5.0)) {
    const double xi = 6.0 * std::sin(t);
    CHECK(std::abs(xi / M_PI - std::round(xi / M_PI)) < 1e-10);
  }
  CHECK(xi_roots(p, 0.0, 5.0).size() > 2);
}

TEST_CASE("example 3 oscillator") {
  auto cfg = ScenarioConfig::defaults(ScenarioKind::example3);
  cfg.grid = TimeGrid(0.0, 2.0 * M_PI, 800);
  const auto rep = run_example3(cfg);
  CHECK(rep.ok());
  CHECK(rep.cutoff == 20);
  CHECK(rep.truncation_warning);
  CHECK(rep.tail_mass > cfg.tol.tail_mass);
  CHECK(rep.max_norm_defect < 1e-9);
  CHECK(rep.min_residual >= -1e-8);
  CHECK(rep.min_cs_residual >= -1e-8);
  CHECK(std::find(rep.warnings.begin(), rep.warnings.end(), "truncation_tail_mass") != rep.warnings.end());

  cfg.params.s = 60;
  const auto big = run_example3(cfg);
  CHECK_FALSE(big.truncation_warning);
  CHECK(big.tail_mass < 1e-8);
  // Mean of x at t = 0: sqrt(2) Re(alpha) for hbar = m = w = 1, theta(0) = cos 0.
  const double theta0 = std::cos(0.0);
  CHECK(big.reports.front().mu ==
        doctest::Approx(std::sqrt(2.0) * (std::cos(theta0) * 2.0 + std::sin(theta0) * 1.0)).epsilon(1e-8));
}

TEST_CASE("example 3 without an explicit cutoff uses the recommendation") {
  auto cfg = ScenarioConfig::defaults(ScenarioKind::example3);
  cfg.params.s.reset();
  cfg.grid = TimeGrid(0.0, 1.0, 50);
  CHECK(setup_scenario(cfg).cutoff == recommended_cutoff(std::norm(cfg.params.alpha), 1e-6));
}

TEST_CASE("picture equivalence") {
  for (const auto kind : {ScenarioKind::example1, ScenarioKind::example2}) {
    auto cfg = ScenarioConfig::defaults(kind);
    cfg.grid = TimeGrid(0.0, 5.0, 500);
    auto setup = setup_scenario(cfg);
    setup.prop.keep_propagators = true;
    const auto traj = propagate(setup.h, setup.psi0, setup.grid, setup.prop);
    CHECK(picture_equivalence_check(setup.a, setup.h, traj) < 1e-9);
    setup.prop.keep_propagators = false;
    CHECK_THROWS_AS(picture_equivalence_check(setup.a, setup.h, propagate(setup.h, setup.psi0, setup.grid, setup.prop)),
                    std::invalid_argument);
  }
}

TEST_CASE("custom scenario reproduces example 1") {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::custom;
  cfg.grid = TimeGrid(0.0, 3.0, 600);
  cfg.custom = CustomScenario{{{Coefficient::parse("cos t"), pauli(Axis::z)}},
                              {{Coefficient::t(), pauli(Axis::x)}},
                              qubit_plus()};
  const auto custom = run_custom(cfg);
  CHECK(custom.ok());
  auto ex = ScenarioConfig::defaults(ScenarioKind::example1);
  ex.grid = cfg.grid;
  const auto ref = run_example1(ex);
  double worst = 0.0;
  for (std::size_t k = 0; k < ref.reports.size(); ++k) {
    worst = std::max(worst, std::abs(custom.reports[k].v2_mean - ref.reports[k].v2_mean));
  }
  CHECK(worst < 1e-6);
  CHECK(to_string(run_scenario(cfg).config.kind) == "custom");
}

TEST_CASE("scenario setup validation") {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::custom;
  CHECK_THROWS_AS(setup_scenario(cfg), std::invalid_argument);
  auto ex1 = ScenarioConfig::defaults(ScenarioKind::example1);
  CHECK(setup_scenario(ex1).prop.method == Method::exact_commuting);
  CHECK(ex1.output_label() == "example1");
  ex1.label = "mine";
  CHECK(ex1.output_label() == "mine");
}

TEST_CASE("truncation stability reports every channel") {
  auto cfg = ScenarioConfig::defaults(ScenarioKind::example3);
  cfg.grid = TimeGrid(0.0, 1.0, 100);
  cfg.params.s = 40;
  const auto st = truncation_stability(cfg);
  CHECK(st.s == 40);
  CHECK(st.channel_max_dev.size() == 8);
  CHECK(st.max_dev < 1e-5);
}
