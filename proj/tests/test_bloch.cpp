#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qfluct/bloch.hpp"
#include "qfluct/errors.hpp"
#include "qfluct/fluctuation.hpp"
#include "qfluct/hilbert.hpp"
#include "qfluct/sampling.hpp"
#include "qfluct/scenarios.hpp"

using namespace qfluct;

namespace {

CMatrix dot_sigma(const Vec3& v) {
  return v.x() * pauli(Axis::x) + v.y() * pauli(Axis::y) + v.z() * pauli(Axis::z);
}

// Pure state whose Bloch vector is n, by rotating |0>.
CVector from_bloch(const Vec3& n) {
  const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
  const double phi = std::atan2(n.y(), n.x());
  CVector psi(2);
  psi << std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi);
  return psi;
}

}  // namespace

TEST_CASE("Bloch vector of standard states") {
  CHECK((bloch_vector(qubit_plus()) - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK((bloch_vector(qubit_basis(1)) - Vec3(0, 0, -1)).norm() < 1e-15);
  CHECK_THROWS_AS(bloch_vector(CVector::Zero(3)), DimensionError);
  Rng rng(1);
  for (int draw = 0; draw < 20; ++draw) {
    const Vec3 n = random_direction(rng);
    CHECK((bloch_vector(from_bloch(n)) - n).norm() < 1e-14);
  }
}

TEST_CASE("closed-form Bloch statistics match the matrix pipeline") {
  Rng rng(77);
  for (int draw = 0; draw < 200; ++draw) {
    const Vec3 a = random_direction(rng);
    const Vec3 h = uniform(rng, 0.1, 2.0) * random_direction(rng);
    const Vec3 m = uniform(rng, 0.1, 2.0) * random_direction(rng);
    const Vec3 md = uniform(rng, 0.0, 2.0) * random_direction(rng);
    const CMatrix mm = dot_sigma(m), mdm = dot_sigma(md);
    const TimeDepOperator op(2, [mm](double) { return mm; }, OperatorFn([mdm](double) { return mdm; }), false);
    const auto r = bound_report_at(op, TimeDepOperator::constant(dot_sigma(h)), from_bloch(a), 0.0);
    const BlochStats s = bloch_stats(a, h, m, md);
    CHECK(r.mu == doctest::Approx(s.mean).epsilon(1e-12).scale(1.0));
    CHECK(r.sigma * r.sigma == doctest::Approx(s.sigma_sq).epsilon(1e-12).scale(1.0));
    CHECK(r.mu_dot == doctest::Approx(s.v_mean).epsilon(1e-12).scale(1.0));
    CHECK(r.v2_mean == doctest::Approx(s.v2_mean).epsilon(1e-12).scale(1.0));

    const auto g = geometric_residual(a, h, m, md);
    if (!g.degenerate) {
      CHECK(g.residual >= -1e-10 * std::max(1.0, g.rhs));
      // The geometric residual is the matrix residual_r1.
      CHECK(g.residual == doctest::Approx(r.residual_r1).epsilon(1e-9).scale(std::max(1.0, g.rhs)));
    }
  }
}

TEST_CASE("Bloch precession about a static field") {
  const double w0 = 0.7;
  const auto path = bloch_evolve([w0](double) { return Vec3(0, 0, w0); }, Vec3(1, 0, 0), TimeGrid(0.0, 4.0, 4000));
  for (std::size_t k = 0; k < path.a.size(); ++k) {
    const double t = path.grid.time(static_cast<int>(k));
    CHECK((path.a[k] - Vec3(std::cos(2 * w0 * t), std::sin(2 * w0 * t), 0)).norm() < 1e-10);
  }
  CHECK_FALSE(path.too_coarse);
  const auto coarse = bloch_evolve([](double) { return Vec3(0, 0, 5.0); }, Vec3(1, 0, 0), TimeGrid(0.0, 4.0, 20));
  CHECK(coarse.too_coarse);
}

TEST_CASE("Bloch evolution agrees with state propagation") {
  const auto h = TimeDepOperator::linear_combination(
      {{Coefficient::parse("cos t"), pauli(Axis::z)}, {Coefficient::parse("sin t", 0.5), pauli(Axis::x)}});
  const TimeGrid grid(0.0, 2.0, 2000);
  PropagationOptions opts;
  const auto traj = propagate(h, qubit_plus(), grid, opts);
  const auto path = bloch_evolve([](double t) { return Vec3(0.5 * std::sin(t), 0, std::cos(t)); }, Vec3(1, 0, 0), grid);
  // Midpoint states are second order; the RK4 path is much finer.
  double worst = 0.0;
  for (std::size_t k = 0; k < path.a.size(); ++k) worst = std::max(worst, (path.a[k] - bloch_vector(traj.states[k])).norm());
  CHECK(worst < 1e-5);
}

TEST_CASE("span test couples to tightness on the examples") {
  const ScenarioParams p;
  const auto ex1 = qubit_bloch_model(p, false);
  const auto ex2 = qubit_bloch_model(p, true);
  for (double t : {0.05, 0.5, 1.0, 1.7, 2.9, 4.4}) {
    CHECK(tightness_span_test(ex1, t).member);
    CHECK(geometric_residual(ex1, t).residual == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK_FALSE(tightness_span_test(ex2, t).member);
    CHECK(geometric_residual(ex2, t).residual > 1e-6);
  }
  CHECK(geometric_residual(ex2, 1.0).residual == doctest::Approx(0.00735826).epsilon(1e-5));
}

TEST_CASE("finite-difference m_dot fallback") {
  const ScenarioParams p;
  auto model = qubit_bloch_model(p, true);
  const Vec3 analytic = model.mdot(1.3);
  model.m_dot.reset();
  CHECK((model.mdot(1.3) - analytic).norm() < 1e-8);
}

TEST_CASE("degenerate geometry") {
  // m parallel to a: m_perp = 0.
  const auto g = geometric_residual(Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, 0, 2), Vec3(1, 0, 0));
  CHECK(g.degenerate);
  CHECK(g.residual == g.rhs);
}
