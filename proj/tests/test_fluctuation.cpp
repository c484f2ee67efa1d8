#include <doctest.h>

#include <array>
#include <cmath>

#include "qfluct/errors.hpp"
#include "qfluct/fluctuation.hpp"
#include "qfluct/hilbert.hpp"
#include "qfluct/sampling.hpp"

using namespace qfluct;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

Coefficient pick(Rng& rng) {
  static const char* names[] = {"t", "t^2", "cos t", "sin t", "const"};
  return Coefficient::parse(names[std::uniform_int_distribution<int>(0, 4)(rng)], uniform(rng, -2.0, 2.0));
}

struct Problem {
  TimeDepOperator a;
  TimeDepOperator h;
  CVector psi;
  double t;
};

Problem random_problem(Eigen::Index d, Rng& rng) {
  auto a = TimeDepOperator::linear_combination(
      {{Coefficient::constant(1.0), random_hermitian(d, rng)}, {pick(rng), random_hermitian(d, rng)}});
  auto h = TimeDepOperator::linear_combination(
      {{Coefficient::constant(1.0), random_hermitian(d, rng)}, {pick(rng), random_hermitian(d, rng)}});
  return {std::move(a), std::move(h), random_state(d, rng), uniform(rng, 0.0, 3.0)};
}

}  // namespace

TEST_CASE("statistics against textbook formulas") {
  Rng rng(21);
  for (int draw = 0; draw < 100; ++draw) {
    const Eigen::Index d = 2 + draw % 6;
    const CMatrix a = random_hermitian(d, rng), b = random_hermitian(d, rng);
    const CVector psi = random_state(d, rng);
    const double ma = psi.dot(a * psi).real();
    const double mb = psi.dot(b * psi).real();
    CHECK(expectation(a, psi) == doctest::Approx(ma));
    CHECK(variance(a, psi) == doctest::Approx(psi.dot(a * a * psi).real() - ma * ma).epsilon(1e-9));
    CHECK(covariance(a, b, psi) == doctest::Approx(0.5 * psi.dot(anticommutator(a, b) * psi).real() - ma * mb)
                                       .epsilon(1e-9)
                                       .scale(1.0));
    CHECK(covariance(a, a, psi) == doctest::Approx(variance(a, psi)));
  }
}

TEST_CASE("eigenstates have zero variance") {
  const CVector up = qubit_basis(0);
  CHECK(variance(pauli(Axis::z), up) == 0.0);
  CHECK(std_dev(pauli(Axis::x), up) == doctest::Approx(1.0));
}

TEST_CASE("statistics reject bad input") {
  CMatrix bad = pauli(Axis::x);
  bad(0, 1) = 2.0;
  CHECK_THROWS_AS(expectation(bad, qubit_plus()), HermiticityError);
  CHECK_THROWS_AS(variance(pauli(Axis::x), 2.0 * qubit_plus()), NormalizationError);
  CHECK_THROWS_AS(variance(pauli(Axis::x), CVector::Zero(3)), DimensionError);
}

TEST_CASE("velocity observable for the modulated qubit") {
  // H = cos(t) sz, A = t sx: v = sx - 2 t cos(t) sy
  const auto h = TimeDepOperator::linear_combination({{Coefficient::parse("cos t"), pauli(Axis::z)}});
  const auto a = TimeDepOperator::linear_combination({{Coefficient::t(), pauli(Axis::x)}});
  for (double t : {0.0, 0.8, 2.5}) {
    const CMatrix expected = pauli(Axis::x) - 2.0 * t * std::cos(t) * pauli(Axis::y);
    CHECK(max_abs(velocity_observable(a, h, t) - expected) < 1e-14);
  }
  // hbar divides the commutator term only.
  const auto h2 = TimeDepOperator::linear_combination({{Coefficient::parse("cos t", 2.0), pauli(Axis::z)}});
  CHECK(max_abs(velocity_observable(a, h2, 0.8, 2.0) - velocity_observable(a, h, 0.8)) < 1e-14);
}

TEST_CASE("Ehrenfest: <v_A> is the rate of <A> along the evolution") {
  Rng rng(8);
  for (int draw = 0; draw < 20; ++draw) {
    const Eigen::Index d = 2 + draw % 4;
    const auto p = random_problem(d, rng);
    PropagationOptions opts;
    const double dt = 1e-4;
    const auto traj = propagate(p.h, p.psi, TimeGrid(p.t - dt, p.t + dt, 40), opts);
    const StatOptions s{1e-10, 1e-8, 1e-10};
    const double fd = (expectation(p.a(p.t + dt), traj.states.back(), s) - expectation(p.a(p.t - dt), traj.states.front(), s)) /
                      (2.0 * dt);
    const double v = expectation(velocity_observable(p.a, p.h, p.t), traj.states[20], s);
    CHECK(fd == doctest::Approx(v).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("fluctuation bounds hold on random problems") {
  Rng rng(34);
  int checked = 0;
  for (int draw = 0; draw < 400; ++draw) {
    const Eigen::Index d = std::array<Eigen::Index, 4>{2, 3, 4, 8}[draw % 4];
    const auto p = random_problem(d, rng);
    const auto r = bound_report_at(p.a, p.h, p.psi, p.t);
    const double scale = std::max(1.0, r.v2_mean);
    CHECK(r.cs_residual >= -1e-10 * std::max(1.0, r.sigma * r.sigma * r.sigma_v * r.sigma_v));
    if (r.degenerate) continue;
    ++checked;
    CHECK(std::abs(r.sigma_dot) <= r.sigma_v + 1e-10 * scale);
    CHECK(r.lhs_sq_sum() <= r.v2_mean + 1e-10 * scale);
    CHECK(r.residual_r2 == doctest::Approx(r.residual_r1).epsilon(1e-8).scale(scale));
    CHECK(r.sigma_dot == doctest::Approx(sigma_rate(p.a, p.h, p.psi, p.t)));
  }
  CHECK(checked > 300);
}

TEST_CASE("variance rate identity on a random trajectory") {
  Rng rng(55);
  const auto p = random_problem(3, rng);
  PropagationOptions opts;
  RateOptions rate;
  rate.stats.norm_tol = 1e-8;
  double prev = 0.0;
  for (int n : {200, 400}) {
    const auto traj = propagate(p.h, p.psi, TimeGrid(0.0, 1.0, n), opts);
    const double err = variance_rate_identity_defect(p.a, p.h, traj, n / 2, rate);
    if (prev > 0.0) CHECK(prev / err > 3.0);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("degenerate dispersion") {
  // A = sz on |0>: sigma = 0.
  const auto a = TimeDepOperator::constant(pauli(Axis::z));
  const auto h = TimeDepOperator::constant(pauli(Axis::x));
  const auto r = bound_report_at(a, h, qubit_basis(0), 0.0);
  CHECK(r.degenerate);
  CHECK_FALSE(r.tight);
  CHECK(std::isnan(r.sigma_dot));
  CHECK(std::isnan(r.residual_r2));
  CHECK(r.cs_residual == doctest::Approx(0.0));
  CHECK(r.v2_mean > 0.0);
  CHECK_THROWS_AS(sigma_rate(a, h, qubit_basis(0), 0.0), DegenerateDispersion);
}

TEST_CASE("parallel bound series is bitwise identical to the serial reference") {
  Rng rng(9);
  const auto p = random_problem(4, rng);
  PropagationOptions opts;
  const auto traj = propagate(p.h, p.psi, TimeGrid(0.0, 2.0, 500), opts);
  RateOptions rate;
  rate.stats.norm_tol = 1e-8;
  const auto par = bound_series(p.a, p.h, traj, rate);
  const auto ser = reference::bound_series(p.a, p.h, traj, rate);
  REQUIRE(par.size() == ser.size());
  bool identical = true;
  for (std::size_t k = 0; k < par.size(); ++k) {
    identical = identical && par[k].mu == ser[k].mu && par[k].sigma == ser[k].sigma &&
                par[k].sigma_dot == ser[k].sigma_dot && par[k].v2_mean == ser[k].v2_mean &&
                par[k].cs_residual == ser[k].cs_residual;
  }
  CHECK(identical);
}

TEST_CASE("bound series propagates errors from worker threads") {
  const auto a = TimeDepOperator::constant(pauli(Axis::x));
  const auto h = TimeDepOperator::constant(pauli(Axis::z));
  Trajectory traj;
  traj.grid = TimeGrid(0.0, 1.0, 3);
  traj.states = {qubit_plus(), qubit_plus(), 2.0 * qubit_plus(), qubit_plus()};
  CHECK_THROWS_AS(bound_series(a, h, traj), NormalizationError);
}

TEST_CASE("velocity operator derivatives follow the Leibniz rule") {
  Rng rng(13);
  const auto p = random_problem(3, rng);
  const auto v = velocity_operator(p.a, p.h);
  CHECK(v.analytic_order() == TimeDepOperator::kUnlimited);
  const auto fd = v.without_analytic_derivatives().with_fd({1e-3, true});
  for (double t : {0.3, 1.1}) CHECK(max_abs(v.derivative(t) - fd.derivative(t)) < 1e-8);
}

TEST_CASE("higher-order chain on the modulated qubit") {
  const auto h = TimeDepOperator::linear_combination({{Coefficient::parse("cos t"), pauli(Axis::z)}});
  const auto a = TimeDepOperator::linear_combination({{Coefficient::t(), pauli(Axis::x)}});
  const auto chain = higher_order_chain(a, h, 3);
  REQUIRE(chain.size() == 4);
  CHECK(max_abs(chain[1](0.4) - velocity_observable(a, h, 0.4)) < 1e-14);
  PropagationOptions opts;
  opts.method = Method::exact_commuting;
  const auto traj = propagate(h, qubit_plus(), TimeGrid(0.0, 5.0, 200), opts);
  for (int n = 0; n <= 2; ++n) {
    for (int k = 0; k < traj.grid.size(); ++k) {
      const auto c = chain_residual(chain[n], chain[n + 1], traj.states[k], traj.grid.time(k));
      CHECK(c.residual >= -1e-8);
    }
  }
  CHECK_THROWS_AS(higher_order_chain(a, h, 0), std::invalid_argument);
}
