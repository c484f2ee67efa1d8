#include "qfluct/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qfluct/errors.hpp"

namespace qfluct {

// ---------------------------------------------------------------------------
// Finite differences and TimeDepOperator

CMatrix central_difference(const OperatorFn& f, double t, const FdOptions& fd) {
  const double h = fd.step;
  const CMatrix d1 = (f(t + h) - f(t - h)) / (2.0 * h);
  if (!fd.richardson) return d1;
  const CMatrix d2 = (f(t + 0.5 * h) - f(t - 0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

TimeDepOperator::TimeDepOperator(Eigen::Index dim, DerivativeFn fn, int analytic_order,
                                 bool commuting_family, FdOptions fd)
    : dim_(dim), fn_(std::move(fn)), analytic_order_(analytic_order), commuting_(commuting_family), fd_(fd) {
  if (dim_ < 1) throw DimensionError("TimeDepOperator: dim must be >= 1");
  if (analytic_order_ < 0) throw std::invalid_argument("TimeDepOperator: negative analytic order");
  if (!(fd_.step > 0.0)) throw std::invalid_argument("TimeDepOperator: finite-difference step must be > 0");
}

TimeDepOperator::TimeDepOperator(Eigen::Index dim, OperatorFn value, std::optional<OperatorFn> dvalue,
                                 bool commuting_family, FdOptions fd)
    : TimeDepOperator(
          dim,
          [value = std::move(value), dvalue](double t, int k) -> CMatrix {
            if (k == 0) return value(t);
            return (*dvalue)(t);
          },
          dvalue ? 1 : 0, commuting_family, fd) {}

TimeDepOperator TimeDepOperator::constant(CMatrix m) {
  require_square(m, "TimeDepOperator::constant");
  const Eigen::Index d = m.rows();
  return TimeDepOperator(
      d,
      [m = std::move(m)](double, int k) -> CMatrix {
        if (k == 0) return m;
        return CMatrix::Zero(m.rows(), m.cols());
      },
      kUnlimited, true);
}

TimeDepOperator TimeDepOperator::linear_combination(std::vector<std::pair<Coefficient, CMatrix>> terms) {
  if (terms.empty()) throw std::invalid_argument("linear_combination: no terms");
  const Eigen::Index d = terms.front().second.rows();
  bool commuting = true;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    require_same_dim(terms[i].second, terms.front().second, "linear_combination");
    for (std::size_t j = 0; j < i; ++j) {
      const CMatrix c = commutator(terms[i].second, terms[j].second);
      if (c.cwiseAbs().maxCoeff() > 1e-12) commuting = false;
    }
  }
  return TimeDepOperator(
      d,
      [terms = std::move(terms), d](double t, int k) -> CMatrix {
        CMatrix out = CMatrix::Zero(d, d);
        for (const auto& [coef, m] : terms) {
          const double c = coef.derivative(t, k);
          if (c != 0.0) out += c * m;
        }
        return out;
      },
      kUnlimited, commuting);
}

CMatrix TimeDepOperator::analytic_derivative(double t, int k) const {
  if (k > analytic_order_) throw std::out_of_range("TimeDepOperator: derivative order not analytic");
  return fn_(t, k);
}

CMatrix TimeDepOperator::derivative(double t) const {
  if (analytic_order_ >= 1) return fn_(t, 1);
  const auto& f = fn_;
  return central_difference([&f](double s) { return f(s, 0); }, t, fd_);
}

TimeDepOperator TimeDepOperator::derivative_operator() const {
  if (analytic_order_ >= 1) {
    const int order = analytic_order_ == kUnlimited ? kUnlimited : analytic_order_ - 1;
    return TimeDepOperator(
        dim_, [fn = fn_](double t, int k) { return fn(t, k + 1); }, order, commuting_, fd_);
  }
  return TimeDepOperator(
      dim_,
      [fn = fn_, fd = fd_](double t, int) {
        return central_difference([&fn](double s) { return fn(s, 0); }, t, fd);
      },
      0, commuting_, fd_);
}

TimeDepOperator TimeDepOperator::without_analytic_derivatives() const {
  return TimeDepOperator(dim_, fn_, 0, commuting_, fd_);
}

TimeDepOperator TimeDepOperator::with_fd(FdOptions fd) const {
  return TimeDepOperator(dim_, fn_, analytic_order_, commuting_, fd);
}

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {
namespace {

constexpr int kMaxDepth = 40;
constexpr int kMinDepth = 3;

template <class T, class F, class Norm>
T simpson_step(const F& f, double a, double b, const T& fa, const T& fm, const T& fb, const T& whole,
               double tol, int depth, const Norm& norm) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const T flm = f(lm);
  const T frm = f(rm);
  const T left = ((m - a) / 6.0) * (fa + 4.0 * flm + fm);
  const T right = ((b - m) / 6.0) * (fm + 4.0 * frm + fb);
  const T delta = left + right - whole;
  if (depth >= kMaxDepth || (depth >= kMinDepth && norm(delta) <= 15.0 * tol)) {
    return left + right + delta / 15.0;
  }
  return simpson_step<T>(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, norm) +
         simpson_step<T>(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, norm);
}

template <class T, class F, class Norm>
T simpson(const F& f, double a, double b, double tol, const Norm& norm) {
  const T fa = f(a);
  const T fb = f(b);
  const T fm = f(0.5 * (a + b));
  const T whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  return simpson_step<T>(f, a, b, fa, fm, fb, whole, tol, 0, norm);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  return simpson<double>(f, a, b, tol, [](double x) { return std::abs(x); });
}

CMatrix adaptive_simpson(const OperatorFn& f, double a, double b, double tol) {
  if (a == b) {
    const CMatrix fa = f(a);
    return CMatrix::Zero(fa.rows(), fa.cols());
  }
  return simpson<CMatrix>(f, a, b, tol, [](const CMatrix& m) { return m.cwiseAbs().maxCoeff(); });
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Grid and trajectory

TimeGrid::TimeGrid(double start, double stop, int steps) : t0(start), t1(stop), n_steps(steps) {
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0)) {
    throw std::invalid_argument("TimeGrid: need finite t1 > t0");
  }
  if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
}

double Trajectory::max_norm_defect() const {
  double m = 0.0;
  for (double d : norm_defects) m = std::max(m, d);
  return m;
}

double unitary_defect(const Trajectory& traj) {
  if (traj.states.empty()) throw std::invalid_argument("unitary_defect: empty trajectory");
  double m = 0.0;
  for (const auto& psi : traj.states) m = std::max(m, std::abs(psi.norm() - 1.0));
  return m;
}

namespace {

void check_inputs(const TimeDepOperator& h, const CVector& psi0, const PropagationOptions& opts) {
  if (h.dim() != psi0.size()) {
    throw DimensionError("propagate: Hamiltonian dim " + std::to_string(h.dim()) + " vs state dim " +
                         std::to_string(psi0.size()));
  }
  const Defect n = is_normalized(psi0, opts.norm_tol);
  if (!n.ok) throw NormalizationError("propagate: initial state not normalized (defect " +
                                      std::to_string(n.max_defect) + ")");
  if (opts.method == Method::exact_commuting && !h.commuting_family()) {
    throw Error("propagate: exact_commuting requested for a Hamiltonian not flagged as a commuting family");
  }
  if (!(opts.hbar > 0.0)) throw std::invalid_argument("propagate: hbar must be > 0");
}

void finish(Trajectory& traj, const PropagationOptions& opts) {
  traj.norm_defects.resize(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    traj.norm_defects[k] = std::abs(traj.states[k].norm() - 1.0);
    if (traj.norm_defects[k] > opts.norm_budget) traj.budget_exceeded = true;
  }
}

Trajectory propagate_midpoint(const TimeDepOperator& h, const CVector& psi0, const TimeGrid& grid,
                              const PropagationOptions& opts) {
  Trajectory traj;
  traj.grid = grid;
  traj.states.reserve(grid.size());
  traj.states.push_back(psi0);
  CMatrix cumulative;
  if (opts.keep_propagators) {
    cumulative = identity(psi0.size());
    traj.propagators.push_back(cumulative);
  }
  const double dt = grid.dt();
  for (int k = 0; k < grid.n_steps; ++k) {
    const double tm = grid.time(k) + 0.5 * dt;
    const CMatrix step = herm_expm(h(tm), cplx(0.0, -dt / opts.hbar));
    traj.states.push_back(step * traj.states.back());
    if (opts.keep_propagators) {
      cumulative = step * cumulative;
      traj.propagators.push_back(cumulative);
    }
  }
  finish(traj, opts);
  return traj;
}

// H(t) = f(t) H0 for a fixed matrix H0, detected by probing a handful of times.
struct ScalarFamily {
  CMatrix h0;
  double h0_norm_sq = 0.0;
  double coefficient(const CMatrix& ht) const {
    return (h0.adjoint() * ht).trace().real() / h0_norm_sq;
  }
};

std::optional<ScalarFamily> detect_scalar_family(const TimeDepOperator& h, const TimeGrid& grid) {
  constexpr std::array<double, 7> fractions{0.0, 0.1234567, 0.25, 0.3819660, 0.5, 0.7071068, 1.0};
  std::vector<CMatrix> probes;
  probes.reserve(fractions.size());
  for (double f : fractions) probes.push_back(h(grid.t0 + f * (grid.t1 - grid.t0)));
  const auto it = std::max_element(probes.begin(), probes.end(),
                                   [](const CMatrix& a, const CMatrix& b) { return a.norm() < b.norm(); });
  ScalarFamily fam{*it, it->squaredNorm()};
  if (fam.h0_norm_sq == 0.0) return std::nullopt;
  for (const auto& p : probes) {
    const double c = fam.coefficient(p);
    if ((p - c * fam.h0).norm() > 1e-12 * std::max(1.0, p.norm())) return std::nullopt;
  }
  return fam;
}

Trajectory propagate_exact(const TimeDepOperator& h, const CVector& psi0, const TimeGrid& grid,
                           const PropagationOptions& opts, bool parallel) {
  const int n = grid.n_steps;
  const double tol = opts.quad_tol / n;
  const auto family = detect_scalar_family(h, grid);

  Trajectory traj;
  traj.grid = grid;
  traj.states.resize(grid.size());
  if (opts.keep_propagators) traj.propagators.resize(grid.size());

  if (family) {
    std::vector<double> pieces(n);
    const auto f = [&h, &family](double t) { return family->coefficient(h(t)); };
#pragma omp parallel for schedule(static) if (parallel)
    for (int k = 0; k < n; ++k) pieces[k] = detail::adaptive_simpson(f, grid.time(k), grid.time(k + 1), tol);

    std::vector<double> integral(grid.size(), 0.0);
    for (int k = 0; k < n; ++k) integral[k + 1] = integral[k] + pieces[k];

    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(family->h0));
    if (eig.info() != Eigen::Success) throw EigenSolverError("propagate: eigendecomposition failed");
    const CMatrix& v = eig.eigenvectors();
    const Eigen::VectorXd& e = eig.eigenvalues();
    const CVector coeffs = v.adjoint() * psi0;

#pragma omp parallel for schedule(static) if (parallel)
    for (int k = 0; k < grid.size(); ++k) {
      CVector phases(e.size());
      for (Eigen::Index j = 0; j < e.size(); ++j) {
        phases[j] = std::exp(cplx(0.0, -integral[k] * e[j] / opts.hbar));
      }
      traj.states[k] = v * phases.cwiseProduct(coeffs);
      if (opts.keep_propagators) traj.propagators[k] = v * phases.asDiagonal() * v.adjoint();
    }
  } else {
    const OperatorFn f = [&h](double t) { return h(t); };
    std::vector<CMatrix> pieces(n);
#pragma omp parallel for schedule(static) if (parallel)
    for (int k = 0; k < n; ++k) pieces[k] = detail::adaptive_simpson(f, grid.time(k), grid.time(k + 1), tol);

    std::vector<CMatrix> integral(grid.size());
    integral[0] = CMatrix::Zero(h.dim(), h.dim());
    for (int k = 0; k < n; ++k) integral[k + 1] = integral[k] + pieces[k];

#pragma omp parallel for schedule(static) if (parallel)
    for (int k = 0; k < grid.size(); ++k) {
      const CMatrix u = herm_expm(integral[k], cplx(0.0, -1.0 / opts.hbar), 1e-10);
      traj.states[k] = u * psi0;
      if (opts.keep_propagators) traj.propagators[k] = u;
    }
  }
  finish(traj, opts);
  return traj;
}

}  // namespace

Trajectory propagate(const TimeDepOperator& h, const CVector& psi0, const TimeGrid& grid,
                     const PropagationOptions& opts) {
  check_inputs(h, psi0, opts);
  if (opts.method == Method::midpoint) return propagate_midpoint(h, psi0, grid, opts);
  return propagate_exact(h, psi0, grid, opts, true);
}

namespace reference {

Trajectory propagate(const TimeDepOperator& h, const CVector& psi0, const TimeGrid& grid,
                     const PropagationOptions& opts) {
  check_inputs(h, psi0, opts);
  if (opts.method == Method::midpoint) return propagate_midpoint(h, psi0, grid, opts);
  return propagate_exact(h, psi0, grid, opts, false);
}

}  // namespace reference

}  // namespace qfluct
