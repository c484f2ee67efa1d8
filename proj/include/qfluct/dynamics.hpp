#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "qfluct/coefficient.hpp"
#include "qfluct/linops.hpp"

namespace qfluct {

using OperatorFn = std::function<CMatrix(double)>;

/// Finite-difference settings used when an operator has no analytic derivative.
struct FdOptions {
  double step = 1e-6;
  bool richardson = false;  ///< (4 D(h/2) - D(h)) / 3 instead of plain central difference
};

/// Central difference of a matrix-valued map at t.
CMatrix central_difference(const OperatorFn& f, double t, const FdOptions& fd);

// A Hermitian operator-valued function of time, with analytic time
// derivatives up to analytic_order() and a finite-difference fallback beyond.
class TimeDepOperator {
 public:
  /// fn(t, k) returns the k-th time derivative for 0 <= k <= analytic_order.
  using DerivativeFn = std::function<CMatrix(double, int)>;
  static constexpr int kUnlimited = std::numeric_limits<int>::max();

  TimeDepOperator(Eigen::Index dim, DerivativeFn fn, int analytic_order, bool commuting_family,
                  FdOptions fd = {});

  /// Value plus optional analytic first derivative.
  TimeDepOperator(Eigen::Index dim, OperatorFn value, std::optional<OperatorFn> dvalue,
                  bool commuting_family, FdOptions fd = {});

  static TimeDepOperator constant(CMatrix m);
  /// sum_k c_k(t) M_k. Analytic to every order; flagged commuting when the
  /// M_k pairwise commute.
  static TimeDepOperator linear_combination(std::vector<std::pair<Coefficient, CMatrix>> terms);

  CMatrix value(double t) const { return fn_(t, 0); }
  CMatrix operator()(double t) const { return fn_(t, 0); }
  /// Analytic d/dt when available, central difference otherwise.
  CMatrix derivative(double t) const;
  TimeDepOperator derivative_operator() const;
  /// Same values, every derivative taken by finite differences.
  TimeDepOperator without_analytic_derivatives() const;

  int analytic_order() const noexcept { return analytic_order_; }
  bool has_analytic_derivative() const noexcept { return analytic_order_ >= 1; }
  bool commuting_family() const noexcept { return commuting_; }
  Eigen::Index dim() const noexcept { return dim_; }
  const FdOptions& fd() const noexcept { return fd_; }
  TimeDepOperator with_fd(FdOptions fd) const;

  /// Raw k-th derivative; k must not exceed analytic_order().
  CMatrix analytic_derivative(double t, int k) const;

 private:
  Eigen::Index dim_;
  DerivativeFn fn_;
  int analytic_order_;
  bool commuting_;
  FdOptions fd_;
};

struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  int n_steps = 1;

  TimeGrid() = default;
  TimeGrid(double start, double stop, int steps);

  double dt() const noexcept { return (t1 - t0) / n_steps; }
  double time(int k) const noexcept { return k == n_steps ? t1 : t0 + (t1 - t0) * k / n_steps; }
  int size() const noexcept { return n_steps + 1; }
};

enum class Method { exact_commuting, midpoint };

struct PropagationOptions {
  Method method = Method::midpoint;
  double hbar = 1.0;
  double norm_budget = 1e-8;
  double norm_tol = Tolerances{}.norm;  ///< applied to psi0
  double quad_tol = 1e-12;              ///< adaptive Simpson absolute tolerance over the grid
  bool keep_propagators = false;        ///< store cumulative U(t_k)
};

struct Trajectory {
  TimeGrid grid;
  std::vector<CVector> states;
  std::vector<double> norm_defects;
  std::vector<CMatrix> propagators;  ///< empty unless keep_propagators
  bool budget_exceeded = false;

  double max_norm_defect() const;
};

/// exact_commuting: U(t) = exp(-(i/hbar) int_{t0}^{t} H), evaluated
/// independently at every grid time (OpenMP across times).
/// midpoint: U_k = exp(-(i/hbar) dt H(t_k + dt/2)), composed step by step.
Trajectory propagate(const TimeDepOperator& h, const CVector& psi0, const TimeGrid& grid,
                     const PropagationOptions& opts);

/// max_k | ||psi(t_k)|| - 1 |, recomputed from the stored states.
double unitary_defect(const Trajectory& traj);

namespace reference {
/// Serial propagate; bitwise-identical output to qfluct::propagate.
Trajectory propagate(const TimeDepOperator& h, const CVector& psi0, const TimeGrid& grid,
                     const PropagationOptions& opts);
}  // namespace reference

namespace detail {

/// Adaptive Simpson with Richardson correction for scalar integrands.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);
/// Entrywise adaptive Simpson for matrix integrands (max-entry error norm).
CMatrix adaptive_simpson(const OperatorFn& f, double a, double b, double tol);

}  // namespace detail

}  // namespace qfluct
