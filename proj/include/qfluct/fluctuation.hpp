#pragma once

// Statistics of observables on pure states and the fluctuation-rate bounds
//
//   |d sigma_A / dt| <= sigma_{v_A}
//   (d mu_A / dt)^2 + (d sigma_A / dt)^2 <= <v_A^2>
//
// with the velocity observable v_A = dA/dt + (i/hbar) [H, A]. Rates are
// computed analytically: d mu_A/dt = <v_A> and d sigma_A/dt = cov(A, v_A) / sigma_A.

#include <vector>

#include "qfluct/dynamics.hpp"
#include "qfluct/linops.hpp"

namespace qfluct {

struct StatOptions {
  double herm_tol = 1e-10;  ///< Hermiticity check on the observable
  double norm_tol = Tolerances{}.norm;
  double imag_tol = 1e-10;  ///< |Im <psi|A|psi>| allowed, relative to max(1, |Re|)
};

double expectation(const CMatrix& a, const CVector& psi, const StatOptions& opts = {});
double variance(const CMatrix& a, const CVector& psi, const StatOptions& opts = {});
double std_dev(const CMatrix& a, const CVector& psi, const StatOptions& opts = {});
/// <{A, B}>/2 - <A><B>
double covariance(const CMatrix& a, const CMatrix& b, const CVector& psi, const StatOptions& opts = {});

/// dA/dt(t) + (i/hbar) [H(t), A(t)], Hermitian-checked to 1e-10 and symmetrized.
CMatrix velocity_observable(const TimeDepOperator& a, const TimeDepOperator& h, double t, double hbar = 1.0);

/// t -> v_A(t) as an operator. Its own analytic derivatives (Leibniz rule)
/// extend as far as those of A (one order less) and H allow.
TimeDepOperator velocity_operator(const TimeDepOperator& a, const TimeDepOperator& h, double hbar = 1.0);

struct RateOptions {
  double hbar = 1.0;
  double sigma_floor = 1e-9;
  double tight_tol = 1e-6;
  StatOptions stats{};
};

/// cov(A, v_A) / sigma_A. Throws DegenerateDispersion when sigma_A <= sigma_floor.
double sigma_rate(const TimeDepOperator& a, const TimeDepOperator& h, const CVector& psi, double t,
                  const RateOptions& opts = {});

struct BoundReport {
  double t = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double mu_dot = 0.0;
  double sigma_dot = 0.0;  ///< NaN when degenerate
  double sigma_v = 0.0;
  double v2_mean = 0.0;
  double residual_r1 = 0.0;  ///< sigma_v^2 - sigma_dot^2, NaN when degenerate
  double residual_r2 = 0.0;  ///< <v^2> - mu_dot^2 - sigma_dot^2, NaN when degenerate
  double cs_residual = 0.0;  ///< sigma^2 sigma_v^2 - cov(A, v)^2, always defined
  bool tight = false;
  bool degenerate = false;  ///< sigma <= sigma_floor: rate fields undefined
  double norm_defect = 0.0;

  double lhs_sq_sum() const { return mu_dot * mu_dot + sigma_dot * sigma_dot; }
};

/// Report at one instant for an arbitrary state.
BoundReport bound_report_at(const TimeDepOperator& a, const TimeDepOperator& h, const CVector& psi, double t,
                            const RateOptions& opts = {});

/// Report at grid index `index` of a trajectory. Normalization is checked
/// against opts.stats.norm_tol; pass the trajectory's norm budget there.
BoundReport bound_report(const TimeDepOperator& a, const TimeDepOperator& h, const Trajectory& traj, int index,
                         const RateOptions& opts = {});

/// bound_report at every grid point, OpenMP-parallel over the grid.
std::vector<BoundReport> bound_series(const TimeDepOperator& a, const TimeDepOperator& h, const Trajectory& traj,
                                      const RateOptions& opts = {});

/// | d(sigma_A^2)/dt by finite differences on the grid - 2 cov(A, v_A) |.
/// Central difference inside the grid, second-order one-sided at the ends.
double variance_rate_identity_defect(const TimeDepOperator& a, const TimeDepOperator& h, const Trajectory& traj,
                                     int index, const RateOptions& opts = {});

/// V^0 = A, V^{k+1} = dV^k/dt + (i/hbar) [H, V^k] for k < n_max.
/// Returns n_max + 1 operators.
std::vector<TimeDepOperator> higher_order_chain(const TimeDepOperator& a, const TimeDepOperator& h, int n_max,
                                                double hbar = 1.0);

struct ChainResidual {
  double residual = 0.0;  ///< sigma_{V^{n+1}}^2 - (cov(V^n, V^{n+1}) / sigma_{V^n})^2
  bool degenerate = false;
};

/// Chain inequality (d sigma_{V^n}/dt)^2 <= sigma_{V^{n+1}}^2 at one state.
ChainResidual chain_residual(const TimeDepOperator& vn, const TimeDepOperator& vn1, const CVector& psi, double t,
                             const RateOptions& opts = {});

namespace reference {
/// Serial bound_series, kept as the oracle for the parallel kernel.
std::vector<BoundReport> bound_series(const TimeDepOperator& a, const TimeDepOperator& h, const Trajectory& traj,
                                      const RateOptions& opts = {});
}  // namespace reference

}  // namespace qfluct
