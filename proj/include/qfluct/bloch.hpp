#pragma once

// Qubit problems in Bloch form: rho = (1 + a.sigma)/2, H = h.sigma,
// M = m.sigma with hbar = 1. Gives a second, matrix-free route to every
// qubit statistic the fluctuation engine computes.

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qfluct/dynamics.hpp"

namespace qfluct {

using Vec3 = Eigen::Vector3d;
using Vec3Fn = std::function<Vec3(double)>;

struct BlochModel {
  Vec3Fn a;                      ///< Bloch vector
  Vec3Fn h;                      ///< field vector (angular frequency)
  Vec3Fn m;                      ///< observable vector
  std::optional<Vec3Fn> m_dot;   ///< analytic dm/dt; central difference otherwise
  double fd_step = 1e-6;

  Vec3 mdot(double t) const;
};

/// The four instantaneous scalars, all closed forms in a, h, m, dm/dt.
struct BlochStats {
  double mean = 0.0;      ///< a.m
  double sigma_sq = 0.0;  ///< m^2 - (a.m)^2
  double v_mean = 0.0;    ///< a.w with w = dm/dt + 2 m x h
  double v2_mean = 0.0;   ///< w.w
};

BlochStats bloch_stats(const Vec3& a, const Vec3& h, const Vec3& m, const Vec3& m_dot);
BlochStats bloch_stats(const BlochModel& model, double t);

struct BlochPath {
  TimeGrid grid;
  std::vector<Vec3> a;
  double max_drift = 0.0;    ///< max | |a(t)| - |a(0)| |
  bool too_coarse = false;   ///< drift beyond drift_limit
};

/// Integrates da/dt = 2 h x a with classic RK4 on the grid. No renormalization.
BlochPath bloch_evolve(const Vec3Fn& h, const Vec3& a0, const TimeGrid& grid, double drift_limit = 1e-6);

/// Bloch vector of a pure qubit state: (<sx>, <sy>, <sz>).
Vec3 bloch_vector(const CVector& psi);

struct GeometricResidual {
  double lhs = 0.0;  ///< (w.m_perp)^2 / (m_perp.m_perp), zero when degenerate
  double rhs = 0.0;  ///< |w - (a.w) a|^2
  double residual = 0.0;  ///< rhs - lhs
  bool degenerate = false;  ///< |m_perp| <= 1e-12: lhs undefined, residual = rhs
};

/// RHS - LHS of the geometric form of (d sigma_M/dt)^2 <= sigma_{v_M}^2, with
/// m_perp = m - (a.m) a and w = dm/dt + 2 m x h.
GeometricResidual geometric_residual(const Vec3& a, const Vec3& h, const Vec3& m, const Vec3& m_dot);
GeometricResidual geometric_residual(const BlochModel& model, double t);

struct SpanTest {
  bool member = false;
  double defect = 0.0;  ///< min over (lambda, mu) of |dm/dt - lambda (m x h) - mu a|
};

/// Is dm/dt in Span{m x h, a}? Least squares by pseudo-inverse, membership
/// iff defect <= tol * max(1, |dm/dt|).
SpanTest tightness_span_test(const Vec3& a, const Vec3& h, const Vec3& m, const Vec3& m_dot, double tol = 1e-8);
SpanTest tightness_span_test(const BlochModel& model, double t, double tol = 1e-8);

}  // namespace qfluct
