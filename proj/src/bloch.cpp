#include "qfluct/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qfluct/errors.hpp"

namespace qfluct {

Vec3 BlochModel::mdot(double t) const {
  if (m_dot) return (*m_dot)(t);
  return (m(t + fd_step) - m(t - fd_step)) / (2.0 * fd_step);
}

BlochStats bloch_stats(const Vec3& a, const Vec3& h, const Vec3& m, const Vec3& m_dot) {
  const Vec3 w = m_dot + 2.0 * m.cross(h);
  const double am = a.dot(m);
  return {am, m.squaredNorm() - am * am, a.dot(w), w.squaredNorm()};
}

BlochStats bloch_stats(const BlochModel& model, double t) {
  return bloch_stats(model.a(t), model.h(t), model.m(t), model.mdot(t));
}

BlochPath bloch_evolve(const Vec3Fn& h, const Vec3& a0, const TimeGrid& grid, double drift_limit) {
  const auto rhs = [&h](double t, const Vec3& a) -> Vec3 { return 2.0 * h(t).cross(a); };
  BlochPath path;
  path.grid = grid;
  path.a.reserve(grid.size());
  path.a.push_back(a0);
  const double r0 = a0.norm();
  const double dt = grid.dt();
  for (int k = 0; k < grid.n_steps; ++k) {
    const double t = grid.time(k);
    const Vec3& a = path.a.back();
    const Vec3 k1 = rhs(t, a);
    const Vec3 k2 = rhs(t + 0.5 * dt, a + 0.5 * dt * k1);
    const Vec3 k3 = rhs(t + 0.5 * dt, a + 0.5 * dt * k2);
    const Vec3 k4 = rhs(t + dt, a + dt * k3);
    path.a.push_back(a + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    path.max_drift = std::max(path.max_drift, std::abs(path.a.back().norm() - r0));
  }
  path.too_coarse = path.max_drift > drift_limit;
  return path;
}

Vec3 bloch_vector(const CVector& psi) {
  if (psi.size() != 2) throw DimensionError("bloch_vector: qubit state required");
  const cplx c = std::conj(psi[0]) * psi[1];
  return {2.0 * c.real(), 2.0 * c.imag(), std::norm(psi[0]) - std::norm(psi[1])};
}

GeometricResidual geometric_residual(const Vec3& a, const Vec3& h, const Vec3& m, const Vec3& m_dot) {
  const Vec3 w = m_dot + 2.0 * m.cross(h);
  const Vec3 w_perp = w - a.dot(w) * a;
  const Vec3 m_perp = m - a.dot(m) * a;
  GeometricResidual g;
  g.rhs = w_perp.squaredNorm();
  if (m_perp.norm() <= 1e-12) {
    g.degenerate = true;
    g.residual = g.rhs;
    return g;
  }
  const double proj = w.dot(m_perp);
  g.lhs = proj * proj / m_perp.squaredNorm();
  g.residual = g.rhs - g.lhs;
  return g;
}

GeometricResidual geometric_residual(const BlochModel& model, double t) {
  return geometric_residual(model.a(t), model.h(t), model.m(t), model.mdot(t));
}

SpanTest tightness_span_test(const Vec3& a, const Vec3& h, const Vec3& m, const Vec3& m_dot, double tol) {
  Eigen::Matrix<double, 3, 2> basis;
  basis.col(0) = m.cross(h);
  basis.col(1) = a;
  Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix<double, 3, 2>> cod(basis);
  cod.setThreshold(1e-14);
  const Eigen::Vector2d coef = cod.solve(m_dot);
  const double defect = (m_dot - basis * coef).norm();
  return {defect <= tol * std::max(1.0, m_dot.norm()), defect};
}

SpanTest tightness_span_test(const BlochModel& model, double t, double tol) {
  return tightness_span_test(model.a(t), model.h(t), model.m(t), model.mdot(t), tol);
}

}  // namespace qfluct
