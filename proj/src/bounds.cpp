#include "qfluct/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qfluct/errors.hpp"

namespace qfluct {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// States taken from trajectories are held to the propagation norm budget.
StatOptions trajectory_stats() {
  StatOptions s;
  s.norm_tol = 1e-8;
  return s;
}

}  // namespace

SpeedLimitReport mt_ml_times(const CMatrix& h, const CVector& psi, double hbar) {
  if (!(hbar > 0.0)) throw std::invalid_argument("mt_ml_times: hbar must be > 0");
  SpeedLimitReport r;
  r.mean_e = expectation(h, psi);
  r.delta_e = std_dev(h, psi);
  if (r.delta_e > 0.0) r.tau_mt = M_PI * hbar / (2.0 * r.delta_e);
  if (r.mean_e > 0.0) r.tau_ml = M_PI * hbar / (2.0 * r.mean_e);
  if (r.tau_mt && r.tau_ml) r.tau_unified = std::max(*r.tau_mt, *r.tau_ml);
  return r;
}

MtIntegralSeries mt_integral_check(const TimeDepOperator& h, const Trajectory& traj, double hbar) {
  const auto stats = trajectory_stats();
  const int n = static_cast<int>(traj.states.size());
  std::vector<double> spread(n);
  for (int k = 0; k < n; ++k) spread[k] = std_dev(h(traj.grid.time(k)), traj.states[k], stats) / hbar;

  MtIntegralSeries out;
  out.lhs = cumulative_integral(spread, traj.grid.dt(), Quadrature::trapezoid);
  out.rhs.resize(n);
  out.defect.resize(n);
  out.min_defect = kInf;
  const CVector& psi0 = traj.states.front();
  for (int k = 0; k < n; ++k) {
    const double overlap = std::clamp(std::abs(inner(psi0, traj.states[k])), 0.0, 1.0);
    out.rhs[k] = M_PI_2 - std::asin(overlap);
    out.defect[k] = out.lhs[k] - out.rhs[k];
    out.min_defect = std::min(out.min_defect, out.defect[k]);
  }
  return out;
}

FsKinematics fs_kinematics(const TimeDepOperator& h, const Trajectory& traj, double hbar, FsConvention convention,
                           double sigma_floor) {
  const auto stats = trajectory_stats();
  const double c = convention == FsConvention::factor2 ? 2.0 : 1.0;
  const int n = static_cast<int>(traj.states.size());
  const double dt = traj.grid.dt();

  FsKinematics out;
  out.speed.resize(n);
  out.accel.assign(n, kNaN);
  out.accel_defined.assign(n, false);
  std::vector<double> sigma(n);
  for (int k = 0; k < n; ++k) {
    sigma[k] = std_dev(h(traj.grid.time(k)), traj.states[k], stats);
    out.speed[k] = c * sigma[k] / hbar;
  }
  out.arc_length = cumulative_integral(out.speed, dt, Quadrature::trapezoid);

  for (int k = 0; k < n; ++k) {
    if (sigma[k] <= sigma_floor) continue;
    out.accel_defined[k] = true;
    if (h.has_analytic_derivative()) {
      const double t = traj.grid.time(k);
      const CMatrix v = velocity_observable(h, h, t, hbar);
      out.accel[k] = c / hbar * covariance(h(t), v, traj.states[k], stats) / sigma[k];
    } else if (n >= 3) {
      if (k == 0) {
        out.accel[k] = (-3.0 * out.speed[0] + 4.0 * out.speed[1] - out.speed[2]) / (2.0 * dt);
      } else if (k == n - 1) {
        out.accel[k] = (3.0 * out.speed[n - 1] - 4.0 * out.speed[n - 2] + out.speed[n - 3]) / (2.0 * dt);
      } else {
        out.accel[k] = (out.speed[k + 1] - out.speed[k - 1]) / (2.0 * dt);
      }
    } else {
      out.accel[k] = (out.speed[n - 1] - out.speed[0]) / dt;
    }
  }
  return out;
}

AccelerationCheck acceleration_limit(const TimeDepOperator& h, const CVector& psi, double t, double hbar,
                                     double sigma_floor) {
  const auto stats = trajectory_stats();
  const CMatrix ht = h(t);
  const CMatrix v = velocity_observable(h, h, t, hbar);
  AccelerationCheck r;
  r.sigma_hdot_sq = variance(v, psi, stats);
  const double sigma = std_dev(ht, psi, stats);
  if (sigma <= sigma_floor) {
    r.degenerate = true;
    r.residual = r.sigma_hdot_sq;
    return r;
  }
  const double rate = covariance(ht, v, psi, stats) / sigma;
  r.sigma_rate_sq = rate * rate;
  r.residual = r.sigma_hdot_sq - r.sigma_rate_sq;
  return r;
}

std::vector<double> cumulative_integral(const std::vector<double>& f, double dt, Quadrature rule) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  switch (rule) {
    case Quadrature::trapezoid:
      for (std::size_t k = 1; k < n; ++k) out[k] = out[k - 1] + 0.5 * dt * (f[k - 1] + f[k]);
      break;
    case Quadrature::upper_riemann:
      for (std::size_t k = 1; k < n; ++k) out[k] = out[k - 1] + dt * std::max(f[k - 1], f[k]);
      break;
    case Quadrature::simpson:
      if (n == 2) {
        out[1] = 0.5 * dt * (f[0] + f[1]);
        break;
      }
      // Composite Simpson at even indices; odd indices close the last three
      // intervals with the 3/8 rule.
      for (std::size_t k = 2; k < n; k += 2) out[k] = out[k - 2] + dt / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
      out[1] = dt / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
      for (std::size_t k = 3; k < n; k += 2) {
        out[k] = out[k - 3] + 3.0 * dt / 8.0 * (f[k - 3] + 3.0 * f[k - 2] + 3.0 * f[k - 1] + f[k]);
      }
      break;
  }
  return out;
}

SnrTrace snr_trace(const std::vector<BoundReport>& reports, double dt, Quadrature rule) {
  const std::size_t n = reports.size();
  if (n == 0) throw std::invalid_argument("snr_trace: empty report series");
  SnrTrace out;
  out.t.resize(n);
  out.snr.resize(n);
  out.snr_min.resize(n);
  out.integrand.resize(n);
  out.snr_finite.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = reports[k];
    out.t[k] = r.t;
    out.integrand[k] = std::sqrt(std::max(0.0, r.v2_mean - r.mu_dot * r.mu_dot));
    out.snr_finite[k] = !r.degenerate && r.sigma > 0.0;
    out.snr[k] = out.snr_finite[k] ? r.mu * r.mu / (r.sigma * r.sigma) : kInf;
  }
  const auto integral = cumulative_integral(out.integrand, dt, rule);
  const double sigma0 = reports.front().sigma;
  for (std::size_t k = 0; k < n; ++k) {
    const double denom = sigma0 + integral[k];
    const double mu_sq = reports[k].mu * reports[k].mu;
    out.snr_min[k] = denom > 0.0 ? mu_sq / (denom * denom) : (mu_sq > 0.0 ? kInf : kNaN);
  }
  return out;
}

SnrTrace snr_trace(const TimeDepOperator& a, const TimeDepOperator& h, const Trajectory& traj,
                   const RateOptions& opts, Quadrature rule) {
  return snr_trace(bound_series(a, h, traj, opts), traj.grid.dt(), rule);
}

std::optional<double> relative_uncertainty_rate(double mu, double sigma, double mu_dot, double sigma_dot) {
  if (mu == 0.0) return std::nullopt;
  return 2.0 * (sigma / (mu * mu * mu)) * (mu * sigma_dot - sigma * mu_dot);
}

}  // namespace qfluct
