#pragma once

// Companion bounds: Mandelstam-Tamm / Margolus-Levitin times and the MT
// integral inequality, Fubini-Study speed and acceleration, the
// signal-to-noise floor, and the relative-uncertainty rate.

#include <optional>
#include <vector>

#include "qfluct/dynamics.hpp"
#include "qfluct/fluctuation.hpp"

namespace qfluct {

struct SpeedLimitReport {
  double delta_e = 0.0;
  double mean_e = 0.0;
  std::optional<double> tau_mt;       ///< pi hbar / (2 dE); absent when dE == 0
  std::optional<double> tau_ml;       ///< pi hbar / (2 <E>); absent unless <E> > 0
  std::optional<double> tau_unified;  ///< max of the two when both exist
};

SpeedLimitReport mt_ml_times(const CMatrix& h, const CVector& psi, double hbar = 1.0);

struct MtIntegralSeries {
  std::vector<double> lhs;     ///< int_0^T dH(t)/hbar dt (trapezoid)
  std::vector<double> rhs;     ///< pi/2 - arcsin |<psi(0)|psi(T)>|
  std::vector<double> defect;  ///< lhs - rhs
  double min_defect = 0.0;
};

MtIntegralSeries mt_integral_check(const TimeDepOperator& h, const Trajectory& traj, double hbar = 1.0);

enum class FsConvention { factor2, factor1 };

struct FsKinematics {
  std::vector<double> arc_length;  ///< s(t)
  std::vector<double> speed;       ///< v_H = c dH / hbar, c = 2 or 1
  std::vector<double> accel;       ///< a_H, NaN where undefined
  std::vector<bool> accel_defined; ///< false where sigma_H <= floor
};

/// Acceleration is analytic (c/hbar) cov(H, dH/dt)/sigma_H when h carries an
/// analytic derivative, central differences of the speed otherwise.
FsKinematics fs_kinematics(const TimeDepOperator& h, const Trajectory& traj, double hbar = 1.0,
                           FsConvention convention = FsConvention::factor2, double sigma_floor = 1e-9);

struct AccelerationCheck {
  double sigma_rate_sq = 0.0;    ///< (d sigma_H/dt)^2
  double sigma_hdot_sq = 0.0;    ///< sigma_{dH/dt}^2
  double residual = 0.0;         ///< sigma_hdot_sq - sigma_rate_sq
  bool degenerate = false;
};

/// The Hamiltonian case A = H of the fluctuation bound: (d sigma_H/dt)^2 <= sigma_{dH/dt}^2.
AccelerationCheck acceleration_limit(const TimeDepOperator& h, const CVector& psi, double t, double hbar = 1.0,
                                     double sigma_floor = 1e-9);

enum class Quadrature { simpson, trapezoid, upper_riemann };

/// Cumulative integral of samples on a uniform grid; out[0] = 0.
std::vector<double> cumulative_integral(const std::vector<double>& f, double dt, Quadrature rule);

struct SnrTrace {
  std::vector<double> t;
  std::vector<double> snr;        ///< mu^2 / sigma^2; +inf where sigma == 0
  std::vector<double> snr_min;    ///< mu^2 / [sigma(0) + int sqrt(<v^2> - mu_dot^2)]^2
  std::vector<double> integrand;  ///< sqrt(max(0, <v^2> - mu_dot^2))
  std::vector<bool> snr_finite;
};

SnrTrace snr_trace(const std::vector<BoundReport>& reports, double dt, Quadrature rule = Quadrature::simpson);
SnrTrace snr_trace(const TimeDepOperator& a, const TimeDepOperator& h, const Trajectory& traj,
                   const RateOptions& opts = {}, Quadrature rule = Quadrature::simpson);

/// d(eps^2)/dt for eps = sigma/mu: 2 (sigma/mu^3) (mu sigma_dot - sigma mu_dot).
/// Empty when mu == 0.
std::optional<double> relative_uncertainty_rate(double mu, double sigma, double mu_dot, double sigma_dot);

}  // namespace qfluct
