#include "qfluct/fluctuation.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "qfluct/errors.hpp"

namespace qfluct {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_observable(const CMatrix& a, const CVector& psi, const StatOptions& opts, const char* what) {
  require_square(a, what);
  if (a.rows() != psi.size()) {
    throw DimensionError(std::string(what) + ": operator dim " + std::to_string(a.rows()) + " vs state dim " +
                         std::to_string(psi.size()));
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const Defect herm = is_hermitian(a, opts.herm_tol * scale);
  if (!herm.ok) {
    throw HermiticityError(std::string(what) + ": observable not Hermitian (defect " +
                           std::to_string(herm.max_defect) + ")");
  }
  const Defect norm = is_normalized(psi, opts.norm_tol);
  if (!norm.ok) {
    throw NormalizationError(std::string(what) + ": state not normalized (defect " +
                             std::to_string(norm.max_defect) + ")");
  }
}

double real_part_checked(cplx value, const StatOptions& opts, const char* what) {
  if (std::abs(value.imag()) > opts.imag_tol * std::max(1.0, std::abs(value.real()))) {
    throw HermiticityError(std::string(what) + ": expectation has imaginary part " +
                           std::to_string(value.imag()));
  }
  return value.real();
}

// (A - <A>) psi together with <A>.
struct Fluctuation {
  double mean;
  CVector delta;
};

Fluctuation fluctuation_of(const CMatrix& a, const CVector& psi, const StatOptions& opts, const char* what) {
  check_observable(a, psi, opts, what);
  CVector a_psi = a * psi;
  const double mu = real_part_checked(psi.dot(a_psi), opts, what);
  a_psi -= mu * psi;
  return {mu, std::move(a_psi)};
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

}  // namespace

double expectation(const CMatrix& a, const CVector& psi, const StatOptions& opts) {
  check_observable(a, psi, opts, "expectation");
  return real_part_checked(psi.dot(a * psi), opts, "expectation");
}

double variance(const CMatrix& a, const CVector& psi, const StatOptions& opts) {
  // ||(A - <A>) psi||^2 is non-negative by construction, no clamp needed.
  return fluctuation_of(a, psi, opts, "variance").delta.squaredNorm();
}

double std_dev(const CMatrix& a, const CVector& psi, const StatOptions& opts) {
  return std::sqrt(variance(a, psi, opts));
}

double covariance(const CMatrix& a, const CMatrix& b, const CVector& psi, const StatOptions& opts) {
  const auto fa = fluctuation_of(a, psi, opts, "covariance");
  const auto fb = fluctuation_of(b, psi, opts, "covariance");
  return fa.delta.dot(fb.delta).real();
}

CMatrix velocity_observable(const TimeDepOperator& a, const TimeDepOperator& h, double t, double hbar) {
  if (a.dim() != h.dim()) throw DimensionError("velocity_observable: dimension mismatch");
  const CMatrix at = a(t);
  const CMatrix ht = h(t);
  const CMatrix v = a.derivative(t) + (kI / hbar) * (ht * at - at * ht);
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  const Defect herm = is_hermitian(v, 1e-10 * scale);
  if (!herm.ok) {
    throw HermiticityError("velocity_observable: v_A not Hermitian (defect " + std::to_string(herm.max_defect) +
                           ")");
  }
  return hermitian_part(v);
}

TimeDepOperator velocity_operator(const TimeDepOperator& a, const TimeDepOperator& h, double hbar) {
  if (a.dim() != h.dim()) throw DimensionError("velocity_operator: dimension mismatch");
  int order = 0;
  if (a.analytic_order() >= 1) {
    const int from_a = a.analytic_order() == TimeDepOperator::kUnlimited ? TimeDepOperator::kUnlimited
                                                                         : a.analytic_order() - 1;
    order = std::min(from_a, h.analytic_order());
  }
  return TimeDepOperator(
      a.dim(),
      [a, h, hbar](double t, int k) -> CMatrix {
        if (k == 0) return velocity_observable(a, h, t, hbar);
        // d^k/dt^k of A' + (i/hbar)[H, A] by the Leibniz rule.
        CMatrix out = a.analytic_derivative(t, k + 1);
        for (int j = 0; j <= k; ++j) {
          const CMatrix hj = h.analytic_derivative(t, j);
          const CMatrix ak = a.analytic_derivative(t, k - j);
          out += (binomial(k, j) * kI / hbar) * (hj * ak - ak * hj);
        }
        return hermitian_part(out);
      },
      order, a.commuting_family() && h.commuting_family(), a.fd());
}

double sigma_rate(const TimeDepOperator& a, const TimeDepOperator& h, const CVector& psi, double t,
                  const RateOptions& opts) {
  const CMatrix at = a(t);
  const CMatrix v = velocity_observable(a, h, t, opts.hbar);
  const auto fa = fluctuation_of(at, psi, opts.stats, "sigma_rate");
  const double sigma = fa.delta.norm();
  if (sigma <= opts.sigma_floor) {
    throw DegenerateDispersion("sigma_rate: sigma_A = " + std::to_string(sigma) +
                               " at or below the floor; use the cs_residual certificate");
  }
  const auto fv = fluctuation_of(v, psi, opts.stats, "sigma_rate");
  return fa.delta.dot(fv.delta).real() / sigma;
}

BoundReport bound_report_at(const TimeDepOperator& a, const TimeDepOperator& h, const CVector& psi, double t,
                            const RateOptions& opts) {
  const CMatrix at = a(t);
  const CMatrix v = velocity_observable(a, h, t, opts.hbar);
  const auto fa = fluctuation_of(at, psi, opts.stats, "bound_report");
  const auto fv = fluctuation_of(v, psi, opts.stats, "bound_report");

  BoundReport r;
  r.t = t;
  r.mu = fa.mean;
  const double var = fa.delta.squaredNorm();
  r.sigma = std::sqrt(var);
  r.mu_dot = fv.mean;
  const double var_v = fv.delta.squaredNorm();
  r.sigma_v = std::sqrt(var_v);
  r.v2_mean = (v * psi).squaredNorm();
  const double cov = fa.delta.dot(fv.delta).real();
  r.cs_residual = var * var_v - cov * cov;
  r.norm_defect = std::abs(psi.norm() - 1.0);

  if (r.sigma <= opts.sigma_floor) {
    r.degenerate = true;
    r.sigma_dot = kNaN;
    r.residual_r1 = kNaN;
    r.residual_r2 = kNaN;
    r.tight = false;
    return r;
  }
  r.sigma_dot = cov / r.sigma;
  r.residual_r1 = var_v - r.sigma_dot * r.sigma_dot;
  r.residual_r2 = r.v2_mean - r.mu_dot * r.mu_dot - r.sigma_dot * r.sigma_dot;
  r.tight = r.residual_r2 <= opts.tight_tol * std::max(1.0, r.v2_mean);
  return r;
}

BoundReport bound_report(const TimeDepOperator& a, const TimeDepOperator& h, const Trajectory& traj, int index,
                         const RateOptions& opts) {
  if (index < 0 || index >= static_cast<int>(traj.states.size())) {
    throw std::out_of_range("bound_report: grid index out of range");
  }
  return bound_report_at(a, h, traj.states[index], traj.grid.time(index), opts);
}

std::vector<BoundReport> bound_series(const TimeDepOperator& a, const TimeDepOperator& h, const Trajectory& traj,
                                      const RateOptions& opts) {
  const int n = static_cast<int>(traj.states.size());
  std::vector<BoundReport> out(n);
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    try {
      out[k] = bound_report(a, h, traj, k, opts);
    } catch (...) {
#pragma omp critical(qfluct_bound_series)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace reference {

std::vector<BoundReport> bound_series(const TimeDepOperator& a, const TimeDepOperator& h, const Trajectory& traj,
                                      const RateOptions& opts) {
  std::vector<BoundReport> out;
  out.reserve(traj.states.size());
  for (int k = 0; k < static_cast<int>(traj.states.size()); ++k) out.push_back(bound_report(a, h, traj, k, opts));
  return out;
}

}  // namespace reference

double variance_rate_identity_defect(const TimeDepOperator& a, const TimeDepOperator& h, const Trajectory& traj,
                                     int index, const RateOptions& opts) {
  const int n = static_cast<int>(traj.states.size());
  if (index < 0 || index >= n) throw std::out_of_range("variance_rate_identity_defect: index out of range");
  if (n < 2) throw std::invalid_argument("variance_rate_identity_defect: need at least two grid points");
  const auto var_at = [&](int k) { return variance(a(traj.grid.time(k)), traj.states[k], opts.stats); };
  const double dt = traj.grid.dt();

  double fd = 0.0;
  if (index > 0 && index < n - 1) {
    fd = (var_at(index + 1) - var_at(index - 1)) / (2.0 * dt);
  } else if (n == 2) {
    fd = (var_at(1) - var_at(0)) / dt;
  } else if (index == 0) {
    fd = (-3.0 * var_at(0) + 4.0 * var_at(1) - var_at(2)) / (2.0 * dt);
  } else {
    fd = (3.0 * var_at(n - 1) - 4.0 * var_at(n - 2) + var_at(n - 3)) / (2.0 * dt);
  }
  const double t = traj.grid.time(index);
  const double cov = covariance(a(t), velocity_observable(a, h, t, opts.hbar), traj.states[index], opts.stats);
  return std::abs(fd - 2.0 * cov);
}

std::vector<TimeDepOperator> higher_order_chain(const TimeDepOperator& a, const TimeDepOperator& h, int n_max,
                                                double hbar) {
  if (n_max < 1) throw std::invalid_argument("higher_order_chain: n_max must be >= 1");
  std::vector<TimeDepOperator> chain;
  chain.reserve(n_max + 1);
  chain.push_back(a);
  for (int k = 0; k < n_max; ++k) chain.push_back(velocity_operator(chain.back(), h, hbar));
  return chain;
}

ChainResidual chain_residual(const TimeDepOperator& vn, const TimeDepOperator& vn1, const CVector& psi, double t,
                             const RateOptions& opts) {
  const auto f0 = fluctuation_of(vn(t), psi, opts.stats, "chain_residual");
  const auto f1 = fluctuation_of(vn1(t), psi, opts.stats, "chain_residual");
  const double sigma0 = f0.delta.norm();
  const double var1 = f1.delta.squaredNorm();
  if (sigma0 <= opts.sigma_floor) return {var1, true};
  const double rate = f0.delta.dot(f1.delta).real() / sigma0;
  return {var1 - rate * rate, false};
}

}  // namespace qfluct
