#include "qfluct/hilbert.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qfluct/errors.hpp"

namespace qfluct {

CMatrix pauli(Axis axis) {
  CMatrix m = CMatrix::Zero(2, 2);
  switch (axis) {
    case Axis::x:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Axis::y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case Axis::z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

CMatrix pauli(char axis) {
  switch (std::tolower(static_cast<unsigned char>(axis))) {
    case 'x':
      return pauli(Axis::x);
    case 'y':
      return pauli(Axis::y);
    case 'z':
      return pauli(Axis::z);
    default:
      throw std::invalid_argument(std::string("pauli: invalid axis '") + axis + "'");
  }
}

CVector qubit_basis(int k) {
  if (k != 0 && k != 1) throw std::invalid_argument("qubit_basis: index must be 0 or 1");
  CVector v = CVector::Zero(2);
  v[k] = 1.0;
  return v;
}

CVector qubit_plus() {
  CVector v(2);
  v << M_SQRT1_2, M_SQRT1_2;
  return v;
}

FockSpace::FockSpace(int cutoff, double hbar_, double mass_, double omega_)
    : s(cutoff), hbar(hbar_), mass(mass_), omega(omega_) {
  if (s < 1) throw std::invalid_argument("FockSpace: cutoff s must be >= 1 (dim >= 2)");
  if (!(hbar > 0.0) || !(mass > 0.0) || !(omega > 0.0)) {
    throw std::invalid_argument("FockSpace: hbar, mass and omega must be positive");
  }
}

Ladder ladder(const FockSpace& space) {
  const int d = space.dim();
  CMatrix a = CMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  CMatrix adag = a.adjoint();
  return {std::move(a), std::move(adag)};
}

CMatrix number_op(const FockSpace& space) {
  const int d = space.dim();
  CMatrix n = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

Quadratures quadratures(const FockSpace& space) {
  const auto [a, adag] = ladder(space);
  const double xs = std::sqrt(space.hbar / (2.0 * space.mass * space.omega));
  const double ps = std::sqrt(space.mass * space.omega * space.hbar / 2.0);
  return {xs * (a + adag), kI * ps * (adag - a)};
}

CVector fock_state(const FockSpace& space, int n) {
  if (n < 0 || n > space.s) throw std::invalid_argument("fock_state: level outside [0, s]");
  CVector v = CVector::Zero(space.dim());
  v[n] = 1.0;
  return v;
}

CMatrix displacement(const FockSpace& space, cplx alpha) {
  const auto [a, adag] = ladder(space);
  const CMatrix g = alpha * adag - std::conj(alpha) * a;
  return antiherm_expm(0.5 * (g - g.adjoint()));
}

CMatrix squeeze(const FockSpace& space, cplx z) {
  const auto [a, adag] = ladder(space);
  const CMatrix g = 0.5 * std::conj(z) * (a * a) - 0.5 * z * (adag * adag);
  return antiherm_expm(0.5 * (g - g.adjoint()));
}

PreparedState displaced_squeezed_vacuum(const FockSpace& space, const SqueezedCoherentParams& params,
                                        double norm_tol) {
  if (!std::isfinite(params.alpha.real()) || !std::isfinite(params.alpha.imag()) ||
      !std::isfinite(params.z.real()) || !std::isfinite(params.z.imag())) {
    throw std::invalid_argument("displaced_squeezed_vacuum: non-finite parameters");
  }
  CVector vac = fock_state(space, 0);
  CVector psi = displacement(space, params.alpha) * (squeeze(space, params.z) * vac);
  const double defect = std::abs(psi.norm() - 1.0);
  if (defect > norm_tol) {
    throw NormalizationError("displaced_squeezed_vacuum: norm defect " + std::to_string(defect) +
                             " exceeds tolerance; increase the cutoff s");
  }
  return {std::move(psi), defect};
}

double tail_mass(const CVector& psi, int levels) {
  const auto n = psi.size();
  const auto k = std::min<Eigen::Index>(levels, n);
  return psi.tail(k).squaredNorm();
}

namespace {

// t_s / sum_{n<=s} t_n, accumulated backwards with t_{n-1}/t_n = n/x so no
// factorial or power is ever formed.
double last_term_fraction(double x, int s) {
  double r = 1.0;
  double sum = 1.0;
  for (int n = s; n >= 1; --n) {
    r *= static_cast<double>(n) / x;
    sum += r;
    if (sum > 1e300) return 0.0;
  }
  return 1.0 / sum;
}

void check_poisson_args(double abs_alpha_sq, int s) {
  if (!(abs_alpha_sq >= 0.0) || !std::isfinite(abs_alpha_sq)) {
    throw std::invalid_argument("truncation: |alpha|^2 must be finite and >= 0");
  }
  if (s < 0) throw std::invalid_argument("truncation: cutoff s must be >= 0");
}

}  // namespace

double truncated_mean_photon(double abs_alpha_sq, int s) {
  check_poisson_args(abs_alpha_sq, s);
  if (abs_alpha_sq == 0.0) return 0.0;
  // sum n t_n = x sum_{n<s} t_n, hence <N>_trunc = x (1 - t_s / S_s).
  return abs_alpha_sq * (1.0 - last_term_fraction(abs_alpha_sq, s));
}

double truncation_error(double abs_alpha_sq, int s) {
  check_poisson_args(abs_alpha_sq, s);
  if (abs_alpha_sq == 0.0) return 0.0;
  return abs_alpha_sq * last_term_fraction(abs_alpha_sq, s);
}

int recommended_cutoff(double abs_alpha_sq, double eps) {
  check_poisson_args(abs_alpha_sq, 0);
  if (!(eps > 0.0)) throw std::invalid_argument("recommended_cutoff: eps must be > 0");
  int s = static_cast<int>(std::ceil(abs_alpha_sq + 5.0 * std::sqrt(abs_alpha_sq)));
  // The error is strictly decreasing in s, so walk whichever way the seed needs.
  while (s > 0 && truncation_error(abs_alpha_sq, s - 1) <= eps) --s;
  while (truncation_error(abs_alpha_sq, s) > eps) ++s;
  return s;
}

}  // namespace qfluct
