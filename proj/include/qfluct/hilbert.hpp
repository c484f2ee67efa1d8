#pragma once

// Operator and state factories: qubit Pauli algebra and the truncated
// single-mode Fock space |0>, ..., |s>.

#include "qfluct/linops.hpp"

namespace qfluct {

enum class Axis { x, y, z };

CMatrix pauli(Axis axis);
/// Accepts 'x', 'y', 'z' (either case); throws std::invalid_argument otherwise.
CMatrix pauli(char axis);
CVector qubit_basis(int k);
/// (|0> + |1>) / sqrt(2)
CVector qubit_plus();

/// Truncated oscillator space spanned by |0>..|s>. Physical constants
/// default to hbar = m = omega = 1.
struct FockSpace {
  int s = 1;
  double hbar = 1.0;
  double mass = 1.0;
  double omega = 1.0;

  FockSpace() = default;
  explicit FockSpace(int cutoff, double hbar_ = 1.0, double mass_ = 1.0, double omega_ = 1.0);

  int dim() const noexcept { return s + 1; }
};

struct SqueezedCoherentParams {
  cplx alpha{0.0, 0.0};
  cplx z{0.0, 0.0};
};

struct Ladder {
  CMatrix a;     ///< annihilation
  CMatrix adag;  ///< creation
};

struct Quadratures {
  CMatrix x;
  CMatrix p;
};

Ladder ladder(const FockSpace& space);
CMatrix number_op(const FockSpace& space);
Quadratures quadratures(const FockSpace& space);
CVector fock_state(const FockSpace& space, int n);

/// D(alpha) = exp(alpha a^dagger - alpha^* a), exponentiated in the truncated space.
CMatrix displacement(const FockSpace& space, cplx alpha);
/// S(z) = exp((z^*/2) a^2 - (z/2) a^dagger^2), exponentiated in the truncated space.
CMatrix squeeze(const FockSpace& space, cplx z);

struct PreparedState {
  CVector state;
  double norm_defect = 0.0;
};

/// D(alpha) S(z) |0>. Throws NormalizationError when the norm defect
/// exceeds norm_tol, which means the cutoff is too small.
PreparedState displaced_squeezed_vacuum(const FockSpace& space, const SqueezedCoherentParams& params,
                                        double norm_tol = Tolerances{}.norm);

/// Probability carried by the top `levels` Fock states.
double tail_mass(const CVector& psi, int levels = 2);

// Poisson truncation diagnostics for a coherent state of intensity |alpha|^2
// cut at |s>. Terms use running ratios t_{n+1} = t_n |alpha|^2 / (n+1).

/// sum_{n<=s} n w_n / sum_{n<=s} w_n with w_n = |alpha|^{2n} / n!
double truncated_mean_photon(double abs_alpha_sq, int s);
/// | |alpha|^2 - truncated_mean_photon |, evaluated without cancellation
double truncation_error(double abs_alpha_sq, int s);
/// Smallest cutoff s with truncation_error <= eps; the search starts at
/// ceil(|alpha|^2 + 5 sqrt(|alpha|^2)). Returns s, the highest Fock index
/// (the space dimension is s + 1).
int recommended_cutoff(double abs_alpha_sq, double eps);

}  // namespace qfluct
