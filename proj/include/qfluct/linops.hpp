#pragma once

// Dense complex linear algebra used by every other module.
//
// Operators and states are plain Eigen objects; the free functions here add
// dimension checks, the Hermitian-generator exponentials, and the structural
// predicates with the tolerances used throughout the library.

#include <complex>

#include <Eigen/Dense>

namespace qfluct {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Default tolerances; every call site that takes one can override it.
struct Tolerances {
  double herm = 1e-12;  ///< max |M - M^dagger| entry for "Hermitian"
  double unit = 1e-10;  ///< max |U^dagger U - I| entry for "unitary"
  double norm = 1e-10;  ///< | ||v|| - 1 | for "normalized"
};

struct Defect {
  bool ok = false;
  double max_defect = 0.0;
};

CMatrix identity(Eigen::Index dim);

CMatrix matmul(const CMatrix& a, const CMatrix& b);
CMatrix commutator(const CMatrix& a, const CMatrix& b);
CMatrix anticommutator(const CMatrix& a, const CMatrix& b);

/// exp(scale * h) for Hermitian h, through h = V diag(d) V^dagger.
/// The result is unitary (to eigensolver accuracy) when scale is imaginary.
CMatrix herm_expm(const CMatrix& h, cplx scale, double herm_tol = Tolerances{}.herm);

/// exp(g) for anti-Hermitian g, computed as herm_expm(i g, -i).
CMatrix antiherm_expm(const CMatrix& g, double herm_tol = Tolerances{}.herm);

Defect is_hermitian(const CMatrix& m, double tol = Tolerances{}.herm);
Defect is_unitary(const CMatrix& m, double tol = Tolerances{}.unit);
Defect is_normalized(const CVector& v, double tol = Tolerances{}.norm);

/// conj(u) . v
cplx inner(const CVector& u, const CVector& v);

/// (m + m^dagger) / 2
CMatrix hermitian_part(const CMatrix& m);

void require_square(const CMatrix& m, const char* what);
void require_same_dim(const CMatrix& a, const CMatrix& b, const char* what);

}  // namespace qfluct
