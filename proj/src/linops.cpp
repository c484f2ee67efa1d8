#include "qfluct/linops.hpp"

#include <cmath>
#include <string>

#include "qfluct/errors.hpp"

namespace qfluct {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_same_dim(const CMatrix& a, const CMatrix& b, const char* what) {
  require_square(a, what);
  require_square(b, what);
  if (a.rows() != b.rows()) {
    throw DimensionError(std::string(what) + ": dimension mismatch " + std::to_string(a.rows()) +
                         " vs " + std::to_string(b.rows()));
  }
}

CMatrix identity(Eigen::Index dim) { return CMatrix::Identity(dim, dim); }

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "matmul");
  return a * b;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "commutator");
  return a * b - b * a;
}

CMatrix anticommutator(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "anticommutator");
  return a * b + b * a;
}

Defect is_hermitian(const CMatrix& m, double tol) {
  require_square(m, "is_hermitian");
  const double d = (m - m.adjoint()).cwiseAbs().maxCoeff();
  return {d <= tol, d};
}

Defect is_unitary(const CMatrix& m, double tol) {
  require_square(m, "is_unitary");
  const double d = (m.adjoint() * m - identity(m.rows())).cwiseAbs().maxCoeff();
  return {d <= tol, d};
}

Defect is_normalized(const CVector& v, double tol) {
  const double d = std::abs(v.norm() - 1.0);
  return {d <= tol, d};
}

cplx inner(const CVector& u, const CVector& v) {
  if (u.size() != v.size()) {
    throw DimensionError("inner: dimension mismatch " + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()));
  }
  return u.dot(v);  // Eigen conjugates the left operand
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

CMatrix herm_expm(const CMatrix& h, cplx scale, double herm_tol) {
  require_square(h, "herm_expm");
  if (!std::isfinite(scale.real()) || !std::isfinite(scale.imag())) {
    throw Error("herm_expm: non-finite scale");
  }
  const Defect herm = is_hermitian(h, herm_tol);
  if (!herm.ok) {
    throw HermiticityError("herm_expm: argument not Hermitian (defect " +
                           std::to_string(herm.max_defect) + ")");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(h));
  if (eig.info() != Eigen::Success) {
    throw EigenSolverError("herm_expm: eigendecomposition failed");
  }
  const auto& vecs = eig.eigenvectors();
  const Eigen::VectorXd& vals = eig.eigenvalues();
  CVector phases(vals.size());
  for (Eigen::Index k = 0; k < vals.size(); ++k) phases[k] = std::exp(scale * vals[k]);
  return vecs * phases.asDiagonal() * vecs.adjoint();
}

CMatrix antiherm_expm(const CMatrix& g, double herm_tol) {
  require_square(g, "antiherm_expm");
  const double d = (g + g.adjoint()).cwiseAbs().maxCoeff();
  if (d > herm_tol) {
    throw HermiticityError("antiherm_expm: generator not anti-Hermitian (defect " +
                           std::to_string(d) + ")");
  }
  // g = -i (i g) with i g Hermitian.
  return herm_expm(kI * g, -kI, herm_tol);
}

}  // namespace qfluct
