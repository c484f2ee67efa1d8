#pragma once

// Seeded random draws for property suites. Gaussian entries, so Hermitian
// matrices follow the GUE shape and states are Haar-distributed.

#include <random>

#include <Eigen/Dense>

#include "qfluct/linops.hpp"

namespace qfluct {

using Rng = std::mt19937_64;

inline double gauss(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline CMatrix random_hermitian(Eigen::Index dim, Rng& rng, double scale = 1.0) {
  CMatrix g(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) g(r, c) = cplx(gauss(rng), gauss(rng));
  return (0.5 * scale) * (g + g.adjoint());
}

inline CVector random_state(Eigen::Index dim, Rng& rng) {
  CVector v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) v[k] = cplx(gauss(rng), gauss(rng));
  return v / v.norm();
}

inline Eigen::Vector3d random_direction(Rng& rng) {
  Eigen::Vector3d v(gauss(rng), gauss(rng), gauss(rng));
  return v / v.norm();
}

}  // namespace qfluct
