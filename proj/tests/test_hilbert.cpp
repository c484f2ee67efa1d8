#include <doctest.h>

#include <cmath>

#include "qfluct/errors.hpp"
#include "qfluct/fluctuation.hpp"
#include "qfluct/hilbert.hpp"

using namespace qfluct;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Direct weighted sum in extended precision.
long double mean_photon_oracle(long double x, int s) {
  long double w = 1.0L, num = 0.0L, den = 0.0L;
  for (int n = 0; n <= s; ++n) {
    if (n > 0) w *= x / n;
    num += n * w;
    den += w;
  }
  return num / den;
}

}  // namespace

TEST_CASE("Pauli factories") {
  CHECK(max_abs(pauli('x') * pauli('x') - CMatrix::Identity(2, 2)) == 0.0);
  CHECK(max_abs(pauli('Y') - pauli(Axis::y)) == 0.0);
  CHECK_THROWS_AS(pauli('w'), std::invalid_argument);
  CHECK(qubit_plus().norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(qubit_basis(2), std::invalid_argument);
}

TEST_CASE("ladder operators on the truncated space") {
  const FockSpace space(6);
  const auto [a, adag] = ladder(space);
  for (int n = 1; n <= space.s; ++n) {
    const CVector lowered = a * fock_state(space, n);
    CHECK(lowered[n - 1].real() == doctest::Approx(std::sqrt(static_cast<double>(n))));
  }
  // [a, a+] = 1 except at the top level, where truncation leaves -s.
  const CMatrix comm = a * adag - adag * a;
  for (int n = 0; n < space.s; ++n) CHECK(comm(n, n).real() == doctest::Approx(1.0));
  CHECK(comm(space.s, space.s).real() == doctest::Approx(-space.s));
  CHECK(max_abs(number_op(space) - adag * a) < 1e-14);
}

TEST_CASE("quadratures carry the physical constants") {
  const FockSpace space(8, 2.0, 3.0, 0.5);
  const auto [x, p] = quadratures(space);
  const CMatrix comm = x * p - p * x;
  for (int n = 0; n < space.s; ++n) CHECK(comm(n, n).imag() == doctest::Approx(space.hbar));
  const CVector vac = fock_state(space, 0);
  CHECK(variance(x, vac) == doctest::Approx(space.hbar / (2.0 * space.mass * space.omega)));
  CHECK(variance(p, vac) == doctest::Approx(space.hbar * space.mass * space.omega / 2.0));
}

TEST_CASE("coherent state amplitudes follow the Poisson envelope") {
  const FockSpace space(60);
  const cplx alpha(2.0, 1.0);
  const CVector psi = displacement(space, alpha) * fock_state(space, 0);
  cplx expected = std::exp(-std::norm(alpha) / 2.0);
  for (int n = 0; n <= 25; ++n) {
    if (n > 0) expected *= alpha / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(psi[n] - expected) < 1e-10);
  }
}

TEST_CASE("squeezed vacuum statistics") {
  const FockSpace space(80);
  const double r = 0.6;
  const CVector psi = squeeze(space, r) * fock_state(space, 0);
  CHECK(expectation(number_op(space), psi) == doctest::Approx(std::sinh(r) * std::sinh(r)).epsilon(1e-10));
  const auto [x, p] = quadratures(space);
  CHECK(variance(x, psi) == doctest::Approx(0.5 * std::exp(-2.0 * r)).epsilon(1e-9));
  CHECK(variance(p, psi) == doctest::Approx(0.5 * std::exp(2.0 * r)).epsilon(1e-9));
}

TEST_CASE("displaced squeezed vacuum") {
  const FockSpace space(60);
  const SqueezedCoherentParams params{{2.0, 1.0}, {0.5, 0.5}};
  const PreparedState prepared = displaced_squeezed_vacuum(space, params);
  CHECK(prepared.norm_defect < 1e-12);
  const auto [a, adag] = ladder(space);
  const cplx mean_a = prepared.state.dot(a * prepared.state);
  CHECK(std::abs(mean_a - params.alpha) < 1e-9);
  const double r = std::abs(params.z);
  CHECK(expectation(number_op(space), prepared.state) ==
        doctest::Approx(std::norm(params.alpha) + std::sinh(r) * std::sinh(r)).epsilon(1e-10));
}

TEST_CASE("tail mass of the prepared oscillator state at the default cutoff") {
  const FockSpace space(20);
  const auto prepared = displaced_squeezed_vacuum(space, {{2.0, 1.0}, {0.5, 0.5}});
  const double tail = tail_mass(prepared.state, 2);
  CHECK(tail > 1e-8);
  CHECK(tail < 1e-3);
  CHECK(tail_mass(fock_state(space, 0), 2) == 0.0);
  CHECK(tail_mass(fock_state(space, 20), 2) == doctest::Approx(1.0));
}

TEST_CASE("truncated photon number for |alpha|^2 = 5, s = 20") {
  const double err = truncation_error(5.0, 20);
  CHECK(err >= 1e-7);
  CHECK(err <= 1e-5);
  const long double oracle = 5.0L - mean_photon_oracle(5.0L, 20);
  CHECK(err == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-8));
  CHECK(truncated_mean_photon(5.0, 20) == doctest::Approx(static_cast<double>(mean_photon_oracle(5.0L, 20))));
}

TEST_CASE("truncation error against the oracle over a range of intensities") {
  for (double x : {0.5, 2.0, 5.0, 12.0}) {
    for (int s : {1, 5, 10, 20, 30}) {
      const long double oracle = static_cast<long double>(x) - mean_photon_oracle(x, s);
      if (oracle < 1e-12L) continue;
      CHECK(truncation_error(x, s) == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-7));
    }
  }
}

TEST_CASE("truncation edge cases") {
  CHECK(truncation_error(0.0, 5) == 0.0);
  CHECK(truncation_error(3.0, 0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(truncation_error(-1.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(truncation_error(1.0, -1), std::invalid_argument);
  CHECK_THROWS_AS(recommended_cutoff(5.0, 0.0), std::invalid_argument);
}

TEST_CASE("recommended cutoff is the smallest meeting the target") {
  CHECK(recommended_cutoff(5.0, 1e-6) == 21);
  for (double x : {0.3, 1.0, 5.0, 9.0, 25.0}) {
    for (double eps : {1e-3, 1e-6, 1e-10}) {
      const int s = recommended_cutoff(x, eps);
      CHECK(truncation_error(x, s) <= eps);
      if (s > 0) CHECK(truncation_error(x, s - 1) > eps);
    }
  }
}

TEST_CASE("FockSpace validation and cutoff too small for the state") {
  CHECK_THROWS_AS(FockSpace(0), std::invalid_argument);
  CHECK_THROWS_AS(FockSpace(4, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(fock_state(FockSpace(3), 4), std::invalid_argument);
  // exp of a truncated generator is still unitary, so the norm survives;
  // a tiny tolerance flags the rounding instead.
  CHECK_NOTHROW(displaced_squeezed_vacuum(FockSpace(3), {{2.0, 1.0}, {0.5, 0.5}}));
  CHECK_THROWS_AS(displaced_squeezed_vacuum(FockSpace(3), {{2.0, 1.0}, {0.5, 0.5}}, -1.0), NormalizationError);
}
