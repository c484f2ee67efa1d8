#pragma once

// The three worked examples plus a custom scenario, each run through the
// full matrix pipeline and compared against closed-form overlays.
//
//   example1: H = hbar w0 cos(nu0 t) sz, A = a(t) sx, psi0 = |+>
//   example2: same H, A = a(t) sx + b(t) sz
//   example3: H = hbar w (N + 1/2), A = cos(theta) x + sin(theta) p,
//             psi0 = D(alpha) S(z) |0> in the Fock space cut at |s>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfluct/bloch.hpp"
#include "qfluct/coefficient.hpp"
#include "qfluct/dynamics.hpp"
#include "qfluct/fluctuation.hpp"

namespace qfluct {

enum class ScenarioKind { example1, example2, example3, custom };

std::string to_string(ScenarioKind kind);
std::string to_string(Method method);

struct ScenarioParams {
  double omega0 = 1.0;
  double nu0 = 1.0;
  Coefficient a = Coefficient::t();
  Coefficient b = Coefficient::t();
  Coefficient theta = Coefficient::parse("cos t");
  cplx alpha{2.0, 1.0};
  cplx z{0.5, 0.5};
  std::optional<int> s;  ///< explicit cutoff; recommended_cutoff(|alpha|^2, 1e-6) otherwise
  double hbar = 1.0;
  double mass = 1.0;
  double omega = 1.0;
};

struct ScenarioTolerances {
  double overlay = 1e-7;         ///< max |numeric - analytic| per channel
  double tight = 1e-6;           ///< relative tightness threshold on residual_r2
  double residual_floor = 1e-8;  ///< residual_r2 >= -residual_floor
  double norm_defect = 1e-9;
  double tail_mass = 1e-8;       ///< top-two Fock level probability
  double sigma_floor = 1e-9;
  double special_point = 1e-4;   ///< example 2 residual at xi = n pi
  double bloch = 1e-8;
};

/// Tabulated operator: sum of coefficient(t) * matrix.
using OperatorTerms = std::vector<std::pair<Coefficient, CMatrix>>;

struct CustomScenario {
  OperatorTerms hamiltonian;
  OperatorTerms observable;
  CVector psi0;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::example1;
  std::string label;  ///< output file prefix; the kind name when empty
  ScenarioParams params;
  TimeGrid grid{0.0, 5.0, 5000};
  std::optional<Method> method;  ///< exact_commuting for commuting families, midpoint otherwise
  ScenarioTolerances tol;
  std::uint64_t seed = 20240607;
  std::optional<CustomScenario> custom;

  std::string output_label() const { return label.empty() ? to_string(kind) : label; }
  /// Default grid and parameters for one of the examples.
  static ScenarioConfig defaults(ScenarioKind kind);
};

/// Everything needed to integrate a scenario.
struct ScenarioSetup {
  TimeDepOperator a;
  TimeDepOperator h;
  CVector psi0;
  TimeGrid grid;
  PropagationOptions prop;
  RateOptions rate;
  int cutoff = 0;          ///< Fock cutoff s (example3 only)
  double tail_mass = 0.0;  ///< of psi0 (example3 only)
};

/// Throws std::invalid_argument on inconsistent parameters.
ScenarioSetup setup_scenario(const ScenarioConfig& config);

struct Overlay {
  std::vector<double> mu;
  std::vector<double> sigma;
  std::vector<double> v2_mean;
};

struct SpecialPoint {
  double t = 0.0;
  double residual = 0.0;  ///< NaN at degenerate instants
  double expected = 0.0;  ///< 4 w0^2 a^2 cos^2(nu0 t)
  bool degenerate = false;
};

struct ScenarioReport {
  ScenarioConfig config;
  std::vector<BoundReport> reports;
  std::optional<Overlay> overlay;
  std::map<std::string, double> overlay_max_dev;  ///< mu, sigma, v2_mean
  std::map<std::string, double> bloch_max_dev;    ///< mu, sigma_sq, v_mean, v2_mean
  std::vector<SpecialPoint> special_points;
  double tight_fraction = 0.0;  ///< over non-degenerate points
  double min_residual = 0.0;    ///< min residual_r2 over non-degenerate points
  double min_cs_residual = 0.0;
  double max_norm_defect = 0.0;
  int degenerate_count = 0;
  int cutoff = 0;
  double tail_mass = 0.0;
  bool truncation_warning = false;
  std::vector<std::string> flags;     ///< invariant failures
  std::vector<std::string> warnings;  ///< advisory only

  bool ok() const { return flags.empty(); }
};

ScenarioReport run_example1(const ScenarioConfig& config);
ScenarioReport run_example2(const ScenarioConfig& config);
ScenarioReport run_example3(const ScenarioConfig& config);
ScenarioReport run_custom(const ScenarioConfig& config);
ScenarioReport run_scenario(const ScenarioConfig& config);

/// Closed forms for examples 1 and 2 (b = 0 gives example 1).
Overlay qubit_overlay(const ScenarioParams& p, const TimeGrid& grid, bool with_b);

/// Bloch form of examples 1 and 2 with the analytic state a(t) = (cos xi, sin xi, 0),
/// xi = 2 (w0/nu0) sin(nu0 t).
BlochModel qubit_bloch_model(const ScenarioParams& p, bool with_b);

/// Instants in [t0, t1] where xi(t) is a multiple of pi.
std::vector<double> xi_roots(const ScenarioParams& p, double t0, double t1);

/// max over the grid of |<psi0| U^dag v_A U |psi0> - <psi(t)| v_A |psi(t)>|.
/// Requires a trajectory with stored propagators.
double picture_equivalence_check(const TimeDepOperator& a, const TimeDepOperator& h, const Trajectory& traj,
                                 double hbar = 1.0);

struct TruncationStability {
  int s = 0;
  std::map<std::string, double> channel_max_dev;  ///< s vs 2s, every numeric channel
  double max_dev = 0.0;
};

/// Runs example 3 at cutoff s and 2s and compares the report channels.
TruncationStability truncation_stability(const ScenarioConfig& config);

}  // namespace qfluct
