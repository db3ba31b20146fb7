#pragma once

#include <array>
#include <functional>
#include <vector>

#include "dynamo/frame_calculus.hpp"
#include "dynamo/frame_metric.hpp"
#include "dynamo/grid.hpp"

namespace dynamo {

/// Frame components (B_p, B_q, B_z) as a function of (p, q, z). Must be
/// defined for every real z: field entering through the inflow end of the
/// z-interval is this profile carried in along characteristics.
using FieldProfile = std::function<std::array<double, 3>(double p, double q, double z)>;

/// Sub-interval of the z-range (as fractions of it) over which norms and
/// rates are measured.
struct MeasurementWindow {
  double lo = 0.0;
  double hi = 1.0;

  static MeasurementWindow full() { return {0.0, 1.0}; }
  static MeasurementWindow interior_third() { return {1.0 / 3.0, 2.0 / 3.0}; }

  /// Trapezoid quadrature weights (including dz) per z node; zero outside.
  std::vector<double> weights(const GridSpec& grid) const;
  void validate() const;
};

/// Kinematic dynamo run: flow v e_z-directed with coordinate speed
/// v_eff = v / Omega(z), resistivity eta, on a FrameMetric.
struct DynamoScenario {
  static constexpr double kMaxCourant = 0.5;

  FrameMetric metric{0.0};
  GridSpec grid{};
  double flow_speed = 1.0;
  double resistivity = 0.0;
  FieldProfile initial;
  double t_end = 1.0;
  double dt = 0.0;
  /// Record norms every `sample_every` steps (and at t = 0 and t_end).
  std::size_t sample_every = 1;
  MeasurementWindow window{};
  ConformalDrift drift = ConformalDrift::geometric;

  bool ideal() const { return resistivity == 0.0; }
  /// v / Omega(z) at grid node k.
  double effective_speed(double z) const;
  double max_effective_speed() const;
  double courant_number() const;
  /// Number of steps and the step actually taken (t_end / steps <= dt).
  std::size_t step_count() const;

  /// Throws ValidationError on any violated precondition, including the
  /// advective bound dt <= 0.5 dz / max|v_eff| and the explicit diffusion
  /// limit when eta > 0.
  void validate() const;
  FrameField initial_field() const;
};

/// Largest dt meeting both stability bounds, scaled by `courant`.
double stable_time_step(const FrameMetric& metric, const GridSpec& grid, double flow_speed,
                        double resistivity, double courant = DynamoScenario::kMaxCourant);

/// Right-hand side of the frame-component induction system.
///
/// Ideal part, with v_eff = v / Omega and L = (ln Omega)':
///   dB_p/dt = -v_eff d_z B_p - lambda v_eff B_p
///   dB_q/dt = -v_eff d_z B_q + lambda v_eff B_q
///   dB_z/dt = -v_eff d_z B_z + v_eff L B_z
/// Resistive part (eta > 0), Delta_A the Arnold scalar Laplacian:
///   eta Omega^{-1} [(Delta_A - lambda^2) B_p - 2 lambda e^{lambda z} d_p B_z] + drift_p
///   eta Omega^{-1} [(Delta_A - lambda^2) B_q + 2 lambda e^{-lambda z} d_q B_z] + drift_q
///   eta Omega^{-1} [Delta_A B_z - 2 lambda d_z B_z] + drift_z
/// with drift_a = +/- eta Omega^{-1} L d_z B_a / 2 (see ConformalDrift).
class InductionOperator {
 public:
  explicit InductionOperator(const DynamoScenario& scenario);

  FrameField rhs(const FrameField& b) const;
  const FrameOperators& frame() const { return ops_; }

 private:
  double lambda_;
  double eta_;
  FrameOperators ops_;
  std::vector<double> v_eff_;
  std::array<std::vector<double>, 3> source_;
  // Resistive coefficient tables.
  std::vector<double> inv_omega_;
  std::vector<double> e2lz_;
  std::vector<double> em2lz_;
  std::vector<double> elz_;
  std::vector<double> emlz_;
  std::vector<double> drift_;
};

FrameField induction_rhs(const DynamoScenario& scenario, const FrameField& b);

struct NormSample {
  double t = 0.0;
  std::array<double, 3> l2{};       ///< sqrt-g weighted L2 norm per component
  std::array<double, 3> max_abs{};  ///< max |B_a| inside the window
  double l2_total = 0.0;
  double div_residual = 0.0;        ///< ||div B|| / ||B|| over the window
};

/// Norms over the window with volume weight sqrt(g).
NormSample measure(const FrameOperators& ops, const FrameField& b,
                   const MeasurementWindow& window, double t);

enum class EvolutionStatus { completed, overflow_halt };

struct Evolution {
  FrameField field;
  std::vector<NormSample> series;
  EvolutionStatus status = EvolutionStatus::completed;
  double t_final = 0.0;
  std::size_t steps = 0;
};

/// Norm ratio to the initial norm at which stepping halts.
inline constexpr double kOverflowGuard = 1e12;

/// Classical RK4 in time. The inflow end of the z-interval (and for
/// eta > 0 also the outflow end) is held at the characteristic transport of
/// the initial profile at every stage time. Throws NumericalError on NaN.
Evolution evolve(const DynamoScenario& scenario);

// ---------------------------------------------------------------------------
// Characteristics

/// Backward trace of dz/dt = v_eff(z) from (z, t) to time 0.
struct CharacteristicFoot {
  double z0 = 0.0;
  /// Accumulated log growth per component along the characteristic:
  /// -lambda int v_eff, +lambda int v_eff, int v_eff L.
  std::array<double, 3> log_growth{};
  bool left_domain = false;
};

CharacteristicFoot trace_characteristic(const DynamoScenario& scenario, double z, double t);

/// Semi-exact ideal solution at one point.
std::array<double, 3> characteristic_value(const DynamoScenario& scenario, double p, double q,
                                           double z, double t);

struct OracleField {
  FrameField field;
  /// z nodes whose characteristic foot lies outside [z_min, z_max]; their
  /// values come from the profile's extension beyond the domain.
  std::size_t nodes_outside_domain = 0;
};

/// Ideal (eta = 0) solution at time t on the scenario grid.
OracleField characteristics_oracle(const DynamoScenario& scenario, double t);

/// Relative L2 difference ||a - b|| / ||b|| over the window (sqrt-g weight).
double relative_l2_error(const FrameOperators& ops, const FrameField& a, const FrameField& b,
                         const MeasurementWindow& window);

}  // namespace dynamo
