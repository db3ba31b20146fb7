#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>

#include "dynamo/grid.hpp"
#include "dynamo/induction.hpp"

namespace dynamo {

/// Fraction range of the sample sequence used by the fit. Samples before
/// `start` are treated as transient.
struct FitWindow {
  static constexpr double kMinTransientCut = 0.2;
  static constexpr std::size_t kMinSamples = 20;
  double start = 0.4;
  double end = 1.0;
};

struct GrowthFit {
  Axis component = Axis::q;
  double rate = 0.0;
  double theory_rate = 0.0;
  double relative_error = 0.0;  ///< |rate - theory| / |theory| (absolute if theory == 0)
  double residual = 0.0;        ///< RMS residual of log norm about the fit
  std::size_t samples = 0;
  double t_first = 0.0;
  double t_last = 0.0;
};

/// Least-squares slope of log(norm) against t over the fit window.
/// Throws ValidationError on non-positive norms or too few samples.
GrowthFit growth_fit(std::span<const double> t, std::span<const double> norm,
                     double theory_rate, FitWindow window = {});
GrowthFit growth_fit(std::span<const NormSample> series, Axis component, double theory_rate,
                     FitWindow window = {});

/// Per-component rate predicted by transport along characteristics,
/// averaged over the measurement window:
/// p: -lambda v <1/Omega>, q: +lambda v <1/Omega>, z: v <L/Omega>.
double theory_growth_rate(const DynamoScenario& scenario, Axis component);

/// key = value block: component, rate, theory, relative_error, residual,
/// samples, t_first, t_last, status.
std::string format_growth_report(const GrowthFit& fit, EvolutionStatus status);

/// Hyperbolic toral automorphism [[2, 1], [1, 1]].
struct CatMap {
  std::array<std::array<long, 2>, 2> matrix{{{2, 1}, {1, 1}}};
  long determinant = 1;
  double chi_expanding = 0.0;
  double chi_contracting = 0.0;
  /// ln chi_expanding: the stretching rate lambda.
  double lambda = 0.0;
  std::array<double, 2> expanding_direction{};
  std::array<double, 2> contracting_direction{};
};

CatMap cat_map_eigen();

}  // namespace dynamo
