#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dynamo/config.hpp"
#include "dynamo/exterior_geometry.hpp"
#include "dynamo/induction.hpp"

namespace dynamo {

/// Stretching rate used when the config asks for the cat-map value.
double resolve_lambda(double configured);

/// Divergence-free initial profile. `random` draws mode amplitudes, phases
/// and wave numbers from a seeded mt19937_64 so runs are reproducible.
FieldProfile make_initial_profile(const EvolveConfig& config, std::uint64_t seed);

/// Fully validated scenario from an [evolve] section.
DynamoScenario make_scenario(const EvolveConfig& config, std::uint64_t seed);

CoframeBasis make_coframe(const CurvatureConfig& config);

/// t,B_p,B_q,B_z,div_residual with 17 significant digits and LF endings.
std::string format_series_csv(const std::vector<NormSample>& series);

/// Executes the configured command, writing artifacts under config.out_dir
/// and a human-readable summary to `out`. Returns the process exit code:
/// 0 success, 1 validation error, 2 numerical failure. Diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace dynamo
