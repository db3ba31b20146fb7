#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dynamo/errors.hpp"
#include "dynamo/frame_calculus.hpp"
#include "dynamo/grid.hpp"

namespace dynamo {

enum class Command { evolve, curvature, fluxrope, catmap, verify_all };

Command parse_command(std::string_view name);
const char* command_name(Command c);

/// Parse failure carrying the source location of the offending line.
class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string& source, std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class InitialKind { q_slot, p_slot, mixed, random };
enum class OmegaKind { identity, constant, exponential };

struct EvolveConfig {
  /// Negative means "use the cat-map stretching rate".
  double lambda = -1.0;
  double flow_speed = 1.0;
  double resistivity = 0.0;
  OmegaKind omega = OmegaKind::identity;
  double omega_param = 1.0;
  GridSpec grid{};
  double t_end = 2.0;
  /// 0 selects the largest stable step at `courant`.
  double dt = 0.0;
  double courant = 0.5;
  std::size_t sample_every = 1;
  double window_lo = 1.0 / 3.0;
  double window_hi = 2.0 / 3.0;
  double fit_start = 0.4;
  double fit_end = 1.0;
  Axis component = Axis::q;
  ConformalDrift drift = ConformalDrift::geometric;
  InitialKind initial = InitialKind::q_slot;
  double wave_number = 1.0;
  std::size_t random_modes = 3;
};

enum class CurvatureMetric {
  flat,
  arnold,
  constant_conformal,
  exponential_conformal,
  stretched_coframe,
  line_element
};

struct CurvatureConfig {
  CurvatureMetric metric = CurvatureMetric::stretched_coframe;
  double lambda = 1.0;
  double omega_param = 2.0;
  double alpha = 0.0;
  double z_min = 0.0;
  double z_max = 1.0;
  std::size_t samples = 5;
};

struct FluxRopeConfig {
  double kappa = 1.0;
  double tau = 1.0;
  double s_max = 6.283185307179586;
  double ds = 0.01;
  double r = 0.1;
  double theta_r = 0.0;
  double omega = 1.0;
  double gamma = 1.0;
  double v_theta0 = 1.0;
  double v_s = 0.0;
  double b0 = 1.0;
  double b1 = 0.0;
  double b_zero = 1.0;
  double t = 0.0;
};

struct VerifyConfig {
  /// Acceptance criteria to run (1-8); empty runs all of them.
  std::vector<int> criteria;
};

struct RunConfig {
  Command command = Command::catmap;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  EvolveConfig evolve{};
  CurvatureConfig curvature{};
  FluxRopeConfig fluxrope{};
  VerifyConfig verify{};
};

/// Reads `[section]` headers and `key = value` lines; `#` starts a comment.
/// Unknown sections or keys, duplicates and malformed values throw ConfigError.
void parse_config(std::string_view text, const std::string& source, RunConfig& config);
void load_config(const std::filesystem::path& path, RunConfig& config);

}  // namespace dynamo
