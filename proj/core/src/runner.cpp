#include "dynamo/runner.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>

#include "dynamo/errors.hpp"
#include "dynamo/flux_rope.hpp"
#include "dynamo/growth.hpp"
#include "dynamo/verification.hpp"

namespace dynamo {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Portable u64 -> [0, 1): std::uniform_real_distribution is not specified
// bit-for-bit across standard libraries.
double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Mode {
  double amplitude;
  double m;
  double k;
  double phase;
};

std::vector<Mode> draw_modes(std::mt19937_64& rng, std::size_t count) {
  std::vector<Mode> modes;
  for (std::size_t i = 0; i < count; ++i) {
    Mode md;
    md.amplitude = 0.5 + 0.5 * unit_double(rng);
    md.m = 1.0 + std::floor(3.0 * unit_double(rng));
    md.k = -2.0 + 4.0 * unit_double(rng);
    md.phase = kTwoPi * unit_double(rng);
    modes.push_back(md);
  }
  return modes;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  f << text;
  if (!f) throw ValidationError(fmt::format("failed writing '{}'", path.string()));
}

GrowthFit precheck_fit(const DynamoScenario& s, const EvolveConfig& c) {
  // The fit needs enough samples; find out before spending the run.
  const std::size_t steps = s.step_count();
  std::size_t samples = 1 + steps / s.sample_every;
  if (steps % s.sample_every != 0) ++samples;
  std::vector<double> t(samples);
  for (std::size_t i = 0; i < samples; ++i) t[i] = static_cast<double>(i);
  const std::vector<double> norm(samples, 1.0);
  return growth_fit(t, norm, 0.0, FitWindow{c.fit_start, c.fit_end});
}

int run_evolve(const RunConfig& config, std::ostream& out) {
  const EvolveConfig& c = config.evolve;
  const DynamoScenario s = make_scenario(c, config.seed);
  precheck_fit(s, c);
  const Evolution ev = evolve(s);
  write_file(config.out_dir / "series.csv", format_series_csv(ev.series));

  const double theory = theory_growth_rate(s, c.component);
  const GrowthFit fit = growth_fit(ev.series, c.component, theory, FitWindow{c.fit_start, c.fit_end});
  write_file(config.out_dir / "growth.txt", format_growth_report(fit, ev.status));

  out << fmt::format("steps = {}\nt_final = {:.17g}\n", ev.steps, ev.t_final);
  out << format_growth_report(fit, ev.status);
  if (ev.status == EvolutionStatus::overflow_halt) {
    throw NumericalError(fmt::format(
        "evolution halted at t = {} after the field grew past {:g} times its initial size; "
        "series.csv and growth.txt hold the partial run",
        ev.t_final, kOverflowGuard));
  }
  return 0;
}

int run_curvature(const RunConfig& config, std::ostream& out) {
  const CurvatureConfig& c = config.curvature;
  if (c.samples < 1) throw ValidationError("curvature.samples must be >= 1");
  if (!(c.z_max >= c.z_min)) throw ValidationError("curvature.z_max must be >= z_min");
  const CoframeBasis basis = make_coframe(c);
  std::vector<double> z(c.samples);
  for (std::size_t i = 0; i < c.samples; ++i) {
    z[i] = c.samples == 1 ? c.z_min
                          : c.z_min + (c.z_max - c.z_min) * static_cast<double>(i) /
                                          static_cast<double>(c.samples - 1);
  }
  const CurvatureReport cartan = curvature_report(basis, z);
  const CurvatureReport oracle = christoffel_oracle(basis, z);
  ReferenceCurvature reference;
  if (c.metric == CurvatureMetric::stretched_coframe) {
    reference = stretched_coframe_reference(c.lambda, c.alpha);
  }
  const auto rows = compare_reports(cartan, oracle, reference);
  write_file(config.out_dir / "curvature.txt", format_comparison_table(rows));
  out << fmt::format("metric = {}\n", basis.name());
  out << fmt::format("max_abs_diff = {:.17g}\n", max_difference(cartan, oracle));
  out << fmt::format("torsion_residual = {:.17g}\n", cartan.torsion_residual);
  out << fmt::format("symmetry_residual = {:.17g}\n",
                     std::max(cartan.residuals.max(), oracle.residuals.max()));
  return 0;
}

int run_fluxrope(const RunConfig& config, std::ostream& out) {
  const FluxRopeConfig& c = config.fluxrope;
  RopeParams params;
  params.r = c.r;
  params.theta_r = c.theta_r;
  params.omega = c.omega;
  params.gamma = c.gamma;
  params.tau = c.tau;
  params.v_theta = c.v_theta0;
  params.v_s = c.v_s;
  params.b0 = c.b0;
  params.b1 = c.b1;
  params.b_zero = c.b_zero;
  params.validate();
  const double kappa = c.kappa;
  const double tau = c.tau;
  const FrenetCurve curve =
      frenet_integrate([kappa](double) { return kappa; }, [tau](double) { return tau; }, c.s_max, c.ds);
  const TubeMetric tube = tube_metric_factor(params, curve);
  const BThetaProfile bt = btheta_solution(params, curve, tube);
  const auto vtheta = continuity_solution(params, curve, c.v_theta0);
  write_file(config.out_dir / "rope.csv", format_rope_csv(curve, tube, vtheta, bt.at(c.t)));

  const auto& first = curve.samples.front();
  const auto& last = curve.samples.back();
  out << fmt::format("samples = {}\nds = {:.17g}\n", curve.samples.size(), curve.ds);
  out << fmt::format("endpoint_gap = {:.17g}\n", (last.x - first.x).norm());
  out << fmt::format("orthonormality_residual = {:.17g}\n", curve.orthonormality_residual());
  out << fmt::format("thin = {}\nmax_abs_1_minus_K = {:.17g}\n", tube.thin, tube.max_deviation);
  if (params.gamma != 0.0) {
    out << fmt::format("amplification_ratio = {:.17g}\n", amplification_ratio(params));
  } else {
    out << "amplification_ratio = undefined\n";
  }
  if (const auto bound = dynamo_radius_bound(params)) {
    out << fmt::format("radius_bound = {:.17g}\n", *bound);
  } else {
    out << "radius_bound = none\n";
  }
  out << fmt::format("verdict = {}\n", verdict_name(dynamo_verdict(params)));
  return 0;
}

int run_catmap(std::ostream& out) {
  const CatMap cm = cat_map_eigen();
  out << fmt::format("matrix = [[{}, {}], [{}, {}]]\n", cm.matrix[0][0], cm.matrix[0][1],
                     cm.matrix[1][0], cm.matrix[1][1]);
  out << fmt::format("determinant = {}\n", cm.determinant);
  out << fmt::format("chi_1 = {:.17g}\n", cm.chi_expanding);
  out << fmt::format("chi_2 = {:.17g}\n", cm.chi_contracting);
  out << fmt::format("lambda = {:.17g}\n", cm.lambda);
  out << fmt::format("expanding_direction = ({:.17g}, {:.17g})\n", cm.expanding_direction[0],
                     cm.expanding_direction[1]);
  out << fmt::format("contracting_direction = ({:.17g}, {:.17g})\n", cm.contracting_direction[0],
                     cm.contracting_direction[1]);
  return 0;
}

int run_verify(const RunConfig& config, std::ostream& out) {
  const auto results = run_acceptance(config.verify.criteria);
  std::string text;
  bool all = true;
  for (const auto& r : results) {
    text += format_criterion(r);
    all = all && r.passed();
  }
  text += fmt::format("summary: {} of {} criteria passed\n",
                      std::count_if(results.begin(), results.end(),
                                    [](const CriterionResult& r) { return r.passed(); }),
                      results.size());
  write_file(config.out_dir / "verify.txt", text);
  out << text;
  return all ? 0 : 2;
}

}  // namespace

double resolve_lambda(double configured) {
  if (configured < 0.0) return cat_map_eigen().lambda;
  return configured;
}

FieldProfile make_initial_profile(const EvolveConfig& c, std::uint64_t seed) {
  const double k = kTwoPi * c.wave_number;
  switch (c.initial) {
    case InitialKind::q_slot:
      return [k](double p, double, double z) {
        return std::array<double, 3>{0.0, std::cos(kTwoPi * p + k * z), 0.0};
      };
    case InitialKind::p_slot:
      return [k](double, double q, double z) {
        return std::array<double, 3>{std::sin(kTwoPi * q + k * z), 0.0, 0.0};
      };
    case InitialKind::mixed:
      return [k](double p, double q, double z) {
        return std::array<double, 3>{std::sin(kTwoPi * q + k * z), std::cos(kTwoPi * p + k * z), 0.0};
      };
    case InitialKind::random: {
      if (c.random_modes == 0) throw ValidationError("evolve.random_modes must be >= 1");
      std::mt19937_64 rng(seed);
      const auto bp = draw_modes(rng, c.random_modes);
      const auto bq = draw_modes(rng, c.random_modes);
      // B_p depends on (q, z) and B_q on (p, z): divergence-free for any Omega(z).
      return [bp, bq](double p, double q, double z) {
        std::array<double, 3> v{0.0, 0.0, 0.0};
        for (const auto& md : bp) v[0] += md.amplitude * std::sin(kTwoPi * (md.m * q + md.k * z) + md.phase);
        for (const auto& md : bq) v[1] += md.amplitude * std::cos(kTwoPi * (md.m * p + md.k * z) + md.phase);
        return v;
      };
    }
  }
  throw ValidationError("unknown initial field kind");
}

DynamoScenario make_scenario(const EvolveConfig& c, std::uint64_t seed) {
  const double lambda = resolve_lambda(c.lambda);
  ConformalFactor omega = ConformalFactor::identity();
  switch (c.omega) {
    case OmegaKind::identity: break;
    case OmegaKind::constant: omega = ConformalFactor::constant(c.omega_param); break;
    case OmegaKind::exponential: omega = ConformalFactor::exponential(c.omega_param); break;
  }
  if (!std::isfinite(c.wave_number)) throw ValidationError("evolve.wave_number must be finite");
  if (!(c.courant > 0.0)) throw ValidationError("evolve.courant must be > 0");
  c.grid.validate();
  DynamoScenario s;
  s.metric = FrameMetric(lambda, omega);
  s.grid = c.grid;
  s.flow_speed = c.flow_speed;
  s.resistivity = c.resistivity;
  s.initial = make_initial_profile(c, seed);
  s.t_end = c.t_end;
  s.dt = c.dt > 0.0 ? c.dt
                    : stable_time_step(s.metric, s.grid, c.flow_speed, c.resistivity, c.courant);
  s.sample_every = c.sample_every;
  s.window = MeasurementWindow{c.window_lo, c.window_hi};
  s.drift = c.drift;
  s.validate();
  return s;
}

CoframeBasis make_coframe(const CurvatureConfig& c) {
  switch (c.metric) {
    case CurvatureMetric::flat: return CoframeBasis::flat();
    case CurvatureMetric::arnold: return CoframeBasis::arnold(c.lambda);
    case CurvatureMetric::constant_conformal:
      return CoframeBasis::arnold_constant_conformal(c.lambda, c.omega_param);
    case CurvatureMetric::exponential_conformal:
      return CoframeBasis::from_metric(
          FrameMetric(c.lambda, ConformalFactor::exponential(c.omega_param)));
    case CurvatureMetric::stretched_coframe: return CoframeBasis::stretched_coframe(c.lambda);
    case CurvatureMetric::line_element: return CoframeBasis::stretched_line_element(c.lambda);
  }
  throw ValidationError("unknown curvature metric");
}

std::string format_series_csv(const std::vector<NormSample>& series) {
  std::string out = "t,B_p,B_q,B_z,div_residual\n";
  for (const auto& s : series) {
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.t, s.l2[0], s.l2[1], s.l2[2],
                       s.div_residual);
  }
  return out;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.command != Command::catmap) std::filesystem::create_directories(config.out_dir);
    switch (config.command) {
      case Command::evolve: return run_evolve(config, out);
      case Command::curvature: return run_curvature(config, out);
      case Command::fluxrope: return run_fluxrope(config, out);
      case Command::catmap: return run_catmap(out);
      case Command::verify_all: return run_verify(config, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace dynamo
