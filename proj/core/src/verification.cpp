#include "dynamo/verification.hpp"

#include <boost/rational.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>

#include "dynamo/exterior_geometry.hpp"
#include "dynamo/flux_rope.hpp"
#include "dynamo/frame_calculus.hpp"
#include "dynamo/growth.hpp"
#include "dynamo/induction.hpp"
#include "dynamo/runner.hpp"

namespace dynamo {
namespace {

using Clock = std::chrono::steady_clock;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRuntimeBudget = 120.0;
constexpr double kDivFloor = 1e-12;

CheckResult at_most(std::string name, double value, double tolerance, std::string detail = {}) {
  return {std::move(name), value, tolerance, value <= tolerance, std::move(detail)};
}
CheckResult at_least(std::string name, double value, double tolerance, std::string detail = {}) {
  return {std::move(name), value, tolerance, value >= tolerance, std::move(detail)};
}
CheckResult holds(std::string name, bool ok, std::string detail = {}) {
  return {std::move(name), ok ? 1.0 : 0.0, 1.0, ok, std::move(detail)};
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Baseline ideal run: cat-map rate, unit speed, 32x32x128, t in [0, 2].
EvolveConfig base_config() {
  EvolveConfig c;
  c.lambda = -1.0;
  c.flow_speed = 1.0;
  c.grid = GridSpec{32, 32, 128, 0.0, 1.0};
  c.t_end = 2.0;
  c.initial = InitialKind::q_slot;
  return c;
}

// Field with B_z != 0 whose divergence cancels between the p and z terms,
// so the residual measures discretization error rather than vanishing
// identically.
FieldProfile div_sensitive_profile(double lambda) {
  return [lambda](double p, double, double z) {
    const double f_prime = kTwoPi * std::cos(kTwoPi * z);
    return std::array<double, 3>{-std::sin(kTwoPi * p) * std::exp(-lambda * z) * f_prime / kTwoPi,
                                 0.0, std::cos(kTwoPi * p) * std::sin(kTwoPi * z)};
  };
}

struct Run {
  DynamoScenario scenario;
  Evolution evolution;
  double seconds = 0.0;
};

class Suite {
 public:
  const Run& get(const std::string& key, const std::function<DynamoScenario()>& make) {
    auto it = runs_.find(key);
    if (it == runs_.end()) {
      Run r;
      r.scenario = make();
      const auto start = Clock::now();
      r.evolution = evolve(r.scenario);
      r.seconds = seconds_since(start);
      it = runs_.emplace(key, std::move(r)).first;
    }
    return it->second;
  }

  const Run& growth() {
    return get("arnold growth", [] { return make_scenario(base_config(), 0); });
  }
  const Run& conformal() {
    return get("constant omega = 2", [] {
      EvolveConfig c = base_config();
      c.omega = OmegaKind::constant;
      c.omega_param = 2.0;
      return make_scenario(c, 0);
    });
  }
  const Run& oracle(std::size_t n_z, OmegaKind omega) {
    const std::string key = fmt::format("oracle n_z = {}{}", n_z,
                                        omega == OmegaKind::exponential ? ", exponential omega" : "");
    return get(key, [n_z, omega] {
      EvolveConfig c = base_config();
      c.grid.n_z = n_z;
      c.t_end = 1.0;
      c.initial = InitialKind::mixed;
      c.wave_number = 2.0;
      c.omega = omega;
      c.omega_param = 0.5;
      return make_scenario(c, 0);
    });
  }
  const Run& identity_pair(bool constant_one, double eta) {
    const std::string key = fmt::format("{} eta = {}", constant_one ? "omega = constant(1)" : "omega = identity", eta);
    return get(key, [constant_one, eta] {
      EvolveConfig c = base_config();
      c.grid = GridSpec{16, 16, 64, 0.0, 1.0};
      c.t_end = 1.0;
      c.initial = InitialKind::random;
      c.resistivity = eta;
      c.omega = constant_one ? OmegaKind::constant : OmegaKind::identity;
      c.omega_param = 1.0;
      return make_scenario(c, 20240611);
    });
  }
  const Run& div_sensitive() {
    return get("div-sensitive field", [] {
      DynamoScenario s = make_scenario(base_config(), 0);
      s.t_end = 1.0;
      s.initial = div_sensitive_profile(s.metric.lambda());
      s.validate();
      return s;
    });
  }

  /// Every ideal run of the suite, computing any not yet run.
  std::vector<std::pair<std::string, const Run*>> ideal_runs() {
    growth();
    conformal();
    oracle(128, OmegaKind::identity);
    oracle(256, OmegaKind::identity);
    oracle(128, OmegaKind::exponential);
    identity_pair(false, 0.0);
    identity_pair(true, 0.0);
    div_sensitive();
    std::vector<std::pair<std::string, const Run*>> out;
    for (const auto& [key, run] : runs_) {
      if (run.scenario.ideal()) out.emplace_back(key, &run);
    }
    return out;
  }

 private:
  std::map<std::string, Run> runs_;
};

CriterionResult growth_criterion(int id, const std::string& title, const Run& run, double theory) {
  CriterionResult r{id, title, {}, {}, 0.0};
  const GrowthFit fit = growth_fit(run.evolution.series, Axis::q, theory);
  r.checks.push_back(holds("evolution completed", run.evolution.status == EvolutionStatus::completed));
  r.checks.push_back(at_most("relative error of fitted |B_q| rate", fit.relative_error, 0.01,
                             fmt::format("rate {:.10f}, expected {:.10f}, {} samples on t in [{:.4f}, {:.4f}]",
                                         fit.rate, theory, fit.samples, fit.t_first, fit.t_last)));
  r.checks.push_back(at_most("runtime seconds", run.seconds, kRuntimeBudget));
  return r;
}

CriterionResult criterion1(Suite& suite) {
  const Run& run = suite.growth();
  const double theory = run.scenario.metric.lambda() * run.scenario.flow_speed;
  return growth_criterion(1, "Arnold stretching growth of B_q at rate lambda v", run, theory);
}

CriterionResult criterion2(Suite& suite) {
  const Run& run = suite.conformal();
  const double theory = 0.5 * run.scenario.metric.lambda() * run.scenario.flow_speed;
  return growth_criterion(2, "constant Omega = 2 halves the growth rate", run, theory);
}

double oracle_error(const Run& run) {
  const OracleField oracle = characteristics_oracle(run.scenario, run.evolution.t_final);
  const FrameOperators ops(run.scenario.metric, run.scenario.grid);
  return relative_l2_error(ops, run.evolution.field, oracle.field, run.scenario.window);
}

CriterionResult criterion3(Suite& suite) {
  CriterionResult r{3, "solver against the characteristics oracle", {}, {}, 0.0};
  const Run& coarse = suite.oracle(128, OmegaKind::identity);
  const Run& fine = suite.oracle(256, OmegaKind::identity);
  const Run& conformal = suite.oracle(128, OmegaKind::exponential);
  const double e1 = oracle_error(coarse);
  const double e2 = oracle_error(fine);
  const double e3 = oracle_error(conformal);
  const double order = std::log(e1 / e2) / std::log(coarse.scenario.grid.dz() / fine.scenario.grid.dz());
  r.checks.push_back(at_most("relative L2 error, n_z = 128", e1, 0.02));
  r.checks.push_back(at_most("relative L2 error, n_z = 128, Omega = exp(z/2)", e3, 0.02));
  r.checks.push_back(at_least("convergence order 128 -> 256", order, 3.5,
                              fmt::format("errors {:.3e} -> {:.3e}", e1, e2)));
  return r;
}

// curl e_a through coordinate Christoffel symbols:
// (curl V)^i = eps^{ijk} (d_j V_k - Gamma^m_{jk} V_m) / sqrt(g), V_k = h_a delta_ka.
std::array<double, 3> christoffel_curl(const FrameMetric& metric, Axis a, double z) {
  const auto jets = metric.scale_factor_jets(z);
  std::array<double, 3> g{}, dg{};
  for (int i = 0; i < 3; ++i) {
    g[i] = jets[i].value * jets[i].value;
    dg[i] = 2.0 * jets[i].value * jets[i].d1;
  }
  auto d = [&](int comp, int dir) { return dir == 2 ? dg[comp] : 0.0; };  // d_dir g_comp,comp
  auto gamma = [&](int m, int j, int k) {
    double s = 0.0;
    if (m == k) s += d(m, j);
    if (m == j) s += d(m, k);
    if (j == k) s -= d(j, m);
    return 0.5 * s / g[m];
  };
  const int ia = index_of(a);
  std::array<double, 3> cov{};
  cov[ia] = jets[ia].value;
  std::array<double, 3> dcov{};  // d_z of covariant components
  dcov[ia] = jets[ia].d1;
  auto nabla = [&](int j, int k) {
    double v = j == 2 ? dcov[k] : 0.0;
    for (int m = 0; m < 3; ++m) v -= gamma(m, j, k) * cov[m];
    return v;
  };
  const double sqrt_g = jets[0].value * jets[1].value * jets[2].value;
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    out[i] = jets[i].value * (nabla(j, k) - nabla(k, j)) / sqrt_g;
  }
  return out;
}

CriterionResult criterion4() {
  CriterionResult r{4, "frame identities of the Arnold metric", {}, {}, 0.0};
  const double lambda = cat_map_eigen().lambda;
  const FrameMetric metric(lambda);
  const GridSpec grid{8, 8, 33, 0.0, 1.0};
  const FrameOperators ops(metric, grid);
  const FrameField ep = FrameField::unit(grid, Axis::p);
  const FrameField eq = FrameField::unit(grid, Axis::q);
  const FrameField ez = FrameField::unit(grid, Axis::z);

  auto max_diff = [](const FrameField& a, const FrameField& b) {
    double m = 0.0;
    for (Axis ax : kAxes) {
      auto av = a[ax].values();
      auto bv = b[ax].values();
      for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::abs(av[i] - bv[i]));
    }
    return m;
  };
  FrameField expect = eq;
  expect *= -lambda;
  r.checks.push_back(at_most("curl e_p = -lambda e_q (relative)", max_diff(ops.curl(ep), expect) / lambda, 1e-6));
  expect = ep;
  expect *= -lambda * lambda;
  r.checks.push_back(at_most("lap e_p = -lambda^2 e_p (relative)",
                             max_diff(ops.vector_laplacian(ep), expect) / (lambda * lambda), 1e-6));
  expect = eq;
  expect *= -lambda * lambda;
  r.checks.push_back(at_most("lap e_q = -lambda^2 e_q (relative)",
                             max_diff(ops.vector_laplacian(eq), expect) / (lambda * lambda), 1e-6));
  r.checks.push_back(at_most("lap e_z = 0 (relative to lambda^2)",
                             max_diff(ops.vector_laplacian(ez), FrameField(grid)) / (lambda * lambda), 1e-6));

  // curl e_q: three independent routes.
  const FrameField grid_curl = ops.curl(eq);
  const double z = 0.5;
  const auto hodge = hodge_curl_of_frame_vector(CoframeBasis::arnold(lambda), Axis::q, z);
  const auto chris = christoffel_curl(metric, Axis::q, z);
  double spread = 0.0;
  const double grid_p = grid_curl[Axis::p](0, 0, grid.n_z / 2);
  for (int i = 0; i < 3; ++i) spread = std::max(spread, std::abs(hodge[i] - chris[i]));
  spread = std::max(spread, std::abs(grid_p - chris[0]));
  r.checks.push_back(at_most("curl e_q routes agree (grid, exterior, Christoffel)", spread, 1e-10));
  const double coeff = chris[0] / lambda;
  r.report = fmt::format(
      "  curl e_q p-component / lambda: grid {:.15f}, exterior {:.15f}, Christoffel {:.15f}\n"
      "  verdict: curl e_q = {}lambda e_p; the printed relation curl e_q = -lambda e_p is {}\n",
      grid_p / lambda, hodge[0] / lambda, coeff, coeff < 0 ? "-" : "+",
      std::abs(coeff + 1.0) < 1e-10 ? "confirmed" : "contradicted");
  return r;
}

CriterionResult criterion5() {
  CriterionResult r{5, "Cartan structure equations against the Christoffel oracle", {}, {}, 0.0};
  const double lambda = cat_map_eigen().lambda;
  const std::vector<double> z{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<CoframeBasis> bases{
      CoframeBasis::flat(),
      CoframeBasis::arnold(lambda),
      CoframeBasis::arnold_constant_conformal(lambda, 4.0),
      CoframeBasis::from_metric(FrameMetric(lambda, ConformalFactor::exponential(1.0))),
      CoframeBasis::stretched_coframe(lambda),
      CoframeBasis::stretched_line_element(lambda),
  };
  for (const auto& basis : bases) {
    const CurvatureReport cartan = curvature_report(basis, z);
    const CurvatureReport oracle = christoffel_oracle(basis, z);
    r.checks.push_back(at_most(fmt::format("{}: max |cartan - oracle|", basis.name()),
                               max_difference(cartan, oracle), 1e-8));
    r.checks.push_back(at_most(fmt::format("{}: symmetry and Bianchi residuals", basis.name()),
                               std::max(cartan.residuals.max(), oracle.residuals.max()), 1e-8));
    if (&basis == &bases.front()) {
      CurvatureReport zero = cartan;
      for (auto& s : zero.samples) s.r = Riemann{};
      r.checks.push_back(at_most("flat: max |R| (both paths)",
                                 std::max(max_difference(cartan, zero), max_difference(oracle, zero)),
                                 1e-10));
    }
  }
  const CoframeBasis stretched = CoframeBasis::stretched_coframe(lambda);
  const CurvatureReport cartan = curvature_report(stretched, z);
  const CurvatureReport oracle = christoffel_oracle(stretched, z);
  const ConnectionForms conn = solve_connection(stretched, 0.5);
  const double alpha = conn.alpha.value_or(0.0);
  const auto rows = compare_reports(cartan, oracle, stretched_coframe_reference(lambda, alpha));
  std::size_t with_ref = 0;
  std::size_t agree = 0;
  for (const auto& row : rows) {
    if (!row.reference) continue;
    ++with_ref;
    if (std::abs(*row.reference - row.cartan) <= 1e-8) ++agree;
  }
  r.report = fmt::format("  literature comparison (report only), {} coframe, lambda = {:.15f}:\n",
                         stretched.name(), lambda);
  r.report += format_comparison_table(rows);
  r.report += fmt::format("  literature values matching the computed curvature: {} of {}\n", agree,
                          with_ref);
  return r;
}

double series_divergence(const std::vector<NormSample>& a, const std::vector<NormSample>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  auto column = [&](auto get) {
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      diff = std::max(diff, std::abs(get(a[i]) - get(b[i])));
      scale = std::max(scale, std::abs(get(b[i])));
    }
    return scale > 0.0 ? diff / scale : diff;
  };
  double m = column([](const NormSample& s) { return s.t; });
  for (int c = 0; c < 3; ++c) {
    m = std::max(m, column([c](const NormSample& s) { return s.l2[c]; }));
    m = std::max(m, column([c](const NormSample& s) { return s.max_abs[c]; }));
  }
  m = std::max(m, column([](const NormSample& s) { return s.l2_total; }));
  m = std::max(m, column([](const NormSample& s) { return s.div_residual; }));
  return m;
}

CriterionResult criterion6(Suite& suite) {
  CriterionResult r{6, "Omega = 1 reproduces the Arnold runs", {}, {}, 0.0};
  for (double eta : {0.0, 1e-3}) {
    const Run& base = suite.identity_pair(false, eta);
    const Run& conf = suite.identity_pair(true, eta);
    double field_diff = 0.0;
    for (Axis ax : kAxes) {
      auto a = base.evolution.field[ax].values();
      auto b = conf.evolution.field[ax].values();
      for (std::size_t i = 0; i < a.size(); ++i) field_diff = std::max(field_diff, std::abs(a[i] - b[i]));
    }
    r.checks.push_back(at_most(fmt::format("eta = {}: series divergence", eta),
                               series_divergence(base.evolution.series, conf.evolution.series), 1e-12,
                               fmt::format("{} samples, max field difference {:.3e}",
                                           base.evolution.series.size(), field_diff)));
  }
  return r;
}

CriterionResult criterion7() {
  using Rational = boost::rational<long long>;
  CriterionResult r{7, "flux rope geometry, ratio, bound and thin-tube limit", {}, {}, 0.0};

  const FrenetCurve circle = frenet_integrate([](double) { return 1.0; }, [](double) { return 0.0; },
                                              kTwoPi, 0.01);
  r.checks.push_back(at_most("circle closure |x(2 pi) - x(0)|",
                             (circle.samples.back().x - circle.samples.front().x).norm(), 1e-6));

  const Helix helix{0.5, 0.5, {}};
  const FrenetCurve curve = frenet_integrate([](double) { return 0.5; }, [](double) { return 0.5; },
                                             8.0 * std::numbers::pi, 0.01);
  const Vec3 axis = helix.axis();
  const Vec3 center = helix.start.x + helix.radius() * helix.start.n;
  double pos_err = 0.0;
  double rad_err = 0.0;
  double pitch_err = 0.0;
  const double w = std::hypot(helix.kappa, helix.tau);
  for (const auto& s : curve.samples) {
    pos_err = std::max(pos_err, (s.x - helix.position(s.s)).norm());
    const Vec3 rel = s.x - center;
    const double along = rel.dot(axis);
    rad_err = std::max(rad_err, std::abs((rel - along * axis).norm() - 1.0));
    if (s.s > 0.0) pitch_err = std::max(pitch_err, std::abs(along / (w * s.s) - 1.0));
  }
  r.checks.push_back(at_most("helix radius vs closed form 1", rad_err, 1e-6));
  r.checks.push_back(at_most("helix pitch vs closed form 1", pitch_err, 1e-6));
  r.checks.push_back(at_most("helix position vs closed form", pos_err, 1e-6));

  bool exact = amplification_ratio(Rational(1), Rational(1), Rational(1), Rational(1)) == Rational(1) &&
               amplification_ratio(Rational(2), Rational(1, 2), Rational(3, 10), Rational(1, 2)) ==
                   Rational(6, 5) &&
               amplification_ratio(Rational(0), Rational(3), Rational(1, 7), Rational(2)) == Rational(0);
  std::mt19937_64 rng(7);
  auto rand_q = [&rng]() {
    const auto num = static_cast<long long>(rng() % 41) - 20;
    const auto den = static_cast<long long>(rng() % 19) + 1;
    return Rational(num, den);
  };
  bool bound_ok = true;
  for (int i = 0; i < 500; ++i) {
    const Rational tau = rand_q();
    const Rational omega = rand_q();
    const Rational rr = abs(rand_q());
    Rational gamma = rand_q();
    if (gamma == Rational(0)) gamma = Rational(1);
    exact = exact && amplification_ratio(tau, omega, rr, gamma) * gamma * gamma == tau * omega * rr;
    const auto bound = dynamo_radius_bound(gamma, omega, tau);
    const bool has = omega * tau > Rational(0);
    bound_ok = bound_ok && bound.has_value() == has;
    if (has) bound_ok = bound_ok && ((rr > *bound) == (rr * omega * tau > gamma * gamma));
  }
  r.checks.push_back(holds("amplification ratio exact on rationals", exact));
  RopeParams p;
  p.gamma = 1.0;
  p.omega = 2.0;
  p.tau = 2.0;
  p.r = 0.3;
  bound_ok = bound_ok && dynamo_radius_bound(p) == 0.25 && dynamo_verdict(p) == DynamoVerdict::dynamo;
  p.omega = -2.0;
  bound_ok = bound_ok && dynamo_verdict(p) == DynamoVerdict::no_bound;
  r.checks.push_back(holds("dynamo predicate matches r > gamma^2 / (omega tau)", bound_ok));

  // Thin-tube limit on the kappa = tau = 1 helix.
  const FrenetCurve rope = frenet_integrate([](double) { return 1.0; }, [](double) { return 1.0; },
                                            kTwoPi, 0.01);
  double previous = std::numeric_limits<double>::infinity();
  bool monotone = true;
  double last = 0.0;
  std::string detail;
  for (double radius : {1e-1, 1e-2, 1e-3, 1e-4}) {
    RopeParams rp;
    rp.r = radius;
    rp.gamma = 0.7;
    rp.b_zero = 1.5;
    const double t = 1.3;
    const TubeMetric tube = tube_metric_factor(rp, rope);
    const auto bt = btheta_solution(rp, rope, tube).at(t);
    const double pure = rp.b_zero * std::exp(rp.gamma * t);
    double sup = 0.0;
    for (double v : bt) sup = std::max(sup, std::abs(v / pure - 1.0));
    monotone = monotone && sup < previous && sup <= std::expm1(kTwoPi * radius);
    previous = sup;
    last = sup;
    detail += fmt::format("{}r={:g}: {:.3e}", detail.empty() ? "" : ", ", radius, sup);
  }
  r.checks.push_back(holds("sup |B_theta / B0 e^(gamma t) - 1| decreases with r", monotone, detail));
  r.checks.push_back(at_most("sup deviation at r = 1e-4", last, 1e-3));
  return r;
}

CriterionResult criterion8(Suite& suite) {
  CriterionResult r{8, "divergence residual stays within 10x its initial value", {}, {}, 0.0};
  for (const auto& [key, run] : suite.ideal_runs()) {
    const auto& series = run->evolution.series;
    const double initial = series.front().div_residual;
    double worst = 0.0;
    for (const auto& s : series) worst = std::max(worst, s.div_residual);
    const double limit = 10.0 * std::max(initial, kDivFloor);
    r.checks.push_back(at_most(fmt::format("{}: max div residual", key), worst, limit,
                               fmt::format("initial {:.3e}", initial)));
  }
  return r;
}

}  // namespace

bool CriterionResult::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids) {
  Suite suite;
  std::vector<int> order = ids;
  if (order.empty()) order = {1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<CriterionResult> out;
  for (int id : order) {
    const auto start = Clock::now();
    CriterionResult r;
    switch (id) {
      case 1: r = criterion1(suite); break;
      case 2: r = criterion2(suite); break;
      case 3: r = criterion3(suite); break;
      case 4: r = criterion4(); break;
      case 5: r = criterion5(); break;
      case 6: r = criterion6(suite); break;
      case 7: r = criterion7(); break;
      case 8: r = criterion8(suite); break;
      default: throw ValidationError(fmt::format("no acceptance criterion {}", id));
    }
    r.seconds = seconds_since(start);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_criterion(const CriterionResult& r) {
  std::string out = fmt::format("{} criterion {}: {} ({:.2f} s)\n", r.passed() ? "PASS" : "FAIL", r.id,
                                r.title, r.seconds);
  for (const auto& c : r.checks) {
    out += fmt::format("  [{}] {}: {:.6e} (limit {:.1e}){}\n", c.passed ? "ok" : "FAIL", c.name,
                       c.value, c.tolerance, c.detail.empty() ? "" : "; " + c.detail);
  }
  out += r.report;
  return out;
}

}  // namespace dynamo
