#include "dynamo/flux_rope.hpp"

#include <Eigen/Geometry>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace dynamo {
namespace {

struct Triad {
  Vec3 x, t, n, b;
};

Triad derivative(const Triad& y, double kappa, double tau) {
  return {y.t, kappa * y.n, -kappa * y.t + tau * y.b, -tau * y.n};
}

Triad advance(const Triad& y, double h, const Triad& d) {
  return {y.x + h * d.x, y.t + h * d.t, y.n + h * d.n, y.b + h * d.b};
}

void orthonormalize(Triad& y) {
  y.t.normalize();
  y.n -= y.n.dot(y.t) * y.t;
  y.n.normalize();
  y.b = y.t.cross(y.n);
}

void check_finite_params(const char* what, double v) {
  if (!std::isfinite(v)) throw ValidationError(fmt::format("{} must be finite", what));
}

}  // namespace

double FrenetCurve::max_kappa() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.kappa);
  return m;
}

double FrenetCurve::orthonormality_residual() const {
  double r = 0.0;
  for (const auto& s : samples) {
    r = std::max({r, std::abs(s.t.norm() - 1.0), std::abs(s.n.norm() - 1.0),
                  std::abs(s.b.norm() - 1.0), std::abs(s.t.dot(s.n)), std::abs(s.t.dot(s.b)),
                  std::abs(s.n.dot(s.b)), (s.b - s.t.cross(s.n)).norm()});
  }
  return r;
}

FrenetCurve frenet_integrate(const ArcProfile& kappa, const ArcProfile& tau, double s_max,
                             double ds, const FrenetStart& start) {
  if (!kappa || !tau) throw ValidationError("frenet_integrate: curvature and torsion profiles required");
  if (!(s_max > 0.0) || !std::isfinite(s_max)) throw ValidationError("frenet_integrate: s_max must be > 0");
  if (!(ds > 0.0) || !std::isfinite(ds)) throw ValidationError("frenet_integrate: ds must be > 0");
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(s_max / ds - 1e-9)));
  const double h = s_max / static_cast<double>(steps);

  auto sample_k = [&](double s) {
    const double k = kappa(s);
    if (!std::isfinite(k) || k < 0.0) {
      throw ValidationError(fmt::format("frenet_integrate: curvature {} at s = {} must be >= 0", k, s));
    }
    if (k * h > kMaxTurnPerStep) {
      throw ValidationError(fmt::format(
          "frenet_integrate: kappa * ds = {:.6g} exceeds {} at s = {}; reduce ds", k * h,
          kMaxTurnPerStep, s));
    }
    return k;
  };
  auto sample_t = [&](double s) {
    const double t = tau(s);
    if (!std::isfinite(t)) throw ValidationError(fmt::format("frenet_integrate: torsion at s = {} is not finite", s));
    return t;
  };

  Triad y{start.x, start.t, start.n, start.b};
  if (std::abs(y.t.norm() - 1.0) > 1e-8 || std::abs(y.t.dot(y.n)) > 1e-8 ||
      (y.b - y.t.cross(y.n)).norm() > 1e-8) {
    throw ValidationError("frenet_integrate: starting triad must be right-handed orthonormal");
  }

  FrenetCurve curve;
  curve.ds = h;
  curve.samples.reserve(steps + 1);
  double k0 = sample_k(0.0);
  double t0 = sample_t(0.0);
  curve.samples.push_back({0.0, y.x, y.t, y.n, y.b, k0, t0, 0.0});
  double torsion_integral = 0.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const double s = static_cast<double>(i) * h;
    const double s_next = static_cast<double>(i + 1) * h;
    const double km = sample_k(s + 0.5 * h);
    const double tm = sample_t(s + 0.5 * h);
    const double k1v = sample_k(s_next);
    const double t1v = sample_t(s_next);
    const Triad d1 = derivative(y, k0, t0);
    const Triad d2 = derivative(advance(y, 0.5 * h, d1), km, tm);
    const Triad d3 = derivative(advance(y, 0.5 * h, d2), km, tm);
    const Triad d4 = derivative(advance(y, h, d3), k1v, t1v);
    y.x += h / 6.0 * (d1.x + 2.0 * d2.x + 2.0 * d3.x + d4.x);
    y.t += h / 6.0 * (d1.t + 2.0 * d2.t + 2.0 * d3.t + d4.t);
    y.n += h / 6.0 * (d1.n + 2.0 * d2.n + 2.0 * d3.n + d4.n);
    y.b += h / 6.0 * (d1.b + 2.0 * d2.b + 2.0 * d3.b + d4.b);
    orthonormalize(y);
    // Simpson on the same nodes keeps the torsion integral at RK4 order.
    torsion_integral += h / 6.0 * (t0 + 4.0 * tm + t1v);
    k0 = k1v;
    t0 = t1v;
    curve.samples.push_back({s_next, y.x, y.t, y.n, y.b, k0, t0, torsion_integral});
  }
  return curve;
}

Vec3 Helix::position(double s) const {
  const Vec3& t0 = start.t;
  const Vec3& n0 = start.n;
  const Vec3& b0 = start.b;
  const double w2 = kappa * kappa + tau * tau;
  if (w2 == 0.0) return start.x + s * t0;
  const double w = std::sqrt(w2);
  const double phi = w * s;
  const double rad = kappa / w2;
  return start.x + rad * (1.0 - std::cos(phi)) * n0 +
         rad * std::sin(phi) * (kappa * t0 - tau * b0) / w + (tau * s / w) * axis();
}

Vec3 Helix::axis() const {
  const double w = std::hypot(kappa, tau);
  if (w == 0.0) return start.t;
  return (tau * start.t + kappa * start.b) / w;
}

void RopeParams::validate() const {
  for (auto [name, v] : {std::pair{"r", r}, {"theta_r", theta_r}, {"omega", omega},
                         {"gamma", gamma}, {"tau", tau}, {"v_theta", v_theta}, {"v_s", v_s},
                         {"b0", b0}, {"b1", b1}, {"b_zero", b_zero}}) {
    check_finite_params(name, v);
  }
  if (r < 0.0) throw ValidationError(fmt::format("rope radius r = {} must be >= 0", r));
}

double tube_metric_factor(double r, double kappa, double theta) {
  return 1.0 - r * kappa * std::cos(theta);
}

TubeMetric tube_metric_factor(const RopeParams& params, const FrenetCurve& curve) {
  params.validate();
  const double kmax = curve.max_kappa();
  if (kmax > 0.0 && params.r * kmax >= 1.0) {
    throw ValidationError(fmt::format(
        "tube radius r = {} must be below 1 / max kappa = {}", params.r, 1.0 / kmax));
  }
  TubeMetric tm;
  tm.s.reserve(curve.samples.size());
  for (const auto& smp : curve.samples) {
    const double theta = params.theta_r - smp.torsion_integral;
    const double k = tube_metric_factor(params.r, smp.kappa, theta);
    if (!(k > 0.0)) {
      throw ValidationError(fmt::format("tube metric factor K = {} <= 0 at s = {}", k, smp.s));
    }
    tm.s.push_back(smp.s);
    tm.theta.push_back(theta);
    tm.K.push_back(k);
    tm.max_deviation = std::max(tm.max_deviation, std::abs(1.0 - k));
  }
  tm.thin = tm.max_deviation < kThinTubeDeviation;
  return tm;
}

double amplification_ratio(const RopeParams& params) {
  params.validate();
  return amplification_ratio(params.tau, params.omega, params.r, params.gamma);
}

std::optional<double> dynamo_radius_bound(const RopeParams& params) {
  params.validate();
  return dynamo_radius_bound(params.gamma, params.omega, params.tau);
}

DynamoVerdict dynamo_verdict(const RopeParams& params) {
  const auto bound = dynamo_radius_bound(params);
  if (!bound) return DynamoVerdict::no_bound;
  return params.r > *bound ? DynamoVerdict::dynamo : DynamoVerdict::below_bound;
}

const char* verdict_name(DynamoVerdict v) {
  switch (v) {
    case DynamoVerdict::dynamo: return "dynamo";
    case DynamoVerdict::below_bound: return "below_bound";
    case DynamoVerdict::no_bound: return "no_bound";
  }
  return "unknown";
}

std::vector<double> BThetaProfile::at(double t) const {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = at(i, t);
  return out;
}

BThetaProfile btheta_solution(const RopeParams& params, const FrenetCurve& curve,
                              const TubeMetric& tube) {
  params.validate();
  if (tube.K.size() != curve.samples.size()) {
    throw ValidationError("btheta_solution: tube metric and curve sample counts differ");
  }
  BThetaProfile out;
  out.gamma = params.gamma;
  out.b_zero = params.b_zero;
  out.s = tube.s;
  out.integral.assign(tube.K.size(), 0.0);
  // dtheta = -tau ds
  for (std::size_t i = 1; i < tube.K.size(); ++i) {
    const double f0 = -(1.0 - tube.K[i - 1]) * curve.samples[i - 1].tau;
    const double f1 = -(1.0 - tube.K[i]) * curve.samples[i].tau;
    out.integral[i] = out.integral[i - 1] + 0.5 * (f0 + f1) * (tube.s[i] - tube.s[i - 1]);
  }
  return out;
}

double continuity_residual(double r, double kappa, double tau, double v, double dv_ds) {
  return dv_ds + v * r * tau * kappa;
}

std::vector<double> continuity_residual(const RopeParams& params, const FrenetCurve& curve,
                                        const ArcProfile& v_theta, const ArcProfile& dv_theta) {
  params.validate();
  if (!v_theta || !dv_theta) throw ValidationError("continuity_residual: profile and derivative required");
  std::vector<double> out;
  out.reserve(curve.samples.size());
  for (const auto& smp : curve.samples) {
    out.push_back(continuity_residual(params.r, smp.kappa, smp.tau, v_theta(smp.s), dv_theta(smp.s)));
  }
  return out;
}

std::vector<double> continuity_solution(const RopeParams& params, const FrenetCurve& curve,
                                        double v_theta0) {
  params.validate();
  std::vector<double> out;
  out.reserve(curve.samples.size());
  double integral = 0.0;
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    if (i > 0) {
      const auto& a = curve.samples[i - 1];
      const auto& b = curve.samples[i];
      integral += 0.5 * (a.tau * a.kappa + b.tau * b.kappa) * (b.s - a.s);
    }
    out.push_back(v_theta0 * std::exp(-params.r * integral));
  }
  return out;
}

BalanceResiduals balance_residuals(const RopeParams& params, double theta, double b_theta,
                                   double b_s) {
  params.validate();
  const double st = std::sin(theta);
  if (st == 0.0) throw ValidationError("balance_residuals: sin(theta) must be nonzero");
  if (params.tau == 0.0 || params.r == 0.0) {
    throw ValidationError("balance_residuals: tau and r must be nonzero");
  }
  BalanceResiduals out;
  out.first = (params.gamma + params.tau * params.v_theta * st) * b_theta;
  out.second = st * b_theta +
               b_s / st * (1.0 + params.v_theta / (params.tau * params.tau * params.r));
  return out;
}

std::string format_rope_csv(const FrenetCurve& curve, const TubeMetric& tube,
                            const std::vector<double>& v_theta, const std::vector<double>& b_theta) {
  const std::size_t n = curve.samples.size();
  if (tube.K.size() != n || v_theta.size() != n || b_theta.size() != n) {
    throw ValidationError("format_rope_csv: column lengths differ");
  }
  std::string out = "s,kappa,tau,K,theta,v_theta,B_theta\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& smp = curve.samples[i];
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", smp.s,
                       smp.kappa, smp.tau, tube.K[i], tube.theta[i], v_theta[i], b_theta[i]);
  }
  return out;
}

}  // namespace dynamo
