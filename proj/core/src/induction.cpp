#include "dynamo/induction.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dynamo/errors.hpp"

namespace dynamo {
namespace {

// Largest |eigenvalue| of the resistive operator, used for the explicit
// diffusion limit: spectral p/q plus the fourth-order z stencil (16/3 h^-2).
double diffusion_spectral_radius(const FrameMetric& metric, const GridSpec& grid) {
  const double kp = std::numbers::pi * static_cast<double>(grid.n_p);
  const double kq = std::numbers::pi * static_cast<double>(grid.n_q);
  const double kz2 = 16.0 / (3.0 * grid.dz() * grid.dz());
  double rho = 0.0;
  for (std::size_t k = 0; k < grid.n_z; ++k) {
    const double z = grid.z(k);
    const double lz = metric.lambda() * z;
    const double inv_omega = 1.0 / metric.conformal().value(z);
    const double v = inv_omega * (std::exp(2.0 * lz) * kp * kp + std::exp(-2.0 * lz) * kq * kq +
                                  kz2 + metric.lambda() * metric.lambda());
    rho = std::max(rho, v);
  }
  return rho;
}

constexpr double kDiffusionLimit = 2.0;  // RK4 real-axis stability is ~2.78

// y = x + c * k
void axpy(FrameField& y, const FrameField& x, double c, const FrameField& k) {
  for (Axis a : kAxes) {
    auto dst = y[a].values();
    auto xs = x[a].values();
    auto ks = k[a].values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = xs[i] + c * ks[i];
  }
}

double field_max_abs(const FrameField& b) {
  double m = 0.0;
  for (Axis a : kAxes) m = std::max(m, b[a].max_abs());
  return m;
}

}  // namespace

std::vector<double> MeasurementWindow::weights(const GridSpec& grid) const {
  validate();
  const double span = grid.z_max - grid.z_min;
  const double z_lo = grid.z_min + lo * span;
  const double z_hi = grid.z_min + hi * span;
  const double tol = 1e-9 * grid.dz();
  std::vector<std::size_t> inside;
  for (std::size_t k = 0; k < grid.n_z; ++k) {
    const double z = grid.z(k);
    if (z >= z_lo - tol && z <= z_hi + tol) inside.push_back(k);
  }
  if (inside.size() < 2) {
    throw ValidationError("measurement window covers fewer than two z nodes");
  }
  std::vector<double> w(grid.n_z, 0.0);
  const double h = grid.dz();
  for (std::size_t n = 0; n < inside.size(); ++n) {
    const bool end = n == 0 || n + 1 == inside.size();
    w[inside[n]] = end ? 0.5 * h : h;
  }
  return w;
}

void MeasurementWindow::validate() const {
  if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) {
    throw ValidationError(fmt::format("measurement window [{}, {}] must satisfy 0 <= lo < hi <= 1",
                                      lo, hi));
  }
}

double DynamoScenario::effective_speed(double z) const {
  return flow_speed / metric.conformal().value(z);
}

double DynamoScenario::max_effective_speed() const {
  double m = 0.0;
  for (std::size_t k = 0; k < grid.n_z; ++k) m = std::max(m, std::abs(effective_speed(grid.z(k))));
  return m;
}

double DynamoScenario::courant_number() const { return dt * max_effective_speed() / grid.dz(); }

std::size_t DynamoScenario::step_count() const {
  const double n = std::ceil(t_end / dt - 1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

void DynamoScenario::validate() const {
  grid.validate();
  metric.validate(grid.z_min, grid.z_max);
  window.validate();
  (void)window.weights(grid);
  if (!initial) throw ValidationError("scenario: initial field profile is missing");
  if (!std::isfinite(flow_speed)) throw ValidationError("scenario: flow speed must be finite");
  if (!std::isfinite(resistivity) || resistivity < 0.0) {
    throw ValidationError("scenario: resistivity must be finite and >= 0");
  }
  if (!std::isfinite(t_end) || t_end <= 0.0) throw ValidationError("scenario: t_end must be > 0");
  if (!std::isfinite(dt) || dt <= 0.0) throw ValidationError("scenario: dt must be > 0");
  if (sample_every == 0) throw ValidationError("scenario: sample_every must be >= 1");
  const double cfl = courant_number();
  if (!std::isfinite(cfl) || cfl > kMaxCourant * (1.0 + 1e-12)) {
    throw ValidationError(fmt::format(
        "scenario: dt = {} violates the advective bound (Courant number {:.6g} > {})", dt, cfl,
        kMaxCourant));
  }
  if (resistivity > 0.0) {
    const double rho = resistivity * diffusion_spectral_radius(metric, grid);
    if (dt * rho > kDiffusionLimit) {
      throw ValidationError(fmt::format(
          "scenario: dt = {} violates the explicit diffusion limit (dt * eta * rho = {:.6g} > {})",
          dt, dt * rho, kDiffusionLimit));
    }
  }
}

FrameField DynamoScenario::initial_field() const {
  return FrameField::sample(grid, [this](double p, double q, double z) { return initial(p, q, z); });
}

double stable_time_step(const FrameMetric& metric, const GridSpec& grid, double flow_speed,
                        double resistivity, double courant) {
  grid.validate();
  double vmax = 0.0;
  for (std::size_t k = 0; k < grid.n_z; ++k) {
    vmax = std::max(vmax, std::abs(flow_speed / metric.conformal().value(grid.z(k))));
  }
  double dt = vmax > 0.0 ? courant * grid.dz() / vmax : courant * grid.dz();
  if (resistivity > 0.0) {
    dt = std::min(dt, 0.9 * kDiffusionLimit / (resistivity * diffusion_spectral_radius(metric, grid)));
  }
  return dt;
}

InductionOperator::InductionOperator(const DynamoScenario& s)
    : lambda_(s.metric.lambda()), eta_(s.resistivity), ops_(s.metric, s.grid) {
  const std::size_t nz = s.grid.n_z;
  v_eff_.resize(nz);
  for (auto& v : source_) v.resize(nz);
  inv_omega_.resize(nz);
  e2lz_.resize(nz);
  em2lz_.resize(nz);
  elz_.resize(nz);
  emlz_.resize(nz);
  drift_.resize(nz);
  const double sign = s.drift == ConformalDrift::geometric ? 1.0 : -1.0;
  for (std::size_t k = 0; k < nz; ++k) {
    const double z = s.grid.z(k);
    const double omega = s.metric.conformal().value(z);
    const double log_d = s.metric.conformal().log_derivative(z);
    const double ve = s.flow_speed / omega;
    v_eff_[k] = ve;
    source_[0][k] = -lambda_ * ve;
    source_[1][k] = lambda_ * ve;
    source_[2][k] = ve * log_d;
    inv_omega_[k] = 1.0 / omega;
    elz_[k] = std::exp(lambda_ * z);
    emlz_[k] = std::exp(-lambda_ * z);
    e2lz_[k] = std::exp(2.0 * lambda_ * z);
    em2lz_[k] = std::exp(-2.0 * lambda_ * z);
    drift_[k] = sign * 0.5 * inv_omega_[k] * log_d;
  }
}

FrameField InductionOperator::rhs(const FrameField& b) const {
  const GridSpec& g = ops_.grid();
  if (!(b.spec() == g)) throw ValidationError("induction: field grid does not match scenario");
  const std::size_t m = g.slab_size();

  std::array<ScalarGrid, 3> dz{d_z(b[Axis::p]), d_z(b[Axis::q]), d_z(b[Axis::z])};
  FrameField out(g);
  for (int a = 0; a < 3; ++a) {
    const Axis ax = kAxes[a];
    for (std::size_t k = 0; k < g.n_z; ++k) {
      auto dst = out[ax].slab(k);
      auto bs = b[ax].slab(k);
      auto ds = dz[a].slab(k);
      const double ve = v_eff_[k];
      const double src = source_[a][k];
      for (std::size_t i = 0; i < m; ++i) dst[i] = -ve * ds[i] + src * bs[i];
    }
  }
  if (eta_ == 0.0) return out;

  const SpectralPlane& sp = ops_.spectral();
  const double lam2 = lambda_ * lambda_;
  const ScalarGrid dpbz = sp.d_p(b[Axis::z]);
  const ScalarGrid dqbz = sp.d_q(b[Axis::z]);
  for (int a = 0; a < 3; ++a) {
    const Axis ax = kAxes[a];
    const ScalarGrid fpp = sp.d_pp(b[ax]);
    const ScalarGrid fqq = sp.d_qq(b[ax]);
    const ScalarGrid fzz = d_zz(b[ax]);
    for (std::size_t k = 0; k < g.n_z; ++k) {
      auto dst = out[ax].slab(k);
      auto bs = b[ax].slab(k);
      auto ds = dz[a].slab(k);
      auto pp = fpp.slab(k);
      auto qq = fqq.slab(k);
      auto zz = fzz.slab(k);
      const double c = eta_ * inv_omega_[k];
      const double cd = eta_ * drift_[k];
      for (std::size_t i = 0; i < m; ++i) {
        double lap = e2lz_[k] * pp[i] + em2lz_[k] * qq[i] + zz[i];
        switch (ax) {
          case Axis::p: lap += -lam2 * bs[i] - 2.0 * lambda_ * elz_[k] * dpbz.slab(k)[i]; break;
          case Axis::q: lap += -lam2 * bs[i] + 2.0 * lambda_ * emlz_[k] * dqbz.slab(k)[i]; break;
          case Axis::z: lap += -2.0 * lambda_ * ds[i]; break;
        }
        dst[i] += c * lap + cd * ds[i];
      }
    }
  }
  return out;
}

FrameField induction_rhs(const DynamoScenario& scenario, const FrameField& b) {
  scenario.validate();
  return InductionOperator(scenario).rhs(b);
}

NormSample measure(const FrameOperators& ops, const FrameField& b,
                   const MeasurementWindow& window, double t) {
  const GridSpec& g = ops.grid();
  const std::vector<double> w = window.weights(g);
  const double cell = g.dp() * g.dq();
  NormSample s;
  s.t = t;
  std::array<double, 3> sum{};
  for (std::size_t k = 0; k < g.n_z; ++k) {
    if (w[k] == 0.0) continue;
    const double wk = w[k] * ops.metric().volume_element(g.z(k)) * cell;
    for (int a = 0; a < 3; ++a) {
      double acc = 0.0;
      for (double v : b[kAxes[a]].slab(k)) {
        acc += v * v;
        s.max_abs[a] = std::max(s.max_abs[a], std::abs(v));
      }
      sum[a] += wk * acc;
    }
  }
  for (int a = 0; a < 3; ++a) s.l2[a] = std::sqrt(sum[a]);
  s.l2_total = std::sqrt(sum[0] + sum[1] + sum[2]);

  const ScalarGrid divb = ops.div(b);
  double dsum = 0.0;
  for (std::size_t k = 0; k < g.n_z; ++k) {
    if (w[k] == 0.0) continue;
    const double wk = w[k] * ops.metric().volume_element(g.z(k)) * cell;
    double acc = 0.0;
    for (double v : divb.slab(k)) acc += v * v;
    dsum += wk * acc;
  }
  s.div_residual = s.l2_total > 0.0 ? std::sqrt(dsum) / s.l2_total : std::sqrt(dsum);
  return s;
}

namespace {

class BoundaryData {
 public:
  explicit BoundaryData(const DynamoScenario& s) : s_(s) {
    const std::size_t last = s.grid.n_z - 1;
    if (s.flow_speed > 0.0) nodes_.push_back(0);
    if (s.flow_speed < 0.0) nodes_.push_back(last);
    if (s.resistivity > 0.0) {
      if (std::find(nodes_.begin(), nodes_.end(), 0) == nodes_.end()) nodes_.push_back(0);
      if (std::find(nodes_.begin(), nodes_.end(), last) == nodes_.end()) nodes_.push_back(last);
    }
  }

  void apply(FrameField& b, double t) const {
    const GridSpec& g = s_.grid;
    for (std::size_t k : nodes_) {
      const double z = g.z(k);
      const CharacteristicFoot foot = trace_characteristic(s_, z, t);
      std::array<double, 3> factor;
      for (int a = 0; a < 3; ++a) factor[a] = std::exp(foot.log_growth[a]);
      for (std::size_t i = 0; i < g.n_p; ++i) {
        for (std::size_t j = 0; j < g.n_q; ++j) {
          const auto v = s_.initial(g.p(i), g.q(j), foot.z0);
          for (int a = 0; a < 3; ++a) b[kAxes[a]](i, j, k) = v[a] * factor[a];
        }
      }
    }
  }

 private:
  const DynamoScenario& s_;
  std::vector<std::size_t> nodes_;
};

}  // namespace

Evolution evolve(const DynamoScenario& s) {
  s.validate();
  const InductionOperator op(s);
  const BoundaryData boundary(s);
  const std::size_t n = s.step_count();
  const double dt = s.t_end / static_cast<double>(n);

  Evolution ev;
  FrameField b = s.initial_field();
  if (!b.all_finite()) throw ValidationError("initial field has non-finite values");
  ev.series.push_back(measure(op.frame(), b, s.window, 0.0));
  const double initial_max = field_max_abs(b);

  FrameField y(s.grid);
  double t = 0.0;
  std::size_t step = 0;
  for (step = 1; step <= n; ++step) {
    const double t0 = t;
    const FrameField k1 = op.rhs(b);
    axpy(y, b, 0.5 * dt, k1);
    boundary.apply(y, t0 + 0.5 * dt);
    const FrameField k2 = op.rhs(y);
    axpy(y, b, 0.5 * dt, k2);
    boundary.apply(y, t0 + 0.5 * dt);
    const FrameField k3 = op.rhs(y);
    axpy(y, b, dt, k3);
    boundary.apply(y, t0 + dt);
    const FrameField k4 = op.rhs(y);
    for (Axis a : kAxes) {
      auto dst = b[a].values();
      auto r1 = k1[a].values();
      auto r2 = k2[a].values();
      auto r3 = k3[a].values();
      auto r4 = k4[a].values();
      for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] += dt / 6.0 * (r1[i] + 2.0 * r2[i] + 2.0 * r3[i] + r4[i]);
      }
    }
    t = static_cast<double>(step) * dt;
    boundary.apply(b, t);

    if (!b.all_finite()) {
      throw NumericalError(fmt::format("evolve: non-finite field at t = {} (step {})", t, step));
    }
    const bool overflow = initial_max > 0.0 && field_max_abs(b) > kOverflowGuard * initial_max;
    if (overflow || step % s.sample_every == 0 || step == n) {
      ev.series.push_back(measure(op.frame(), b, s.window, t));
    }
    if (overflow) {
      ev.status = EvolutionStatus::overflow_halt;
      break;
    }
  }
  ev.steps = std::min(step, n);
  ev.t_final = t;
  ev.field = std::move(b);
  return ev;
}

double relative_l2_error(const FrameOperators& ops, const FrameField& a, const FrameField& b,
                         const MeasurementWindow& window) {
  const GridSpec& g = ops.grid();
  if (!(a.spec() == g) || !(b.spec() == g)) throw ValidationError("relative_l2_error: grid mismatch");
  const std::vector<double> w = window.weights(g);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < g.n_z; ++k) {
    if (w[k] == 0.0) continue;
    const double wk = w[k] * ops.metric().volume_element(g.z(k));
    for (Axis ax : kAxes) {
      auto as = a[ax].slab(k);
      auto bs = b[ax].slab(k);
      for (std::size_t i = 0; i < as.size(); ++i) {
        num += wk * (as[i] - bs[i]) * (as[i] - bs[i]);
        den += wk * bs[i] * bs[i];
      }
    }
  }
  if (den == 0.0) throw NumericalError("relative_l2_error: reference field vanishes on window");
  return std::sqrt(num / den);
}

}  // namespace dynamo
