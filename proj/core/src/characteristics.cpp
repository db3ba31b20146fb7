#include <cmath>

#include "dynamo/errors.hpp"
#include "dynamo/induction.hpp"

namespace dynamo {
namespace {

constexpr int kTraceSubsteps = 512;

struct TraceState {
  double z;
  std::array<double, 3> g;
};

}  // namespace

CharacteristicFoot trace_characteristic(const DynamoScenario& s, double z, double t) {
  if (!std::isfinite(z) || !std::isfinite(t) || t < 0.0) {
    throw ValidationError("trace_characteristic: z and t must be finite with t >= 0");
  }
  const double lambda = s.metric.lambda();
  const ConformalFactor& omega = s.metric.conformal();
  CharacteristicFoot foot;
  foot.z0 = z;
  if (t > 0.0) {
    const auto kind = omega.kind();
    if (kind == ConformalFactor::Kind::identity || kind == ConformalFactor::Kind::constant) {
      const double ve = s.flow_speed / omega.value(z);
      foot.z0 = z - ve * t;
      foot.log_growth = {-lambda * ve * t, lambda * ve * t, 0.0};
    } else {
      // Backward RK4 in time; the growth integrals ride along as extra states.
      auto deriv = [&](const TraceState& st) {
        const double ve = s.flow_speed / omega.value(st.z);
        return TraceState{-ve, {-lambda * ve, lambda * ve, ve * omega.log_derivative(st.z)}};
      };
      auto add = [](const TraceState& a, double c, const TraceState& d) {
        return TraceState{a.z + c * d.z, {a.g[0] + c * d.g[0], a.g[1] + c * d.g[1],
                                           a.g[2] + c * d.g[2]}};
      };
      TraceState st{z, {0.0, 0.0, 0.0}};
      const double h = t / kTraceSubsteps;
      for (int n = 0; n < kTraceSubsteps; ++n) {
        const TraceState k1 = deriv(st);
        const TraceState k2 = deriv(add(st, 0.5 * h, k1));
        const TraceState k3 = deriv(add(st, 0.5 * h, k2));
        const TraceState k4 = deriv(add(st, h, k3));
        st.z += h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z);
        for (int a = 0; a < 3; ++a) {
          st.g[a] += h / 6.0 * (k1.g[a] + 2.0 * k2.g[a] + 2.0 * k3.g[a] + k4.g[a]);
        }
      }
      foot.z0 = st.z;
      foot.log_growth = st.g;
    }
  }
  const double tol = 1e-12 * (1.0 + std::abs(s.grid.z_max - s.grid.z_min));
  foot.left_domain = foot.z0 < s.grid.z_min - tol || foot.z0 > s.grid.z_max + tol;
  if (!std::isfinite(foot.z0)) throw NumericalError("trace_characteristic: non-finite foot");
  return foot;
}

std::array<double, 3> characteristic_value(const DynamoScenario& s, double p, double q, double z,
                                           double t) {
  if (!s.initial) throw ValidationError("characteristic_value: initial profile is missing");
  const CharacteristicFoot foot = trace_characteristic(s, z, t);
  auto v = s.initial(p, q, foot.z0);
  for (int a = 0; a < 3; ++a) v[a] *= std::exp(foot.log_growth[a]);
  return v;
}

OracleField characteristics_oracle(const DynamoScenario& s, double t) {
  if (!s.initial) throw ValidationError("characteristics_oracle: initial profile is missing");
  s.grid.validate();
  OracleField out{FrameField(s.grid), 0};
  const GridSpec& g = s.grid;
  for (std::size_t k = 0; k < g.n_z; ++k) {
    const CharacteristicFoot foot = trace_characteristic(s, g.z(k), t);
    if (foot.left_domain) ++out.nodes_outside_domain;
    std::array<double, 3> factor;
    for (int a = 0; a < 3; ++a) factor[a] = std::exp(foot.log_growth[a]);
    for (std::size_t i = 0; i < g.n_p; ++i) {
      for (std::size_t j = 0; j < g.n_q; ++j) {
        const auto v = s.initial(g.p(i), g.q(j), foot.z0);
        for (int a = 0; a < 3; ++a) out.field[kAxes[a]](i, j, k) = v[a] * factor[a];
      }
    }
  }
  return out;
}

}  // namespace dynamo
