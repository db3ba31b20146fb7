#include "dynamo/frame_metric.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <string>

#include "dynamo/errors.hpp"

namespace dynamo {

struct ConformalFactor::Table {
  double z_first;
  double z_last;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
};

ConformalFactor ConformalFactor::identity() { return ConformalFactor(Kind::identity, 1.0); }

ConformalFactor ConformalFactor::constant(double c) {
  if (!std::isfinite(c) || c <= 0.0) {
    throw ValidationError("conformal factor: constant must be positive and finite");
  }
  return ConformalFactor(Kind::constant, c);
}

ConformalFactor ConformalFactor::exponential(double rate) {
  if (!std::isfinite(rate)) throw ValidationError("conformal factor: non-finite exponent");
  return ConformalFactor(Kind::exponential, rate);
}

ConformalFactor ConformalFactor::tabulated(double z_first, double z_last,
                                           std::vector<double> values) {
  if (values.size() < 4) throw ValidationError("conformal factor: need >= 4 table samples");
  if (!(z_last > z_first)) throw ValidationError("conformal factor: empty table range");
  for (double v : values) {
    if (!std::isfinite(v) || v <= 0.0) {
      throw ValidationError("conformal factor: table samples must be positive");
    }
  }
  const double h = (z_last - z_first) / static_cast<double>(values.size() - 1);
  auto table = std::make_shared<const Table>(Table{
      z_first, z_last,
      boost::math::interpolators::cardinal_cubic_b_spline<double>(values.begin(), values.end(),
                                                                  z_first, h)});
  return ConformalFactor(Kind::tabulated, 0.0, std::move(table));
}

double ConformalFactor::value(double z) const { return jet(z).value; }

double ConformalFactor::log_derivative(double z) const {
  switch (kind_) {
    case Kind::identity:
    case Kind::constant: return 0.0;
    case Kind::exponential: return parameter_;
    case Kind::tabulated: {
      const Jet j = jet(z);
      return j.d1 / j.value;
    }
  }
  return 0.0;
}

double ConformalFactor::inverse_sqrt(double z) const {
  switch (kind_) {
    case Kind::identity: return 1.0;
    case Kind::constant: return 1.0 / std::sqrt(parameter_);
    case Kind::exponential: return std::exp(-0.5 * parameter_ * z);
    case Kind::tabulated: return 1.0 / std::sqrt(value(z));
  }
  return 1.0;
}

Jet ConformalFactor::jet(double z) const {
  switch (kind_) {
    case Kind::identity: return {1.0, 0.0, 0.0};
    case Kind::constant: return {parameter_, 0.0, 0.0};
    case Kind::exponential: {
      const double v = std::exp(parameter_ * z);
      return {v, parameter_ * v, parameter_ * parameter_ * v};
    }
    case Kind::tabulated: {
      // Outside the table the spline would extrapolate; hold the end value.
      const Table& t = *table_;
      if (z <= t.z_first) return {t.spline(t.z_first), 0.0, 0.0};
      if (z >= t.z_last) return {t.spline(t.z_last), 0.0, 0.0};
      return {t.spline(z), t.spline.prime(z), t.spline.double_prime(z)};
    }
  }
  return {1.0, 0.0, 0.0};
}

void ConformalFactor::validate(double z0, double z1) const {
  constexpr int kSamples = 257;
  for (int i = 0; i < kSamples; ++i) {
    const double z = z0 + (z1 - z0) * i / (kSamples - 1);
    const double v = value(z);
    if (!std::isfinite(v) || v <= 0.0) {
      throw ValidationError("conformal factor is not positive at z = " + std::to_string(z));
    }
  }
}

FrameMetric::FrameMetric(double lambda, ConformalFactor omega)
    : lambda_(lambda), omega_(std::move(omega)) {
  if (!std::isfinite(lambda_)) throw ValidationError("metric: lambda must be finite");
}

std::array<double, 3> FrameMetric::scale_factors(double z) const {
  const double s = omega_.kind() == ConformalFactor::Kind::identity
                       ? 1.0
                       : std::sqrt(omega_.value(z));
  return {s * std::exp(-lambda_ * z), s * std::exp(lambda_ * z), s};
}

std::array<double, 3> FrameMetric::inverse_scale_factors(double z) const {
  const double s = omega_.inverse_sqrt(z);
  return {s * std::exp(lambda_ * z), s * std::exp(-lambda_ * z), s};
}

std::array<double, 3> FrameMetric::log_scale_derivatives(double z) const {
  const double half = 0.5 * omega_.log_derivative(z);
  return {half - lambda_, half + lambda_, half};
}

std::array<Jet, 3> FrameMetric::scale_factor_jets(double z) const {
  // h = sqrt(Omega) * exp(c z) with c in {-lambda, lambda, 0}.
  const Jet om = omega_.jet(z);
  const double s = std::sqrt(om.value);
  const double s1 = 0.5 * om.d1 / s;
  const double s2 = 0.5 * om.d2 / s - 0.25 * om.d1 * om.d1 / (om.value * s);
  std::array<Jet, 3> out;
  const std::array<double, 3> rates{-lambda_, lambda_, 0.0};
  for (int a = 0; a < 3; ++a) {
    const double c = rates[a];
    const double e = std::exp(c * z);
    out[a] = {s * e, (s1 + c * s) * e, (s2 + 2.0 * c * s1 + c * c * s) * e};
  }
  return out;
}

double FrameMetric::determinant(double z) const {
  const auto h = scale_factors(z);
  const double v = h[0] * h[1] * h[2];
  return v * v;
}

double FrameMetric::volume_element(double z) const {
  const auto h = scale_factors(z);
  return h[0] * h[1] * h[2];
}

void FrameMetric::validate(double z0, double z1) const {
  omega_.validate(z0, z1);
  for (double z : {z0, z1, 0.5 * (z0 + z1)}) {
    for (double h : scale_factors(z)) {
      if (!std::isfinite(h) || h <= 0.0) {
        throw ValidationError("metric: scale factor not positive/finite at z = " +
                              std::to_string(z));
      }
    }
  }
}

}  // namespace dynamo
