#include "dynamo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynamo/errors.hpp"

namespace dynamo {

char axis_name(Axis a) {
  switch (a) {
    case Axis::p: return 'p';
    case Axis::q: return 'q';
    case Axis::z: return 'z';
  }
  return '?';
}

double GridSpec::z(std::size_t k) const {
  if (k + 1 == n_z) return z_max;
  return z_min + static_cast<double>(k) * dz();
}

void GridSpec::validate() const {
  if (n_p == 0 || n_q == 0) {
    throw ValidationError("grid: n_p and n_q must be at least 1");
  }
  if (n_z < kMinZPoints) {
    throw ValidationError("grid: n_z = " + std::to_string(n_z) +
                          " is too small for the z stencils (need >= " +
                          std::to_string(kMinZPoints) + ")");
  }
  if (!std::isfinite(z_min) || !std::isfinite(z_max) || !(z_max > z_min)) {
    throw ValidationError("grid: z range must be finite with z_max > z_min");
  }
}

ScalarGrid::ScalarGrid(const GridSpec& spec, double fill)
    : spec_(spec), data_(spec.size(), fill) {}

bool ScalarGrid::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

double ScalarGrid::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

ScalarGrid& ScalarGrid::operator+=(const ScalarGrid& o) {
  if (!(o.spec_ == spec_)) throw ValidationError("grid shape mismatch in +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ScalarGrid& ScalarGrid::operator-=(const ScalarGrid& o) {
  if (!(o.spec_ == spec_)) throw ValidationError("grid shape mismatch in -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ScalarGrid& ScalarGrid::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

FrameField::FrameField(ScalarGrid bp, ScalarGrid bq, ScalarGrid bz)
    : components_{std::move(bp), std::move(bq), std::move(bz)} {
  const GridSpec& s = components_[0].spec();
  if (!(components_[1].spec() == s) || !(components_[2].spec() == s)) {
    throw ValidationError("frame field components must share one grid");
  }
}

FrameField FrameField::unit(const GridSpec& spec, Axis a) {
  FrameField f(spec);
  f[a] = ScalarGrid(spec, 1.0);
  return f;
}

bool FrameField::all_finite() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const ScalarGrid& g) { return g.all_finite(); });
}

FrameField& FrameField::operator+=(const FrameField& o) {
  for (int c = 0; c < 3; ++c) components_[c] += o.components_[c];
  return *this;
}

FrameField& FrameField::operator-=(const FrameField& o) {
  for (int c = 0; c < 3; ++c) components_[c] -= o.components_[c];
  return *this;
}

FrameField& FrameField::operator*=(double s) {
  for (auto& g : components_) g *= s;
  return *this;
}

}  // namespace dynamo
