#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace dynamo {

/// Frame / coordinate slot. The frame (e_p, e_q, e_z) is orthonormal and
/// aligned with the coordinate lines of (p, q, z).
enum class Axis : int { p = 0, q = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::p, Axis::q, Axis::z};

constexpr int index_of(Axis a) { return static_cast<int>(a); }
char axis_name(Axis a);

/// Uniform grid over T^2 x [z_min, z_max].
///
/// p and q are periodic on [0, 1) with n_p, n_q points (no duplicated end
/// point). z is a closed interval sampled at n_z points including both ends.
/// Storage order is z-slowest: one contiguous (p, q) slab per z node.
struct GridSpec {
  std::size_t n_p = 32;
  std::size_t n_q = 32;
  std::size_t n_z = 128;
  double z_min = 0.0;
  double z_max = 1.0;

  /// Smallest n_z the one-sided fourth-order z stencils can work with.
  static constexpr std::size_t kMinZPoints = 6;

  double dp() const { return 1.0 / static_cast<double>(n_p); }
  double dq() const { return 1.0 / static_cast<double>(n_q); }
  double dz() const { return (z_max - z_min) / static_cast<double>(n_z - 1); }

  double p(std::size_t i) const { return static_cast<double>(i) * dp(); }
  double q(std::size_t j) const { return static_cast<double>(j) * dq(); }
  double z(std::size_t k) const;

  std::size_t slab_size() const { return n_p * n_q; }
  std::size_t size() const { return n_p * n_q * n_z; }
  std::size_t index(std::size_t ip, std::size_t iq, std::size_t iz) const {
    return (iz * n_p + ip) * n_q + iq;
  }

  /// Throws ValidationError when the grid cannot support the operators.
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

/// A real scalar sampled on a GridSpec.
class ScalarGrid {
 public:
  ScalarGrid() = default;
  explicit ScalarGrid(const GridSpec& spec, double fill = 0.0);

  template <class F>
  static ScalarGrid sample(const GridSpec& spec, F&& f) {
    ScalarGrid g(spec);
    for (std::size_t k = 0; k < spec.n_z; ++k) {
      const double z = spec.z(k);
      for (std::size_t i = 0; i < spec.n_p; ++i) {
        const double p = spec.p(i);
        for (std::size_t j = 0; j < spec.n_q; ++j) {
          g.data_[spec.index(i, j, k)] = f(p, spec.q(j), z);
        }
      }
    }
    return g;
  }

  const GridSpec& spec() const { return spec_; }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<double> slab(std::size_t iz) {
    return {data_.data() + iz * spec_.slab_size(), spec_.slab_size()};
  }
  std::span<const double> slab(std::size_t iz) const {
    return {data_.data() + iz * spec_.slab_size(), spec_.slab_size()};
  }

  double& operator()(std::size_t ip, std::size_t iq, std::size_t iz) {
    return data_[spec_.index(ip, iq, iz)];
  }
  double operator()(std::size_t ip, std::size_t iq, std::size_t iz) const {
    return data_[spec_.index(ip, iq, iz)];
  }

  bool all_finite() const;
  double max_abs() const;

  ScalarGrid& operator+=(const ScalarGrid& o);
  ScalarGrid& operator-=(const ScalarGrid& o);
  ScalarGrid& operator*=(double s);

 private:
  GridSpec spec_{};
  std::vector<double> data_;
};

/// Vector field stored by its components on the orthonormal frame.
class FrameField {
 public:
  FrameField() = default;
  explicit FrameField(const GridSpec& spec)
      : components_{ScalarGrid(spec), ScalarGrid(spec), ScalarGrid(spec)} {}
  FrameField(ScalarGrid bp, ScalarGrid bq, ScalarGrid bz);

  /// Samples f(p, q, z) -> {B_p, B_q, B_z}.
  template <class F>
  static FrameField sample(const GridSpec& spec, F&& f) {
    FrameField out(spec);
    for (std::size_t k = 0; k < spec.n_z; ++k) {
      const double z = spec.z(k);
      for (std::size_t i = 0; i < spec.n_p; ++i) {
        const double p = spec.p(i);
        for (std::size_t j = 0; j < spec.n_q; ++j) {
          const std::array<double, 3> v = f(p, spec.q(j), z);
          for (int c = 0; c < 3; ++c) out.components_[c](i, j, k) = v[c];
        }
      }
    }
    return out;
  }

  /// The unit frame vector e_a as a constant field.
  static FrameField unit(const GridSpec& spec, Axis a);

  const GridSpec& spec() const { return components_[0].spec(); }
  ScalarGrid& operator[](Axis a) { return components_[index_of(a)]; }
  const ScalarGrid& operator[](Axis a) const { return components_[index_of(a)]; }

  bool all_finite() const;

  FrameField& operator+=(const FrameField& o);
  FrameField& operator-=(const FrameField& o);
  FrameField& operator*=(double s);

 private:
  std::array<ScalarGrid, 3> components_;
};

}  // namespace dynamo
