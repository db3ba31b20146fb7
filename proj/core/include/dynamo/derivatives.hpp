#pragma once

#include <memory>

#include "dynamo/grid.hpp"

namespace dynamo {

/// First derivative along z: fourth-order central differences in the
/// interior, fourth-order one-sided/biased closures on the two nodes at
/// each end.
ScalarGrid d_z(const ScalarGrid& f);

/// Second derivative along z, fourth order everywhere (six-point one-sided
/// closures at the ends).
ScalarGrid d_zz(const ScalarGrid& f);

/// Fourier differentiation in the periodic p and q directions.
///
/// Plans are created once per grid shape; the differentiation calls are
/// const and allocate their own work buffers, so one instance can be shared
/// between threads.
class SpectralPlane {
 public:
  explicit SpectralPlane(const GridSpec& spec);
  ~SpectralPlane();
  SpectralPlane(SpectralPlane&&) noexcept;
  SpectralPlane& operator=(SpectralPlane&&) noexcept;
  SpectralPlane(const SpectralPlane&) = delete;
  SpectralPlane& operator=(const SpectralPlane&) = delete;

  ScalarGrid d_p(const ScalarGrid& f) const;
  ScalarGrid d_q(const ScalarGrid& f) const;
  ScalarGrid d_pp(const ScalarGrid& f) const;
  ScalarGrid d_qq(const ScalarGrid& f) const;

  const GridSpec& spec() const { return spec_; }

 private:
  enum class Mode { p, q, pp, qq };
  ScalarGrid apply(const ScalarGrid& f, Mode mode) const;

  struct Plans;
  GridSpec spec_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace dynamo
