#pragma once

#include <memory>
#include <vector>

#include "dynamo/derivatives.hpp"
#include "dynamo/frame_metric.hpp"
#include "dynamo/grid.hpp"

namespace dynamo {

/// Sign of the first-order z term of the conformal scalar Laplacian,
///   Omega^{-1} [Delta_Arnold f  +/-  (1/2) (ln Omega)' d_z f].
/// `geometric` (+) is the Laplace-Beltrami operator of the conformal metric
/// and equals div(grad f). `reversed` (-) is the variant with the opposite
/// drift sign that appears in some of the dynamo literature.
enum class ConformalDrift { geometric, reversed };

/// grad, div, curl and Laplacians on frame components of a diagonal metric
/// with z-dependent scale factors.
///
/// p and q derivatives are spectral; z derivatives use fourth-order
/// differences. Derivatives of the scale factors enter analytically, so
/// constant frame fields see exact coefficients (e.g. curl e_p = -lambda e_q
/// up to rounding).
class FrameOperators {
 public:
  FrameOperators(FrameMetric metric, const GridSpec& grid);

  const FrameMetric& metric() const { return metric_; }
  const GridSpec& grid() const { return grid_; }

  FrameField grad(const ScalarGrid& f) const;
  ScalarGrid div(const FrameField& b) const;
  FrameField curl(const FrameField& b) const;
  ScalarGrid laplacian(const ScalarGrid& f,
                       ConformalDrift drift = ConformalDrift::geometric) const;
  /// grad(div B) - curl(curl B).
  FrameField vector_laplacian(const FrameField& b) const;

  /// Per-z-node coefficient tables (index = z node).
  const std::vector<double>& inverse_scale(Axis a) const { return inv_h_[index_of(a)]; }
  const std::vector<double>& log_scale_derivative(Axis a) const {
    return dlog_h_[index_of(a)];
  }

  const SpectralPlane& spectral() const { return *spectral_; }

 private:
  void check(const ScalarGrid& f) const;
  void check(const FrameField& b) const;

  FrameMetric metric_;
  GridSpec grid_;
  std::shared_ptr<const SpectralPlane> spectral_;
  std::array<std::vector<double>, 3> inv_h_;
  std::array<std::vector<double>, 3> dlog_h_;
  std::vector<double> log_omega_derivative_;
};

// Single-shot forms of the operators.
FrameField grad(const FrameMetric& metric, const ScalarGrid& f);
ScalarGrid div(const FrameMetric& metric, const FrameField& b);
FrameField curl(const FrameMetric& metric, const FrameField& b);
ScalarGrid laplacian_scalar(const FrameMetric& metric, const ScalarGrid& f,
                            ConformalDrift drift = ConformalDrift::geometric);
FrameField vector_laplacian(const FrameMetric& metric, const FrameField& b);

}  // namespace dynamo
