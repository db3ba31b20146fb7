#pragma once

#include <array>
#include <memory>
#include <vector>

namespace dynamo {

/// Value with its first two z-derivatives.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Positive conformal factor Omega(z) multiplying a metric.
class ConformalFactor {
 public:
  enum class Kind { identity, constant, exponential, tabulated };

  /// Omega == 1, log-derivative == 0.
  static ConformalFactor identity();
  /// Omega == c > 0.
  static ConformalFactor constant(double c);
  /// Omega(z) = exp(rate * z); the log-derivative is `rate` everywhere.
  static ConformalFactor exponential(double rate);
  /// Uniformly spaced samples on [z_first, z_last], interpolated by a cubic
  /// B-spline. All samples must be positive.
  static ConformalFactor tabulated(double z_first, double z_last, std::vector<double> values);

  Kind kind() const { return kind_; }
  /// Constant value (constant kind) or exponent (exponential kind).
  double parameter() const { return parameter_; }

  double value(double z) const;
  double log_derivative(double z) const;
  /// Omega^{-1/2}, exactly 1 for the identity.
  double inverse_sqrt(double z) const;
  Jet jet(double z) const;

  /// Throws ValidationError unless Omega > 0 at every sample of [z0, z1].
  void validate(double z0, double z1) const;

 private:
  struct Table;
  ConformalFactor(Kind kind, double parameter, std::shared_ptr<const Table> table = {})
      : kind_(kind), parameter_(parameter), table_(std::move(table)) {}

  Kind kind_ = Kind::identity;
  double parameter_ = 0.0;
  std::shared_ptr<const Table> table_;
};

/// Diagonal metric  Omega(z) [exp(-2 lambda z) dp^2 + exp(2 lambda z) dq^2 + dz^2]
/// on T^2 x [z_min, z_max]. With Omega == 1 it is the Arnold stretching metric.
///
/// Scale factors h_a (|d/dx^a| = h_a) and the orthonormal frame
/// e_a = h_a^{-1} d/dx^a.
class FrameMetric {
 public:
  explicit FrameMetric(double lambda, ConformalFactor omega = ConformalFactor::identity());

  static FrameMetric arnold(double lambda) { return FrameMetric(lambda); }

  double lambda() const { return lambda_; }
  const ConformalFactor& conformal() const { return omega_; }

  /// (h_p, h_q, h_z).
  std::array<double, 3> scale_factors(double z) const;
  /// (1/h_p, 1/h_q, 1/h_z), evaluated directly (no division).
  std::array<double, 3> inverse_scale_factors(double z) const;
  /// d/dz ln h_a.
  std::array<double, 3> log_scale_derivatives(double z) const;
  /// Jets of the scale factors for the exterior-calculus path.
  std::array<Jet, 3> scale_factor_jets(double z) const;

  /// det g = (h_p h_q h_z)^2.
  double determinant(double z) const;
  /// sqrt(det g).
  double volume_element(double z) const;

  /// Throws ValidationError unless all scale factors are finite and positive
  /// on [z0, z1].
  void validate(double z0, double z1) const;

 private:
  double lambda_;
  ConformalFactor omega_;
};

}  // namespace dynamo
