#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dynamo/errors.hpp"

namespace dynamo {

using Vec3 = Eigen::Vector3d;
/// Scalar profile along arclength s.
using ArcProfile = std::function<double(double s)>;

struct FrenetSample {
  double s = 0.0;
  Vec3 x = Vec3::Zero();
  Vec3 t = Vec3::UnitX();
  Vec3 n = Vec3::UnitY();
  Vec3 b = Vec3::UnitZ();
  double kappa = 0.0;
  double tau = 0.0;
  /// Running integral of tau ds from s = 0.
  double torsion_integral = 0.0;
};

struct FrenetStart {
  Vec3 x = Vec3::Zero();
  Vec3 t = Vec3::UnitX();
  Vec3 n = Vec3::UnitY();
  Vec3 b = Vec3::UnitZ();
};

struct FrenetCurve {
  double ds = 0.0;
  std::vector<FrenetSample> samples;

  double max_kappa() const;
  /// Worst of ||t|-1|, ||n|-1|, ||b|-1|, pairwise dots and |b - t x n|.
  double orthonormality_residual() const;
};

/// Largest kappa * ds accepted by frenet_integrate.
inline constexpr double kMaxTurnPerStep = 0.1;

/// RK4 on t' = kappa n, n' = -kappa t + tau b, b' = -tau n, x' = t, with the
/// triad re-orthonormalized after every step. The step is shrunk so that
/// s_max is hit exactly.
FrenetCurve frenet_integrate(const ArcProfile& kappa, const ArcProfile& tau, double s_max,
                             double ds, const FrenetStart& start = {});

/// Constant (kappa, tau) curve in closed form. kappa = 0 gives a line.
struct Helix {
  double kappa = 0.0;
  double tau = 0.0;
  FrenetStart start{};

  Vec3 position(double s) const;
  Vec3 axis() const;
  double radius() const { return kappa / (kappa * kappa + tau * tau); }
  /// Rise along the axis per radian of turn.
  double pitch() const { return tau / (kappa * kappa + tau * tau); }
};

struct RopeParams {
  double r = 0.1;
  double theta_r = 0.0;
  double omega = 1.0;
  double gamma = 1.0;
  /// Torsion used by the scalar ratio and bound.
  double tau = 1.0;
  double v_theta = 0.0;
  double v_s = 0.0;
  double b0 = 1.0;
  double b1 = 0.0;
  double b_zero = 1.0;

  /// r = 0 (the rope axis) is accepted.
  void validate() const;
};

struct TubeMetric {
  std::vector<double> s;
  std::vector<double> theta;
  std::vector<double> K;
  double max_deviation = 0.0;  ///< max |1 - K|
  bool thin = false;
};

inline constexpr double kThinTubeDeviation = 0.05;

/// K = 1 - r kappa cos(theta) at one point.
double tube_metric_factor(double r, double kappa, double theta);

/// K(s) along the curve with theta(s) = theta_R - int tau ds.
/// Throws ValidationError if r >= 1 / max kappa or K <= 0 anywhere.
TubeMetric tube_metric_factor(const RopeParams& params, const FrenetCurve& curve);

/// tau omega r / gamma^2. Templated so exact arithmetic types can be used.
template <class T>
T amplification_ratio(const T& tau, const T& omega, const T& r, const T& gamma) {
  if (gamma == T(0)) throw ValidationError("amplification ratio undefined for zero growth exponent");
  return tau * omega * r / (gamma * gamma);
}

double amplification_ratio(const RopeParams& params);

/// gamma^2 / (omega tau); empty when omega tau <= 0 (no bound exists).
template <class T>
std::optional<T> dynamo_radius_bound(const T& gamma, const T& omega, const T& tau) {
  const T ot = omega * tau;
  if (!(ot > T(0))) return std::nullopt;
  return gamma * gamma / ot;
}

std::optional<double> dynamo_radius_bound(const RopeParams& params);

enum class DynamoVerdict { dynamo, below_bound, no_bound };

/// dynamo iff a bound exists and r exceeds it.
DynamoVerdict dynamo_verdict(const RopeParams& params);
const char* verdict_name(DynamoVerdict v);

/// B_theta(s, t) = B0 exp(gamma t - I(s)), I(s) = int (1 - K) dtheta with
/// dtheta = -tau ds, accumulated by the trapezoid rule on the curve samples.
struct BThetaProfile {
  double gamma = 0.0;
  double b_zero = 1.0;
  std::vector<double> s;
  std::vector<double> integral;

  std::vector<double> at(double t) const;
  double at(std::size_t i, double t) const { return b_zero * std::exp(gamma * t - integral[i]); }
};

BThetaProfile btheta_solution(const RopeParams& params, const FrenetCurve& curve,
                              const TubeMetric& tube);

/// Pointwise residual dv/ds + v r tau kappa of the incompressibility
/// condition, given v_theta and its derivative.
double continuity_residual(double r, double kappa, double tau, double v, double dv_ds);
std::vector<double> continuity_residual(const RopeParams& params, const FrenetCurve& curve,
                                        const ArcProfile& v_theta, const ArcProfile& dv_theta);

/// v(s) = v(0) exp(-r int tau kappa ds) on the curve samples (trapezoid).
std::vector<double> continuity_solution(const RopeParams& params, const FrenetCurve& curve,
                                        double v_theta0);

/// Residuals of the ideal poloidal balance pair, for documentation only:
///   first  = (gamma + tau v_theta sin theta) B_theta   (B_theta ~ e^{gamma t})
///   second = sin theta B_theta + B_s / sin theta (1 + v_theta / (tau^2 r))
struct BalanceResiduals {
  double first = 0.0;
  double second = 0.0;
};
BalanceResiduals balance_residuals(const RopeParams& params, double theta, double b_theta,
                                   double b_s);

/// CSV with header s,kappa,tau,K,theta,v_theta,B_theta at 17 significant digits.
std::string format_rope_csv(const FrenetCurve& curve, const TubeMetric& tube,
                            const std::vector<double>& v_theta, const std::vector<double>& b_theta);

}  // namespace dynamo
