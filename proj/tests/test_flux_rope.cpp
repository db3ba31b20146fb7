#include <doctest.h>

#include <boost/rational.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dynamo/flux_rope.hpp"
#include "support/generators.hpp"

using namespace dynamo;

namespace {

constexpr double kPi = std::numbers::pi;
using Rational = boost::rational<long long>;

ArcProfile constant(double v) {
  return [v](double) { return v; };
}

}  // namespace

TEST_CASE("Frenet integration against closed forms") {
  SUBCASE("straight line") {
    const FrenetCurve c = frenet_integrate(constant(0.0), constant(0.0), 3.0, 0.1);
    const FrenetSample& end = c.samples.back();
    CHECK(end.s == doctest::Approx(3.0));
    CHECK((end.x - Vec3(3.0, 0.0, 0.0)).norm() <= 1e-13);
    CHECK((end.t - Vec3::UnitX()).norm() <= 1e-15);
  }
  SUBCASE("unit circle closes") {
    const FrenetCurve c = frenet_integrate(constant(1.0), constant(0.0), 2.0 * kPi, 0.01);
    CHECK(c.samples.back().x.norm() <= 1e-9);
    for (const auto& s : c.samples) CHECK((s.x - Vec3(0.0, 1.0, 0.0)).norm() == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("helix") {
    const Helix h{1.0, 1.0, {}};
    CHECK(h.radius() == doctest::Approx(0.5));
    CHECK(h.pitch() == doctest::Approx(0.5));
    const FrenetCurve c = frenet_integrate(constant(1.0), constant(1.0), 10.0, 0.01);
    double worst = 0.0;
    for (const auto& s : c.samples) worst = std::max(worst, (s.x - h.position(s.s)).norm());
    CHECK(worst <= 1e-8);
    CHECK(c.samples.back().torsion_integral == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(std::abs(c.samples.back().t.dot(h.axis()) - 1.0 / std::sqrt(2.0)) <= 1e-9);
  }
}

TEST_CASE("triad stays orthonormal over long integrations") {
  const FrenetCurve c =
      frenet_integrate([](double s) { return 1.0 + 0.5 * std::sin(s); }, [](double s) { return std::cos(0.3 * s); },
                       100.0, 0.01);
  CHECK(c.samples.size() == 10001);
  CHECK(c.orthonormality_residual() <= 1e-8);
}

TEST_CASE("Frenet input checks") {
  CHECK_THROWS_AS(frenet_integrate(constant(20.0), constant(0.0), 1.0, 0.01), ValidationError);
  CHECK_NOTHROW(frenet_integrate(constant(10.0), constant(0.0), 1.0, 0.01));
  CHECK_THROWS_AS(frenet_integrate(constant(-1.0), constant(0.0), 1.0, 0.01), ValidationError);
  CHECK_THROWS_AS(frenet_integrate(constant(1.0), constant(0.0), 0.0, 0.01), ValidationError);
  FrenetStart skew;
  skew.n = Vec3(1.0, 1.0, 0.0);
  CHECK_THROWS_AS(frenet_integrate(constant(1.0), constant(0.0), 1.0, 0.01, skew), ValidationError);
}

TEST_CASE("tube metric factor") {
  CHECK(tube_metric_factor(0.1, 1.0, 0.0) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(tube_metric_factor(0.1, 1.0, kPi / 2) == doctest::Approx(1.0).epsilon(1e-15));

  const FrenetCurve c = frenet_integrate(constant(1.0), constant(1.0), 2.0 * kPi, 0.01);
  RopeParams axis;
  axis.r = 0.0;
  const TubeMetric on_axis = tube_metric_factor(axis, c);
  for (double k : on_axis.K) CHECK(k == 1.0);
  CHECK(on_axis.thin);

  RopeParams p;
  p.r = 0.1;
  const TubeMetric tube = tube_metric_factor(p, c);
  CHECK(tube.max_deviation == doctest::Approx(0.1).epsilon(1e-6));
  CHECK_FALSE(tube.thin);
  // theta(s) = theta_R - s for unit torsion.
  CHECK(tube.theta.back() == doctest::Approx(-2.0 * kPi));

  p.r = 0.03;
  CHECK(tube_metric_factor(p, c).thin);
  p.r = 1.0;
  CHECK_THROWS_AS(tube_metric_factor(p, c), ValidationError);
}

TEST_CASE("amplification ratio, exact arithmetic") {
  CHECK(amplification_ratio(Rational(1), Rational(1), Rational(1), Rational(1)) == Rational(1));
  CHECK(amplification_ratio(Rational(0), Rational(3), Rational(1), Rational(2)) == Rational(0));
  CHECK(amplification_ratio(Rational(2), Rational(3), Rational(1, 5), Rational(1)) == Rational(6, 5));
  CHECK_THROWS_AS(amplification_ratio(Rational(1), Rational(1), Rational(1), Rational(0)), ValidationError);

  RopeParams p;
  p.tau = 2.0;
  p.omega = 3.0;
  p.r = 0.2;
  p.gamma = 1.0;
  CHECK(amplification_ratio(p) == doctest::Approx(1.2).epsilon(1e-15));
}

TEST_CASE("radius bound and verdict") {
  CHECK(*dynamo_radius_bound(Rational(1), Rational(2), Rational(2)) == Rational(1, 4));
  CHECK_FALSE(dynamo_radius_bound(Rational(1), Rational(-2), Rational(2)).has_value());
  CHECK_FALSE(dynamo_radius_bound(Rational(1), Rational(0), Rational(2)).has_value());

  RopeParams p;
  p.gamma = 1.0;
  p.omega = 2.0;
  p.tau = 2.0;
  p.r = 0.3;
  CHECK(dynamo_verdict(p) == DynamoVerdict::dynamo);
  p.r = 0.2;
  CHECK(dynamo_verdict(p) == DynamoVerdict::below_bound);
  p.tau = -2.0;
  CHECK(dynamo_verdict(p) == DynamoVerdict::no_bound);
  CHECK(std::string(verdict_name(DynamoVerdict::dynamo)) == "dynamo");

  p.r = -0.1;
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("ratio properties") {
  testgen::Rng rng(12);
  for (int c = 0; c < testgen::kCases; ++c) {
    const long long tau = rng.integer(-9, 9), omega = rng.integer(-9, 9);
    const long long r = rng.integer(1, 9), gamma = rng.integer(1, 9);
    const Rational base = amplification_ratio(Rational(tau), Rational(omega), Rational(r, 10), Rational(gamma));
    // Flipping both tau and omega leaves the ratio unchanged; flipping gamma too.
    CHECK(amplification_ratio(Rational(-tau), Rational(-omega), Rational(r, 10), Rational(gamma)) == base);
    CHECK(amplification_ratio(Rational(tau), Rational(omega), Rational(r, 10), Rational(-gamma)) == base);
    // Linear in r: doubling the radius doubles the ratio.
    CHECK(amplification_ratio(Rational(tau), Rational(omega), Rational(2 * r, 10), Rational(gamma)) == base * Rational(2));
    // A bound exists exactly when the ratio is positive; r > bound iff ratio > 1.
    const auto bound = dynamo_radius_bound(Rational(gamma), Rational(omega), Rational(tau));
    CHECK(bound.has_value() == (base > Rational(0)));
    if (bound) CHECK((Rational(r, 10) > *bound) == (base > Rational(1)));
  }
}

TEST_CASE("poloidal field along the rope") {
  const FrenetCurve c = frenet_integrate(constant(1.0), constant(1.0), 2.0 * kPi, 0.01);
  RopeParams p;
  p.r = 0.1;
  p.gamma = 0.7;
  p.b_zero = 2.0;
  const TubeMetric tube = tube_metric_factor(p, c);
  const BThetaProfile b = btheta_solution(p, c, tube);
  CHECK(b.at(0, 0.0) == 2.0);
  for (double v : b.integral) CHECK(std::abs(v) <= 0.2 * kPi + 1e-12);
  // theta = -s, so I(s) = -r sin(s) exactly for unit curvature and torsion.
  for (std::size_t i = 0; i < c.samples.size(); i += 50)
    CHECK(b.integral[i] == doctest::Approx(-0.1 * std::sin(c.samples[i].s)).epsilon(1e-6).scale(1.0));
  CHECK(std::abs(b.integral.back()) <= 1e-6);

  for (std::size_t i : {std::size_t{0}, std::size_t{100}, c.samples.size() - 1}) {
    const double h = 1e-4;
    const double rate = (std::log(b.at(i, 1.0 + h)) - std::log(b.at(i, 1.0 - h))) / (2 * h);
    CHECK(rate == doctest::Approx(0.7).epsilon(1e-9));
  }
  const auto snapshot = b.at(0.5);
  CHECK(snapshot.size() == c.samples.size());

  RopeParams axis = p;
  axis.r = 0.0;
  const BThetaProfile flat = btheta_solution(axis, c, tube_metric_factor(axis, c));
  for (double v : flat.at(1.0)) CHECK(v == doctest::Approx(2.0 * std::exp(0.7)));
}

TEST_CASE("continuity") {
  CHECK(continuity_residual(0.1, 1.0, 1.0, 1.0, 0.0) == doctest::Approx(0.1));
  CHECK(continuity_residual(0.0, 1.0, 1.0, 1.0, 0.0) == 0.0);

  const FrenetCurve c = frenet_integrate(constant(1.0), constant(1.0), 2.0, 0.01);
  RopeParams p;
  p.r = 0.1;
  const auto v = continuity_solution(p, c, 1.5);
  CHECK(v.front() == 1.5);
  CHECK(v.back() == doctest::Approx(1.5 * std::exp(-0.2)).epsilon(1e-12));
  const auto res = continuity_residual(
      p, c, [](double s) { return 1.5 * std::exp(-0.1 * s); }, [](double s) { return -0.15 * std::exp(-0.1 * s); });
  for (double r : res) CHECK(std::abs(r) <= 1e-14);
}

TEST_CASE("rope CSV") {
  const FrenetCurve c = frenet_integrate(constant(1.0), constant(1.0), 1.0, 0.05);
  RopeParams p;
  const TubeMetric tube = tube_metric_factor(p, c);
  const auto v = continuity_solution(p, c, 1.0);
  const auto b = btheta_solution(p, c, tube).at(0.0);
  const std::string csv = format_rope_csv(c, tube, v, b);
  CHECK(csv.rfind("s,kappa,tau,K,theta,v_theta,B_theta\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);
  CHECK_THROWS_AS(format_rope_csv(c, tube, {1.0}, b), ValidationError);
}
