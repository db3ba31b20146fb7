#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dynamo/errors.hpp"
#include "dynamo/frame_calculus.hpp"
#include "oracles/coordinate_oracle.hpp"
#include "support/generators.hpp"

using namespace dynamo;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_abs_diff(const ScalarGrid& got, const std::function<double(double, double, double)>& want,
                    std::size_t k_lo = 0, std::size_t k_hi = static_cast<std::size_t>(-1)) {
  const GridSpec& g = got.spec();
  double e = 0.0;
  for (std::size_t k = k_lo; k < std::min(k_hi, g.n_z); ++k)
    for (std::size_t i = 0; i < g.n_p; ++i)
      for (std::size_t j = 0; j < g.n_q; ++j)
        e = std::max(e, std::abs(got(i, j, k) - want(g.p(i), g.q(j), g.z(k))));
  return e;
}

double field_max_abs(const FrameField& b) {
  return std::max({b[Axis::p].max_abs(), b[Axis::q].max_abs(), b[Axis::z].max_abs()});
}

FrameField scaled(FrameField f, double s) {
  f *= s;
  return f;
}

double max_diff(const FrameField& a, const FrameField& b) {
  FrameField d = a;
  d -= b;
  return field_max_abs(d);
}

// Random smooth periodic-in-(p, q) field.
struct RandomField {
  std::array<std::array<double, 5>, 3> c{};  // amplitude, m, n, k, phase

  explicit RandomField(testgen::Rng& rng) {
    for (auto& comp : c) {
      comp = {rng.uniform(0.5, 1.5), double(rng.integer(-3, 3)), double(rng.integer(-3, 3)),
              rng.uniform(-1.5, 1.5), rng.uniform(0.0, kTwoPi)};
    }
  }
  std::array<double, 3> operator()(double p, double q, double z) const {
    std::array<double, 3> v{};
    for (int a = 0; a < 3; ++a) {
      v[a] = c[a][0] * std::sin(kTwoPi * (c[a][1] * p + c[a][2] * q) + c[a][3] * z + c[a][4]);
    }
    return v;
  }
};

ConformalFactor random_omega(testgen::Rng& rng) {
  switch (rng.integer(0, 2)) {
    case 0: return ConformalFactor::identity();
    case 1: return ConformalFactor::constant(rng.uniform(0.3, 3.0));
    default: return ConformalFactor::exponential(rng.uniform(-1.5, 1.5));
  }
}

std::function<double(double)> omega_function(const ConformalFactor& c) {
  switch (c.kind()) {
    case ConformalFactor::Kind::constant: {
      const double v = c.parameter();
      return [v](double) { return v; };
    }
    case ConformalFactor::Kind::exponential: {
      const double a = c.parameter();
      return [a](double z) { return std::exp(a * z); };
    }
    default: return [](double) { return 1.0; };
  }
}

}  // namespace

TEST_CASE("grad examples") {
  const GridSpec g{16, 16, 64, 0.0, 1.0};
  SUBCASE("flat metric reduces to the Cartesian gradient") {
    const auto f = ScalarGrid::sample(g, [](double p, double, double) { return std::sin(kTwoPi * p); });
    const FrameField gr = grad(FrameMetric(0.0), f);
    CHECK(max_abs_diff(gr[Axis::p], [](double p, double, double) { return kTwoPi * std::cos(kTwoPi * p); }) < 1e-12);
    CHECK(gr[Axis::q].max_abs() < 1e-12);
    CHECK(gr[Axis::z].max_abs() < 1e-12);
  }
  SUBCASE("z slot is the plain z derivative") {
    const auto f = ScalarGrid::sample(g, [](double, double, double z) { return z; });
    const FrameField gr = grad(FrameMetric(1.0), f);
    CHECK(max_abs_diff(gr[Axis::z], [](double, double, double) { return 1.0; }) < 1e-12);
    CHECK(gr[Axis::p].max_abs() < 1e-12);
  }
  SUBCASE("conformal frame factor is one at z = 0") {
    const auto f = ScalarGrid::sample(g, [](double, double q, double) { return std::sin(kTwoPi * q); });
    const FrameField gr = grad(FrameMetric(1.0, ConformalFactor::exponential(1.0)), f);
    CHECK(max_abs_diff(gr[Axis::q], [](double, double q, double) { return kTwoPi * std::cos(kTwoPi * q); }, 0, 1) <
          1e-12);
  }
}

TEST_CASE("div examples") {
  const GridSpec g{8, 8, 129, 0.0, 1.0};
  CHECK(div(FrameMetric(1.0), FrameField::unit(g, Axis::p)).max_abs() < 1e-13);
  const auto bz = FrameField::sample(g, [](double, double, double z) { return std::array<double, 3>{0, 0, z}; });
  CHECK(max_abs_diff(div(FrameMetric(1.0), bz), [](double, double, double) { return 1.0; }) < 1e-12);

  // div e_z for Omega = e^z, lambda = 1: Omega^{-1/2} (ln h_p h_q)' = e^{-z/2}.
  const FrameMetric m(1.0, ConformalFactor::exponential(1.0));
  const ScalarGrid d = div(m, FrameField::unit(g, Axis::z));
  CHECK(max_abs_diff(d, [](double, double, double z) { return std::exp(-0.5 * z); }) < 1e-13);
  const auto h = oracle::conformal_arnold(1.0, [](double z) { return std::exp(z); });
  for (std::size_t k : {10u, 64u, 100u}) {
    const double want = oracle::div(h, [](const oracle::Point&) { return std::array<double, 3>{0, 0, 1}; },
                                    {0.1, 0.2, g.z(k)});
    CHECK(d(1, 2, k) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("curl examples") {
  const GridSpec g{8, 8, 64, 0.0, 1.0};
  const FrameMetric arnold(1.0);
  CHECK(max_diff(curl(arnold, FrameField::unit(g, Axis::p)), scaled(FrameField::unit(g, Axis::q), -1.0)) < 1e-13);
  // The p <-> q swap reverses orientation, so the printed minus sign holds for e_q too.
  CHECK(max_diff(curl(arnold, FrameField::unit(g, Axis::q)), scaled(FrameField::unit(g, Axis::p), -1.0)) < 1e-13);
  CHECK(field_max_abs(curl(arnold, FrameField::unit(g, Axis::z))) < 1e-13);

  const FrameField c = FrameField::sample(g, [](double, double, double) { return std::array<double, 3>{0.3, -1.2, 2.0}; });
  CHECK(field_max_abs(curl(FrameMetric(0.0), c)) < 1e-12);
}

TEST_CASE("scalar Laplacian examples") {
  const GridSpec g{16, 16, 129, 0.0, 1.0};
  const double k2 = kTwoPi * kTwoPi;
  SUBCASE("flat z mode") {
    const auto f = ScalarGrid::sample(g, [](double, double, double z) { return std::sin(kTwoPi * z); });
    const auto lap = laplacian_scalar(FrameMetric(0.0), f);
    CHECK(max_abs_diff(lap, [k2](double, double, double z) { return -k2 * std::sin(kTwoPi * z); }) < 1e-4 * k2);
  }
  SUBCASE("p mode at z = 0") {
    const auto f = ScalarGrid::sample(g, [](double p, double, double) { return std::sin(kTwoPi * p); });
    const auto lap = laplacian_scalar(FrameMetric(1.0), f);
    CHECK(max_abs_diff(lap, [k2](double p, double, double) { return -k2 * std::sin(kTwoPi * p); }, 0, 1) < 1e-10);
  }
  SUBCASE("conformal z^2, both drift signs") {
    const FrameMetric m(1.0, ConformalFactor::exponential(1.0));
    const auto f = ScalarGrid::sample(g, [](double, double, double z) { return z * z; });
    // Laplace-Beltrami of the conformal metric.
    CHECK(max_abs_diff(laplacian_scalar(m, f), [](double, double, double z) { return (z + 2.0) * std::exp(-z); }) <
          1e-10);
    // Opposite first-order sign.
    CHECK(max_abs_diff(laplacian_scalar(m, f, ConformalDrift::reversed),
                       [](double, double, double z) { return 2.0 * std::exp(-z) - z * std::exp(-z); }) < 1e-10);
  }
}

TEST_CASE("vector Laplacian on frame vectors") {
  const GridSpec g{8, 8, 128, 0.0, 1.0};
  CHECK(max_diff(vector_laplacian(FrameMetric(1.0), FrameField::unit(g, Axis::p)),
                 scaled(FrameField::unit(g, Axis::p), -1.0)) < 1e-6);
  CHECK(field_max_abs(vector_laplacian(FrameMetric(1.0), FrameField::unit(g, Axis::z))) < 1e-6);
  CHECK(max_diff(vector_laplacian(FrameMetric(2.0), FrameField::unit(g, Axis::q)),
                 scaled(FrameField::unit(g, Axis::q), -4.0)) < 4e-6);
}

TEST_CASE("operators agree with the coordinate oracle on random fields and metrics") {
  testgen::Rng rng(2024);
  const GridSpec g{16, 16, 129, 0.0, 1.0};
  for (int c = 0; c < 8; ++c) {
    const double lambda = rng.uniform(-1.5, 1.5);
    const ConformalFactor omega = random_omega(rng);
    const FrameMetric m(lambda, omega);
    const FrameOperators ops(m, g);
    const RandomField rf(rng);
    const auto h = oracle::conformal_arnold(lambda, omega_function(omega));
    const oracle::Frame bf = [&rf](const oracle::Point& x) { return rf(x[0], x[1], x[2]); };
    const oracle::Scalar sf = [&rf](const oracle::Point& x) { return rf(x[0], x[1], x[2])[0]; };

    const FrameField b = FrameField::sample(g, rf);
    const ScalarGrid f = b[Axis::p];
    const ScalarGrid dv = ops.div(b);
    const FrameField cu = ops.curl(b);
    const FrameField gr = ops.grad(f);
    const ScalarGrid lap = ops.laplacian(f);

    for (int s = 0; s < 6; ++s) {
      const std::size_t i = rng.integer(0, 15);
      const std::size_t j = rng.integer(0, 15);
      const std::size_t k = rng.integer(20, 108);
      const oracle::Point x{g.p(i), g.q(j), g.z(k)};
      const double scale = 1.0 + 10.0 * std::exp(2.0 * std::abs(lambda));
      CHECK(std::abs(dv(i, j, k) - oracle::div(h, bf, x)) < 1e-5 * scale);
      const auto oc = oracle::curl(h, bf, x);
      const auto og = oracle::grad(h, sf, x);
      for (Axis a : kAxes) {
        CHECK(std::abs(cu[a](i, j, k) - oc[index_of(a)]) < 1e-5 * scale);
        CHECK(std::abs(gr[a](i, j, k) - og[index_of(a)]) < 1e-5 * scale);
      }
      CHECK(std::abs(lap(i, j, k) - oracle::laplacian(h, sf, x)) < 1e-4 * scale * scale);
    }
  }
}

TEST_CASE("flat metric matches the plain Cartesian stencil operators") {
  const GridSpec g{16, 8, 40, 0.0, 1.0};
  testgen::Rng rng(9);
  const RandomField rf(rng);
  const FrameField b = FrameField::sample(g, rf);
  const SpectralPlane sp(g);
  ScalarGrid cart = sp.d_p(b[Axis::p]);
  cart += sp.d_q(b[Axis::q]);
  cart += d_z(b[Axis::z]);
  ScalarGrid d = div(FrameMetric(0.0), b);
  d -= cart;
  CHECK(d.max_abs() <= 1e-12);
}

TEST_CASE("div curl and curl grad vanish at the scheme order") {
  testgen::Rng rng(77);
  const RandomField rf(rng);
  const FrameMetric m(0.8, ConformalFactor::exponential(0.6));
  std::vector<double> dc, cg, h;
  for (std::size_t n : {33u, 65u, 129u}) {
    const GridSpec g{12, 12, n, 0.0, 1.0};
    const FrameOperators ops(m, g);
    const FrameField b = FrameField::sample(g, rf);
    dc.push_back(ops.div(ops.curl(b)).max_abs());
    cg.push_back(field_max_abs(ops.curl(ops.grad(b[Axis::q]))));
    h.push_back(g.dz());
  }
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    CHECK(std::log(dc[i] / dc[i + 1]) / std::log(h[i] / h[i + 1]) > 3.5);
    CHECK(std::log(cg[i] / cg[i + 1]) / std::log(h[i] / h[i + 1]) > 3.5);
  }
  CHECK(dc.back() < 1e-4);
}

TEST_CASE("Omega == 1 gives bit-identical operator coefficients") {
  const GridSpec g{4, 4, 50, -0.3, 1.7};
  const FrameOperators base(FrameMetric(0.9), g);
  const FrameOperators conf(FrameMetric(0.9, ConformalFactor::constant(1.0)), g);
  for (Axis a : kAxes) {
    CHECK(base.inverse_scale(a) == conf.inverse_scale(a));
    CHECK(base.log_scale_derivative(a) == conf.log_scale_derivative(a));
  }
}

TEST_CASE("operators reject bad input") {
  const GridSpec g{4, 4, 16, 0.0, 1.0};
  const FrameOperators ops(FrameMetric(1.0), g);
  ScalarGrid f(g);
  f(1, 1, 3) = NAN;
  CHECK_THROWS_AS(ops.grad(f), ValidationError);
  CHECK_THROWS_AS(ops.div(FrameField(GridSpec{4, 4, 17, 0.0, 1.0})), ValidationError);
  CHECK_THROWS_AS(FrameOperators(FrameMetric(1.0), GridSpec{4, 4, 3, 0.0, 1.0}), ValidationError);
}
