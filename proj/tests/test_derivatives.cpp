#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "dynamo/derivatives.hpp"
#include "dynamo/errors.hpp"
#include "support/generators.hpp"

using namespace dynamo;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_error(const ScalarGrid& got, const std::function<double(double, double, double)>& want) {
  const GridSpec& g = got.spec();
  double e = 0.0;
  for (std::size_t k = 0; k < g.n_z; ++k)
    for (std::size_t i = 0; i < g.n_p; ++i)
      for (std::size_t j = 0; j < g.n_q; ++j)
        e = std::max(e, std::abs(got(i, j, k) - want(g.p(i), g.q(j), g.z(k))));
  return e;
}

}  // namespace

TEST_CASE("z stencils are exact on low-degree polynomials") {
  const GridSpec g{2, 2, 12, -0.5, 1.5};
  for (int degree = 0; degree <= 5; ++degree) {
    const auto f = ScalarGrid::sample(g, [degree](double, double, double z) { return std::pow(z, degree); });
    const double d = degree;
    if (degree <= 4) {
      CHECK(max_error(d_z(f), [d](double, double, double z) { return d == 0 ? 0.0 : d * std::pow(z, d - 1); }) <
            1e-10);
    }
    CHECK(max_error(d_zz(f), [d](double, double, double z) {
            return d < 2 ? 0.0 : d * (d - 1) * std::pow(z, d - 2);
          }) < 1e-9);
  }
}

TEST_CASE("z stencils converge at fourth order including the end closures") {
  auto f = [](double, double, double z) { return std::sin(3.0 * z) * std::exp(z); };
  auto df = [](double, double, double z) { return (3.0 * std::cos(3.0 * z) + std::sin(3.0 * z)) * std::exp(z); };
  auto ddf = [](double, double, double z) {
    return (6.0 * std::cos(3.0 * z) - 8.0 * std::sin(3.0 * z)) * std::exp(z);
  };
  std::vector<double> e1, e2, h;
  for (std::size_t n : {33u, 65u, 129u}) {
    const GridSpec g{1, 1, n, 0.0, 1.0};
    const auto s = ScalarGrid::sample(g, f);
    e1.push_back(max_error(d_z(s), df));
    e2.push_back(max_error(d_zz(s), ddf));
    h.push_back(g.dz());
  }
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    CHECK(std::log(e1[i] / e1[i + 1]) / std::log(h[i] / h[i + 1]) > 3.8);
    CHECK(std::log(e2[i] / e2[i + 1]) / std::log(h[i] / h[i + 1]) > 3.6);
  }
}

TEST_CASE("spectral derivatives are exact on resolved Fourier modes") {
  const GridSpec g{16, 12, 6, 0.0, 1.0};
  const SpectralPlane sp(g);
  testgen::Rng rng(11);
  for (int c = 0; c < testgen::kCases; ++c) {
    const double m = rng.integer(-7, 7);
    const double n = rng.integer(-5, 5);
    const double phase = rng.uniform(0.0, kTwoPi);
    const double a = rng.uniform(-2.0, 2.0);
    auto f = [=](double p, double q, double z) { return a * (1.0 + z) * std::sin(kTwoPi * (m * p + n * q) + phase); };
    auto c1 = [=](double p, double q, double z) { return a * (1.0 + z) * std::cos(kTwoPi * (m * p + n * q) + phase); };
    const auto s = ScalarGrid::sample(g, f);
    CHECK(max_error(sp.d_p(s), [&](double p, double q, double z) { return kTwoPi * m * c1(p, q, z); }) < 1e-11);
    CHECK(max_error(sp.d_q(s), [&](double p, double q, double z) { return kTwoPi * n * c1(p, q, z); }) < 1e-11);
    CHECK(max_error(sp.d_pp(s), [&](double p, double q, double z) { return -kTwoPi * kTwoPi * m * m * f(p, q, z); }) <
          1e-9);
    CHECK(max_error(sp.d_qq(s), [&](double p, double q, double z) { return -kTwoPi * kTwoPi * n * n * f(p, q, z); }) <
          1e-9);
  }
}

TEST_CASE("Nyquist mode has no first derivative but a second derivative") {
  const GridSpec g{8, 4, 6, 0.0, 1.0};
  const SpectralPlane sp(g);
  const auto f = ScalarGrid::sample(g, [](double p, double, double) { return std::cos(8.0 * std::numbers::pi * p); });
  CHECK(sp.d_p(f).max_abs() < 1e-12);
  const double k2 = std::pow(8.0 * std::numbers::pi, 2);
  CHECK(max_error(sp.d_pp(f), [k2](double p, double, double) { return -k2 * std::cos(8.0 * std::numbers::pi * p); }) <
        1e-9);
}

TEST_CASE("single-point periodic axis differentiates to zero") {
  const GridSpec g{1, 8, 6, 0.0, 1.0};
  const SpectralPlane sp(g);
  const auto f = ScalarGrid::sample(g, [](double, double q, double) { return std::sin(kTwoPi * q); });
  CHECK(sp.d_p(f).max_abs() == 0.0);
  CHECK(sp.d_pp(f).max_abs() == 0.0);
}

TEST_CASE("grid and shape errors") {
  CHECK_THROWS_AS(GridSpec({4, 4, 5, 0.0, 1.0}).validate(), ValidationError);
  CHECK_THROWS_AS(GridSpec({4, 4, 8, 1.0, 1.0}).validate(), ValidationError);
  CHECK_THROWS_AS(GridSpec({0, 4, 8, 0.0, 1.0}).validate(), ValidationError);
  const SpectralPlane sp(GridSpec{4, 4, 8, 0.0, 1.0});
  CHECK_THROWS_AS(sp.d_p(ScalarGrid(GridSpec{4, 8, 8, 0.0, 1.0})), ValidationError);
  CHECK(GridSpec{4, 4, 8, 0.0, 2.0}.z(7) == 2.0);
}
