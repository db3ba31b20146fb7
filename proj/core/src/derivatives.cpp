#include "dynamo/derivatives.hpp"

#include <fftw3.h>

#include <array>
#include <complex>
#include <mutex>
#include <numbers>
#include <vector>

#include "dynamo/errors.hpp"

namespace dynamo {
namespace {

// Stencil rows are {offset of first node, 6 weights}; unused weights are 0.
struct Row {
  int first;
  std::array<double, 6> w;
};

// d/dz, scaled by 1/(12 h).
constexpr Row kD1Start0{0, {-25.0, 48.0, -36.0, 16.0, -3.0, 0.0}};
constexpr Row kD1Start1{-1, {-3.0, -10.0, 18.0, -6.0, 1.0, 0.0}};
constexpr Row kD1Center{-2, {1.0, -8.0, 0.0, 8.0, -1.0, 0.0}};
constexpr Row kD1End1{-3, {-1.0, 6.0, -18.0, 10.0, 3.0, 0.0}};
constexpr Row kD1End0{-4, {3.0, -16.0, 36.0, -48.0, 25.0, 0.0}};

// d2/dz2, scaled by 1/(12 h^2).
constexpr Row kD2Start0{0, {45.0, -154.0, 214.0, -156.0, 61.0, -10.0}};
constexpr Row kD2Start1{-1, {10.0, -15.0, -4.0, 14.0, -6.0, 1.0}};
constexpr Row kD2Center{-2, {-1.0, 16.0, -30.0, 16.0, -1.0, 0.0}};
constexpr Row kD2End1{-4, {1.0, -6.0, 14.0, -4.0, -15.0, 10.0}};
constexpr Row kD2End0{-5, {-10.0, 61.0, -156.0, 214.0, -154.0, 45.0}};

template <class PickRow>
ScalarGrid apply_z_stencil(const ScalarGrid& f, double scale, PickRow pick) {
  const GridSpec& s = f.spec();
  s.validate();
  ScalarGrid out(s);
  const std::size_t m = s.slab_size();
  const auto nz = static_cast<long>(s.n_z);
  for (long k = 0; k < nz; ++k) {
    const Row& row = pick(k, nz);
    auto dst = out.slab(static_cast<std::size_t>(k));
    for (int t = 0; t < 6; ++t) {
      const double w = row.w[t] * scale;
      if (w == 0.0) continue;
      auto src = f.slab(static_cast<std::size_t>(k + row.first + t));
      for (std::size_t i = 0; i < m; ++i) dst[i] += w * src[i];
    }
  }
  return out;
}

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

ScalarGrid d_z(const ScalarGrid& f) {
  const double h = f.spec().dz();
  return apply_z_stencil(f, 1.0 / (12.0 * h), [](long k, long nz) -> const Row& {
    if (k == 0) return kD1Start0;
    if (k == 1) return kD1Start1;
    if (k == nz - 2) return kD1End1;
    if (k == nz - 1) return kD1End0;
    return kD1Center;
  });
}

ScalarGrid d_zz(const ScalarGrid& f) {
  const double h = f.spec().dz();
  return apply_z_stencil(f, 1.0 / (12.0 * h * h), [](long k, long nz) -> const Row& {
    if (k == 0) return kD2Start0;
    if (k == 1) return kD2Start1;
    if (k == nz - 2) return kD2End1;
    if (k == nz - 1) return kD2End0;
    return kD2Center;
  });
}

struct SpectralPlane::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

SpectralPlane::SpectralPlane(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  const int dims[2] = {static_cast<int>(spec_.n_p), static_cast<int>(spec_.n_q)};
  const int howmany = static_cast<int>(spec_.n_z);
  const int rdist = static_cast<int>(spec_.slab_size());
  const int cdist = static_cast<int>(spec_.n_p * (spec_.n_q / 2 + 1));

  std::vector<double> real(spec_.size());
  std::vector<std::complex<double>> cplx(static_cast<std::size_t>(cdist) * spec_.n_z);
  auto* cptr = reinterpret_cast<fftw_complex*>(cplx.data());

  plans_ = std::make_unique<Plans>();
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward = fftw_plan_many_dft_r2c(2, dims, howmany, real.data(), nullptr, 1,
                                           rdist, cptr, nullptr, 1, cdist, flags);
  plans_->backward = fftw_plan_many_dft_c2r(2, dims, howmany, cptr, nullptr, 1, cdist,
                                            real.data(), nullptr, 1, rdist, flags);
  if (!plans_->forward || !plans_->backward) {
    throw NumericalError("spectral: FFTW planning failed");
  }
}

SpectralPlane::~SpectralPlane() = default;
SpectralPlane::SpectralPlane(SpectralPlane&&) noexcept = default;
SpectralPlane& SpectralPlane::operator=(SpectralPlane&&) noexcept = default;

ScalarGrid SpectralPlane::d_p(const ScalarGrid& f) const { return apply(f, Mode::p); }
ScalarGrid SpectralPlane::d_q(const ScalarGrid& f) const { return apply(f, Mode::q); }
ScalarGrid SpectralPlane::d_pp(const ScalarGrid& f) const { return apply(f, Mode::pp); }
ScalarGrid SpectralPlane::d_qq(const ScalarGrid& f) const { return apply(f, Mode::qq); }

ScalarGrid SpectralPlane::apply(const ScalarGrid& f, Mode mode) const {
  if (!(f.spec() == spec_)) throw ValidationError("spectral: grid shape mismatch");

  const std::size_t np = spec_.n_p;
  const std::size_t nq = spec_.n_q;
  const std::size_t nqh = nq / 2 + 1;
  const std::size_t cdist = np * nqh;

  // p-only or q-only dependence is common (constant frame fields, profiles
  // in z); an axis of length one contributes nothing to its derivative.
  if ((mode == Mode::p || mode == Mode::pp) && np == 1) return ScalarGrid(spec_);
  if ((mode == Mode::q || mode == Mode::qq) && nq == 1) return ScalarGrid(spec_);

  std::vector<double> real(f.values().begin(), f.values().end());
  std::vector<std::complex<double>> cplx(cdist * spec_.n_z);
  auto* cptr = reinterpret_cast<fftw_complex*>(cplx.data());
  fftw_execute_dft_r2c(plans_->forward, real.data(), cptr);

  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double norm = 1.0 / static_cast<double>(np * nq);

  // Multiplier per (ip, iq) mode; identical for every slab.
  std::vector<std::complex<double>> mult(cdist);
  for (std::size_t ip = 0; ip < np; ++ip) {
    const bool p_nyquist = (np % 2 == 0) && ip == np / 2;
    const double kp = two_pi * (ip <= np / 2 ? static_cast<double>(ip)
                                             : static_cast<double>(ip) - static_cast<double>(np));
    for (std::size_t iq = 0; iq < nqh; ++iq) {
      const bool q_nyquist = (nq % 2 == 0) && iq == nq / 2;
      const double kq = two_pi * static_cast<double>(iq);
      std::complex<double> m;
      switch (mode) {
        case Mode::p: m = p_nyquist ? 0.0 : std::complex<double>(0.0, kp); break;
        case Mode::q: m = q_nyquist ? 0.0 : std::complex<double>(0.0, kq); break;
        case Mode::pp: m = -kp * kp; break;
        case Mode::qq: m = -kq * kq; break;
      }
      mult[ip * nqh + iq] = m * norm;
    }
  }
  for (std::size_t k = 0; k < spec_.n_z; ++k) {
    std::complex<double>* slab = cplx.data() + k * cdist;
    for (std::size_t i = 0; i < cdist; ++i) slab[i] *= mult[i];
  }

  fftw_execute_dft_c2r(plans_->backward, cptr, real.data());
  ScalarGrid out(spec_);
  std::copy(real.begin(), real.end(), out.values().begin());
  return out;
}

}  // namespace dynamo
