#include "dynamo/frame_calculus.hpp"

#include <string>

#include "dynamo/errors.hpp"

namespace dynamo {
namespace {

// out[k-slab] = coeff[k] * in[k-slab], accumulated.
void add_scaled_by_z(ScalarGrid& out, const ScalarGrid& in, const std::vector<double>& coeff,
                     double sign = 1.0) {
  const GridSpec& s = out.spec();
  for (std::size_t k = 0; k < s.n_z; ++k) {
    const double c = sign * coeff[k];
    auto dst = out.slab(k);
    auto src = in.slab(k);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += c * src[i];
  }
}

void scale_by_z(ScalarGrid& g, const std::vector<double>& coeff) {
  for (std::size_t k = 0; k < g.spec().n_z; ++k) {
    for (double& v : g.slab(k)) v *= coeff[k];
  }
}

}  // namespace

FrameOperators::FrameOperators(FrameMetric metric, const GridSpec& grid)
    : metric_(std::move(metric)), grid_(grid) {
  grid_.validate();
  metric_.validate(grid_.z_min, grid_.z_max);
  spectral_ = std::make_shared<const SpectralPlane>(grid_);
  for (auto& v : inv_h_) v.resize(grid_.n_z);
  for (auto& v : dlog_h_) v.resize(grid_.n_z);
  log_omega_derivative_.resize(grid_.n_z);
  for (std::size_t k = 0; k < grid_.n_z; ++k) {
    const double z = grid_.z(k);
    const auto inv = metric_.inverse_scale_factors(z);
    const auto dl = metric_.log_scale_derivatives(z);
    for (int a = 0; a < 3; ++a) {
      inv_h_[a][k] = inv[a];
      dlog_h_[a][k] = dl[a];
    }
    log_omega_derivative_[k] = metric_.conformal().log_derivative(z);
  }
}

void FrameOperators::check(const ScalarGrid& f) const {
  if (!(f.spec() == grid_)) throw ValidationError("frame operator: grid mismatch");
  if (!f.all_finite()) throw ValidationError("frame operator: non-finite input grid");
}

void FrameOperators::check(const FrameField& b) const {
  for (Axis a : kAxes) check(b[a]);
}

FrameField FrameOperators::grad(const ScalarGrid& f) const {
  check(f);
  ScalarGrid gp = spectral_->d_p(f);
  ScalarGrid gq = spectral_->d_q(f);
  ScalarGrid gz = d_z(f);
  scale_by_z(gp, inv_h_[0]);
  scale_by_z(gq, inv_h_[1]);
  scale_by_z(gz, inv_h_[2]);
  return FrameField(std::move(gp), std::move(gq), std::move(gz));
}

ScalarGrid FrameOperators::div(const FrameField& b) const {
  check(b);
  // (1/h_p) d_p B_p + (1/h_q) d_q B_q + (1/h_z) [d_z B_z + (ln h_p h_q)' B_z]
  ScalarGrid out(grid_);
  add_scaled_by_z(out, spectral_->d_p(b[Axis::p]), inv_h_[0]);
  add_scaled_by_z(out, spectral_->d_q(b[Axis::q]), inv_h_[1]);
  ScalarGrid zpart = d_z(b[Axis::z]);
  std::vector<double> c(grid_.n_z);
  for (std::size_t k = 0; k < grid_.n_z; ++k) c[k] = dlog_h_[0][k] + dlog_h_[1][k];
  add_scaled_by_z(zpart, b[Axis::z], c);
  add_scaled_by_z(out, zpart, inv_h_[2]);
  return out;
}

FrameField FrameOperators::curl(const FrameField& b) const {
  check(b);
  const ScalarGrid& bp = b[Axis::p];
  const ScalarGrid& bq = b[Axis::q];
  const ScalarGrid& bz = b[Axis::z];

  // (1/h_z) [d_z B_a + (ln h_a)' B_a] for a = p, q.
  ScalarGrid zq = d_z(bq);
  add_scaled_by_z(zq, bq, dlog_h_[1]);
  scale_by_z(zq, inv_h_[2]);
  ScalarGrid zp = d_z(bp);
  add_scaled_by_z(zp, bp, dlog_h_[0]);
  scale_by_z(zp, inv_h_[2]);

  // curl_p = (1/h_q) d_q B_z - (1/h_z)[d_z B_q + (ln h_q)' B_q]
  ScalarGrid cp(grid_);
  add_scaled_by_z(cp, spectral_->d_q(bz), inv_h_[1]);
  cp -= zq;
  // curl_q = (1/h_z)[d_z B_p + (ln h_p)' B_p] - (1/h_p) d_p B_z
  ScalarGrid cq = std::move(zp);
  add_scaled_by_z(cq, spectral_->d_p(bz), inv_h_[0], -1.0);
  // curl_z = (1/h_p) d_p B_q - (1/h_q) d_q B_p
  ScalarGrid cz(grid_);
  add_scaled_by_z(cz, spectral_->d_p(bq), inv_h_[0]);
  add_scaled_by_z(cz, spectral_->d_q(bp), inv_h_[1], -1.0);
  return FrameField(std::move(cp), std::move(cq), std::move(cz));
}

ScalarGrid FrameOperators::laplacian(const ScalarGrid& f, ConformalDrift drift) const {
  check(f);
  // h_p^{-2} f_pp + h_q^{-2} f_qq + h_z^{-2} [f_zz + (ln h_p h_q / h_z)' f_z]
  // The last log-derivative is lambda-free: (1/2) (ln Omega)'.
  std::vector<double> c(grid_.n_z);
  ScalarGrid out(grid_);
  for (std::size_t k = 0; k < grid_.n_z; ++k) c[k] = inv_h_[0][k] * inv_h_[0][k];
  add_scaled_by_z(out, spectral_->d_pp(f), c);
  for (std::size_t k = 0; k < grid_.n_z; ++k) c[k] = inv_h_[1][k] * inv_h_[1][k];
  add_scaled_by_z(out, spectral_->d_qq(f), c);

  const double sign = drift == ConformalDrift::geometric ? 1.0 : -1.0;
  ScalarGrid zpart = d_zz(f);
  for (std::size_t k = 0; k < grid_.n_z; ++k) c[k] = sign * 0.5 * log_omega_derivative_[k];
  add_scaled_by_z(zpart, d_z(f), c);
  for (std::size_t k = 0; k < grid_.n_z; ++k) c[k] = inv_h_[2][k] * inv_h_[2][k];
  add_scaled_by_z(out, zpart, c);
  return out;
}

FrameField FrameOperators::vector_laplacian(const FrameField& b) const {
  FrameField out = grad(div(b));
  out -= curl(curl(b));
  return out;
}

FrameField grad(const FrameMetric& metric, const ScalarGrid& f) {
  return FrameOperators(metric, f.spec()).grad(f);
}

ScalarGrid div(const FrameMetric& metric, const FrameField& b) {
  return FrameOperators(metric, b.spec()).div(b);
}

FrameField curl(const FrameMetric& metric, const FrameField& b) {
  return FrameOperators(metric, b.spec()).curl(b);
}

ScalarGrid laplacian_scalar(const FrameMetric& metric, const ScalarGrid& f,
                            ConformalDrift drift) {
  return FrameOperators(metric, f.spec()).laplacian(f, drift);
}

FrameField vector_laplacian(const FrameMetric& metric, const FrameField& b) {
  return FrameOperators(metric, b.spec()).vector_laplacian(b);
}

}  // namespace dynamo
