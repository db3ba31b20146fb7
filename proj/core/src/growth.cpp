#include "dynamo/growth.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dynamo/errors.hpp"

namespace dynamo {

GrowthFit growth_fit(std::span<const double> t, std::span<const double> norm, double theory_rate,
                     FitWindow window) {
  if (t.size() != norm.size()) throw ValidationError("growth_fit: time and norm lengths differ");
  if (!(window.start >= FitWindow::kMinTransientCut && window.start < window.end &&
        window.end <= 1.0)) {
    throw ValidationError(fmt::format(
        "growth_fit: fit window [{}, {}] must start at or after {} and end by 1", window.start,
        window.end, FitWindow::kMinTransientCut));
  }
  const std::size_t n = t.size();
  if (n < 2) throw ValidationError("growth_fit: need at least two samples");
  const auto first = static_cast<std::size_t>(std::ceil(window.start * static_cast<double>(n - 1)));
  const auto last = static_cast<std::size_t>(std::floor(window.end * static_cast<double>(n - 1)));
  if (last < first || last - first + 1 < FitWindow::kMinSamples) {
    throw ValidationError(fmt::format("growth_fit: fit window holds {} samples, need >= {}",
                                      last >= first ? last - first + 1 : 0, FitWindow::kMinSamples));
  }
  const std::size_t m = last - first + 1;
  std::vector<double> y(m);
  double tm = 0.0;
  double ym = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double v = norm[first + i];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ValidationError(fmt::format("growth_fit: norm sample {} is not positive", first + i));
    }
    y[i] = std::log(v);
    tm += t[first + i];
    ym += y[i];
  }
  tm /= static_cast<double>(m);
  ym /= static_cast<double>(m);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = t[first + i] - tm;
    sxx += dx * dx;
    sxy += dx * (y[i] - ym);
  }
  if (sxx == 0.0) throw ValidationError("growth_fit: sample times are degenerate");
  GrowthFit fit;
  fit.rate = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (ym + fit.rate * (t[first + i] - tm));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(m));
  fit.theory_rate = theory_rate;
  fit.relative_error = theory_rate != 0.0 ? std::abs(fit.rate - theory_rate) / std::abs(theory_rate)
                                          : std::abs(fit.rate);
  fit.samples = m;
  fit.t_first = t[first];
  fit.t_last = t[last];
  return fit;
}

GrowthFit growth_fit(std::span<const NormSample> series, Axis component, double theory_rate,
                     FitWindow window) {
  std::vector<double> t;
  std::vector<double> norm;
  t.reserve(series.size());
  norm.reserve(series.size());
  for (const auto& s : series) {
    t.push_back(s.t);
    norm.push_back(s.l2[index_of(component)]);
  }
  GrowthFit fit = growth_fit(t, norm, theory_rate, window);
  fit.component = component;
  return fit;
}

double theory_growth_rate(const DynamoScenario& s, Axis component) {
  const std::vector<double> w = s.window.weights(s.grid);
  const ConformalFactor& omega = s.metric.conformal();
  double inv = 0.0;
  double drift = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < s.grid.n_z; ++k) {
    if (w[k] == 0.0) continue;
    const double z = s.grid.z(k);
    inv += w[k] / omega.value(z);
    drift += w[k] * omega.log_derivative(z) / omega.value(z);
    total += w[k];
  }
  inv /= total;
  drift /= total;
  const double lv = s.metric.lambda() * s.flow_speed;
  switch (component) {
    case Axis::p: return -lv * inv;
    case Axis::q: return lv * inv;
    case Axis::z: return s.flow_speed * drift;
  }
  return 0.0;
}

std::string format_growth_report(const GrowthFit& fit, EvolutionStatus status) {
  std::string out;
  out += fmt::format("component = {}\n", axis_name(fit.component));
  out += fmt::format("rate = {:.17g}\n", fit.rate);
  out += fmt::format("theory = {:.17g}\n", fit.theory_rate);
  out += fmt::format("relative_error = {:.17g}\n", fit.relative_error);
  out += fmt::format("residual = {:.17g}\n", fit.residual);
  out += fmt::format("samples = {}\n", fit.samples);
  out += fmt::format("t_first = {:.17g}\n", fit.t_first);
  out += fmt::format("t_last = {:.17g}\n", fit.t_last);
  out += fmt::format("status = {}\n",
                     status == EvolutionStatus::completed ? "completed" : "overflow_halt");
  return out;
}

CatMap cat_map_eigen() {
  CatMap cm;
  Eigen::Matrix2d a;
  a << 2.0, 1.0, 1.0, 1.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("cat map eigen decomposition failed");
  // Eigenvalues come sorted ascending.
  cm.chi_contracting = es.eigenvalues()(0);
  cm.chi_expanding = es.eigenvalues()(1);
  cm.lambda = std::log(cm.chi_expanding);
  Eigen::Vector2d ve = es.eigenvectors().col(1);
  Eigen::Vector2d vc = es.eigenvectors().col(0);
  if (ve(0) < 0.0) ve = -ve;
  if (vc(0) < 0.0) vc = -vc;
  cm.expanding_direction = {ve(0), ve(1)};
  cm.contracting_direction = {vc(0), vc(1)};
  cm.determinant = cm.matrix[0][0] * cm.matrix[1][1] - cm.matrix[0][1] * cm.matrix[1][0];
  return cm;
}

}  // namespace dynamo
