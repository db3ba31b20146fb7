#include "dynamo/exterior_geometry.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "dynamo/errors.hpp"

namespace dynamo {
namespace {

constexpr int kZ = 2;

int slot_of(int a, int b) {
  if (a > b) std::swap(a, b);
  if (a == 0 && b == 1) return 0;
  if (a == 0 && b == 2) return 1;
  return 2;
}

int pair_of(int i, int j) { return slot_of(i, j); }

Jet exponential_jet(double prefactor, double rate, double z) {
  const double v = prefactor * std::exp(rate * z);
  return {v, rate * v, rate * rate * v};
}

// Frame coefficient of d w^a on w^a ^ w^z is -F_a with F_a = c_a' / (c_a c_z);
// returns F_a and dF_a/dz.
std::array<double, 2> stretch_rate(const std::array<Jet, 3>& b, int a) {
  const Jet& c = b[a];
  const Jet& cz = b[kZ];
  const double f = c.d1 / (c.value * cz.value);
  const double df = c.d2 / (c.value * cz.value) - c.d1 * c.d1 / (c.value * c.value * cz.value) -
                    c.d1 * cz.d1 / (c.value * cz.value * cz.value);
  return {f, df};
}

constexpr double kExactTol = 1e-12;

}  // namespace

double TwoForm::on(int a, int b) const {
  if (a == b) return 0.0;
  const double v = c[slot_of(a, b)];
  return a < b ? v : -v;
}

TwoForm wedge(const std::array<double, 3>& alpha, const std::array<double, 3>& beta) {
  TwoForm out;
  for (int s = 0; s < 3; ++s) {
    const int a = kWedgeSlots[s][0];
    const int b = kWedgeSlots[s][1];
    out.c[s] = alpha[a] * beta[b] - alpha[b] * beta[a];
  }
  return out;
}

CoframeBasis::CoframeBasis(std::array<Coefficient, 3> coefficients, std::string name)
    : coefficients_(std::move(coefficients)), name_(std::move(name)) {}

CoframeBasis CoframeBasis::flat() {
  return exponential({1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, "flat");
}

CoframeBasis CoframeBasis::exponential(std::array<double, 3> prefactors,
                                       std::array<double, 3> rates, std::string name) {
  std::array<Coefficient, 3> c;
  for (int a = 0; a < 3; ++a) {
    const double s = prefactors[a];
    const double r = rates[a];
    c[a] = [s, r](double z) { return exponential_jet(s, r, z); };
  }
  return CoframeBasis(std::move(c), std::move(name));
}

CoframeBasis CoframeBasis::arnold(double lambda) {
  return exponential({1.0, 1.0, 1.0}, {-lambda, lambda, 0.0}, "arnold");
}

CoframeBasis CoframeBasis::arnold_constant_conformal(double lambda, double c) {
  if (!(c > 0.0)) throw ValidationError("coframe: conformal constant must be positive");
  const double s = std::sqrt(c);
  return exponential({s, s, s}, {-lambda, lambda, 0.0}, "arnold_constant_conformal");
}

CoframeBasis CoframeBasis::stretched_coframe(double lambda) {
  return exponential({1.0, 1.0, 1.0}, {0.0, lambda, 0.5 * lambda}, "stretched_coframe");
}

CoframeBasis CoframeBasis::stretched_line_element(double lambda) {
  return exponential({1.0, 1.0, 1.0}, {0.0, 2.0 * lambda, 0.5 * lambda},
                     "stretched_line_element");
}

CoframeBasis CoframeBasis::from_metric(const FrameMetric& metric) {
  std::array<Coefficient, 3> c;
  for (int a = 0; a < 3; ++a) {
    c[a] = [metric, a](double z) { return metric.scale_factor_jets(z)[a]; };
  }
  return CoframeBasis(std::move(c), "frame_metric");
}

std::array<Jet, 3> CoframeBasis::coefficients(double z) const {
  std::array<Jet, 3> out;
  for (int a = 0; a < 3; ++a) {
    out[a] = coefficients_[a](z);
    if (!std::isfinite(out[a].value) || out[a].value <= 0.0 || !std::isfinite(out[a].d1) ||
        !std::isfinite(out[a].d2)) {
      throw ValidationError(fmt::format("coframe '{}': coefficient {} is not positive/finite at z = {}",
                                        name_, a, z));
    }
  }
  return out;
}

TwoForm exterior_derivative(const std::array<Jet, 3>& basis, const OneForm& form) {
  // theta = sum_k c_k a_k dx^k, only z-dependence:
  // d theta = sum_{k != z} (c_k a_k)' / (a_k a_z) w^z ^ w^k.
  TwoForm out;
  for (int k = 0; k < 2; ++k) {
    const Jet& a = basis[k];
    const double x = (form.dc_dz[k] * a.value + form.c[k] * a.d1) / (a.value * basis[kZ].value);
    out.c[slot_of(k, kZ)] = -x;  // w^z ^ w^k = -w^k ^ w^z
  }
  return out;
}

double exterior_derivative(const std::array<Jet, 3>& basis, const TwoForm& form,
                           const std::array<double, 3>& dc_dz) {
  // Only the w^p ^ w^q slot survives: d(f a_p a_q dp^dq) = (f a_p a_q)' dz^dp^dq.
  const double f = form.c[0];
  const double df = dc_dz[0];
  return (df + f * (basis[0].d1 / basis[0].value + basis[1].d1 / basis[1].value)) /
         basis[kZ].value;
}

std::array<TwoForm, 3> exterior_derivative(const CoframeBasis& basis, double z) {
  const auto b = basis.coefficients(z);
  std::array<TwoForm, 3> out;
  for (int a = 0; a < 3; ++a) {
    OneForm w;
    w.c[a] = 1.0;
    out[a] = exterior_derivative(b, w);
  }
  return out;
}

OneForm ConnectionForms::form(int i, int j) const {
  OneForm f;
  f.c = gamma[i][j];
  f.dc_dz = dgamma_dz[i][j];
  return f;
}

ConnectionForms solve_connection(const CoframeBasis& basis, double z) {
  ConnectionForms conn;
  conn.z = z;
  conn.basis = basis.coefficients(z);
  const auto dw = exterior_derivative(basis, z);

  // Unknowns X[pair(i<j)][k] = gamma[i][j][k]; gamma[j][i][k] = -X.
  // Row (i, slot(a<b)):  gamma[i][b][a] - gamma[i][a][b] = -(d w^i)_{ab}.
  Eigen::Matrix<double, 9, 9> m = Eigen::Matrix<double, 9, 9>::Zero();
  Eigen::Matrix<double, 9, 1> rhs;
  Eigen::Matrix<double, 9, 1> drhs;
  auto add = [&m](int row, int i, int j, int k, double coeff) {
    if (i == j) return;
    const int col = 3 * pair_of(i, j) + k;
    m(row, col) += i < j ? coeff : -coeff;
  };
  for (int i = 0; i < 3; ++i) {
    for (int s = 0; s < 3; ++s) {
      const int a = kWedgeSlots[s][0];
      const int b = kWedgeSlots[s][1];
      const int row = 3 * i + s;
      add(row, i, b, a, 1.0);
      add(row, i, a, b, -1.0);
      rhs(row) = -dw[i].c[s];
      drhs(row) = 0.0;
    }
  }
  // z-derivative of the d w^i coefficients: only the (i, z) slots are nonzero.
  for (int i = 0; i < 2; ++i) {
    const auto f = stretch_rate(conn.basis, i);
    drhs(3 * i + slot_of(i, kZ)) = f[1];  // -(d/dz)(-F_i)
  }

  Eigen::FullPivLU<Eigen::Matrix<double, 9, 9>> lu(m);
  if (!lu.isInvertible()) {
    throw NumericalError("structure equations are singular for coframe '" + basis.name() + "'");
  }
  const Eigen::Matrix<double, 9, 1> x = lu.solve(rhs);
  const Eigen::Matrix<double, 9, 1> dx = lu.solve(drhs);

  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        double g = 0.0;
        double dg = 0.0;
        if (i != j) {
          const int col = 3 * pair_of(i, j) + k;
          const double sign = i < j ? 1.0 : -1.0;
          g = sign * x(col);
          dg = sign * dx(col);
        }
        conn.gamma[i][j][k] = g;
        conn.dgamma_dz[i][j][k] = dg;
      }
    }
  }

  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        conn.antisymmetry_residual = std::max(
            conn.antisymmetry_residual, std::abs(conn.gamma[i][j][k] + conn.gamma[j][i][k]));
      }
    }
  }
  for (int i = 0; i < 3; ++i) {
    TwoForm t = dw[i];
    for (int j = 0; j < 3; ++j) {
      std::array<double, 3> wj{};
      wj[j] = 1.0;
      const TwoForm w = wedge(conn.gamma[i][j], wj);
      for (int s = 0; s < 3; ++s) t.c[s] += w.c[s];
    }
    for (double v : t.c) conn.torsion_residual = std::max(conn.torsion_residual, std::abs(v));
  }

  const auto& gpq = conn.gamma[0][1];
  if (std::abs(gpq[1]) <= kExactTol && std::abs(gpq[2]) <= kExactTol) conn.alpha = -gpq[0];
  const auto& gzp = conn.gamma[2][0];
  if (std::abs(gzp[1]) <= kExactTol && std::abs(gzp[2]) <= kExactTol) conn.beta = gzp[0];
  return conn;
}

Riemann curvature(const ConnectionForms& conn) {
  Riemann r{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      TwoForm omega = exterior_derivative(conn.basis, conn.form(i, j));
      for (int l = 0; l < 3; ++l) {
        const TwoForm w = wedge(conn.gamma[i][l], conn.gamma[l][j]);
        for (int s = 0; s < 3; ++s) omega.c[s] += w.c[s];
      }
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) r[i][j][k][l] = omega.on(k, l);
      }
    }
  }
  return r;
}

Riemann christoffel_riemann(const CoframeBasis& basis, double z) {
  const auto b = basis.coefficients(z);

  // Coordinate metric g_ab = c_a^2 delta_ab and its z-derivatives.
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d g1 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d g2 = Eigen::Matrix3d::Zero();
  for (int a = 0; a < 3; ++a) {
    g(a, a) = b[a].value * b[a].value;
    g1(a, a) = 2.0 * b[a].value * b[a].d1;
    g2(a, a) = 2.0 * (b[a].d1 * b[a].d1 + b[a].value * b[a].d2);
  }
  const Eigen::Matrix3d gi = g.inverse();
  const Eigen::Matrix3d gi1 = -gi * g1 * gi;

  // dg[c] = d_c g, ddg[c] = d_z d_c g.
  const Eigen::Matrix3d zero = Eigen::Matrix3d::Zero();
  auto dg = [&](int c) -> const Eigen::Matrix3d& { return c == kZ ? g1 : zero; };
  auto ddg = [&](int c) -> const Eigen::Matrix3d& { return c == kZ ? g2 : zero; };

  double gam[3][3][3];
  double dgam[3][3][3];  // d_z Gamma; other partials vanish
  for (int a = 0; a < 3; ++a) {
    for (int bb = 0; bb < 3; ++bb) {
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        double ds = 0.0;
        for (int d = 0; d < 3; ++d) {
          const double lower = dg(bb)(d, c) + dg(c)(d, bb) - dg(d)(bb, c);
          const double dlower = ddg(bb)(d, c) + ddg(c)(d, bb) - ddg(d)(bb, c);
          s += gi(a, d) * lower;
          ds += gi1(a, d) * lower + gi(a, d) * dlower;
        }
        gam[a][bb][c] = 0.5 * s;
        dgam[a][bb][c] = 0.5 * ds;
      }
    }
  }
  auto dGamma = [&](int e, int a, int bb, int c) { return e == kZ ? dgam[a][bb][c] : 0.0; };

  // R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}
  double rc[3][3][3][3];
  for (int a = 0; a < 3; ++a) {
    for (int bb = 0; bb < 3; ++bb) {
      for (int c = 0; c < 3; ++c) {
        for (int d = 0; d < 3; ++d) {
          double v = dGamma(c, a, d, bb) - dGamma(d, a, c, bb);
          for (int e = 0; e < 3; ++e) v += gam[a][c][e] * gam[e][d][bb] - gam[a][d][e] * gam[e][c][bb];
          rc[a][bb][c][d] = v;
        }
      }
    }
  }

  // Frame components with coframe theta = diag(c) and frame E = diag(1/c).
  Eigen::Matrix3d theta = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d frame = Eigen::Matrix3d::Zero();
  for (int a = 0; a < 3; ++a) {
    theta(a, a) = b[a].value;
    frame(a, a) = 1.0 / b[a].value;
  }
  Riemann r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double v = 0.0;
          for (int a = 0; a < 3; ++a)
            for (int bb = 0; bb < 3; ++bb)
              for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d)
                  v += theta(i, a) * rc[a][bb][c][d] * frame(bb, j) * frame(c, k) * frame(d, l);
          r[i][j][k][l] = v;
        }
  return r;
}

double SymmetryResiduals::max() const {
  return std::max({first_pair, last_pair, pair_exchange, bianchi});
}

SymmetryResiduals symmetry_residuals(const Riemann& r) {
  // Orthonormal frame: lowering the first index is the identity.
  SymmetryResiduals s;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          s.first_pair = std::max(s.first_pair, std::abs(r[i][j][k][l] + r[j][i][k][l]));
          s.last_pair = std::max(s.last_pair, std::abs(r[i][j][k][l] + r[i][j][l][k]));
          s.pair_exchange = std::max(s.pair_exchange, std::abs(r[i][j][k][l] - r[k][l][i][j]));
          s.bianchi = std::max(s.bianchi,
                               std::abs(r[i][j][k][l] + r[i][k][l][j] + r[i][l][j][k]));
        }
  return s;
}

namespace {

void accumulate(SymmetryResiduals& acc, const SymmetryResiduals& s) {
  acc.first_pair = std::max(acc.first_pair, s.first_pair);
  acc.last_pair = std::max(acc.last_pair, s.last_pair);
  acc.pair_exchange = std::max(acc.pair_exchange, s.pair_exchange);
  acc.bianchi = std::max(acc.bianchi, s.bianchi);
}

}  // namespace

CurvatureReport curvature_report(const CoframeBasis& basis, std::span<const double> z) {
  CurvatureReport rep{basis.name(), "cartan", {}, {}, 0.0};
  for (double zi : z) {
    const ConnectionForms conn = solve_connection(basis, zi);
    rep.torsion_residual = std::max(rep.torsion_residual, conn.torsion_residual);
    CurvatureSample s{zi, curvature(conn)};
    accumulate(rep.residuals, symmetry_residuals(s.r));
    rep.samples.push_back(s);
  }
  return rep;
}

CurvatureReport christoffel_oracle(const CoframeBasis& basis, std::span<const double> z) {
  CurvatureReport rep{basis.name(), "christoffel", {}, {}, 0.0};
  for (double zi : z) {
    CurvatureSample s{zi, christoffel_riemann(basis, zi)};
    accumulate(rep.residuals, symmetry_residuals(s.r));
    rep.samples.push_back(s);
  }
  return rep;
}

CurvatureReport christoffel_oracle(const FrameMetric& metric, std::span<const double> z) {
  return christoffel_oracle(CoframeBasis::from_metric(metric), z);
}

double max_difference(const CurvatureReport& a, const CurvatureReport& b) {
  if (a.samples.size() != b.samples.size()) {
    throw ValidationError("curvature reports sample different z grids");
  }
  double m = 0.0;
  for (std::size_t n = 0; n < a.samples.size(); ++n) {
    const Riemann& ra = a.samples[n].r;
    const Riemann& rb = b.samples[n].r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) m = std::max(m, std::abs(ra[i][j][k][l] - rb[i][j][k][l]));
  }
  return m;
}

std::array<double, 3> hodge_curl_of_frame_vector(const CoframeBasis& basis, Axis a, double z) {
  // In an orthonormal frame e_a is dual to w^a, so curl e_a = *(d w^a).
  const TwoForm d = exterior_derivative(basis, z)[index_of(a)];
  return {d.c[2], -d.c[1], d.c[0]};
}

std::string component_label(int i, int j, int k, int l) {
  static constexpr char kName[3] = {'p', 'q', 'z'};
  return fmt::format("R^{}_{}{}{}", kName[i], kName[j], kName[k], kName[l]);
}

std::vector<ComparisonRow> compare_reports(const CurvatureReport& cartan,
                                           const CurvatureReport& oracle,
                                           const ReferenceCurvature& reference) {
  if (cartan.samples.size() != oracle.samples.size()) {
    throw ValidationError("curvature reports sample different z grids");
  }
  std::vector<ComparisonRow> rows;
  for (std::size_t n = 0; n < cartan.samples.size(); ++n) {
    const double z = cartan.samples[n].z;
    for (const auto& ij : kWedgeSlots) {
      for (const auto& kl : kWedgeSlots) {
        const int i = ij[0], j = ij[1], k = kl[0], l = kl[1];
        ComparisonRow row;
        row.z = z;
        row.component = component_label(i, j, k, l);
        row.cartan = cartan.samples[n].r[i][j][k][l];
        row.oracle = oracle.samples[n].r[i][j][k][l];
        row.abs_diff = std::abs(row.cartan - row.oracle);
        if (reference) row.reference = reference(z, i, j, k, l);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

ReferenceCurvature stretched_coframe_reference(double lambda, double alpha) {
  return [lambda, alpha](double z, int i, int j, int k, int l) -> std::optional<double> {
    if (i == 0 && j == 1 && k == 0 && l == 1) return lambda * std::exp(-0.5 * lambda * z);
    if (i == 1 && j == 2 && k == 1 && l == 2) return 0.5 * lambda * lambda * std::exp(-lambda * z);
    if (i == 0 && j == 2 && k == 0 && l == 1) return -alpha * lambda * std::exp(-0.5 * lambda * z);
    return std::nullopt;
  };
}

std::string format_comparison_table(const std::vector<ComparisonRow>& rows) {
  std::string out = "z component cartan oracle reference abs_diff\n";
  for (const auto& r : rows) {
    out += fmt::format("{:.17g} {} {:.17g} {:.17g} {} {:.17g}\n", r.z, r.component, r.cartan,
                       r.oracle, r.reference ? fmt::format("{:.17g}", *r.reference) : "nan",
                       r.abs_diff);
  }
  return out;
}

}  // namespace dynamo
