#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynamo/frame_metric.hpp"
#include "dynamo/grid.hpp"

namespace dynamo {

// Orientation convention
// ----------------------
// Frame indices 0, 1, 2 are p, q, z; the orientation is w^p ^ w^q ^ w^z.
// Two-forms are stored on the ordered basis
//   slot 0: w^p ^ w^q,   slot 1: w^p ^ w^z,   slot 2: w^q ^ w^z,
// so a form with slot value c on (a, b) has c on w^a ^ w^b and -c on
// w^b ^ w^a. Hodge star: *(w^p^w^q) = w^z, *(w^p^w^z) = -w^q, *(w^q^w^z) = w^p.

/// One-form in the orthonormal coframe with z-dependent coefficients.
struct OneForm {
  std::array<double, 3> c{};     ///< coefficient on w^a
  std::array<double, 3> dc_dz{}; ///< d/dz of each coefficient
};

struct TwoForm {
  std::array<double, 3> c{};
  double on(int a, int b) const;  ///< coefficient on w^a ^ w^b, any a, b
};

inline constexpr std::array<std::array<int, 2>, 3> kWedgeSlots{{{0, 1}, {0, 2}, {1, 2}}};

TwoForm wedge(const std::array<double, 3>& alpha, const std::array<double, 3>& beta);

/// Diagonal orthonormal coframe  w^a = c_a(z) dx^a  with (x^a) = (p, q, z).
class CoframeBasis {
 public:
  using Coefficient = std::function<Jet(double)>;

  CoframeBasis(std::array<Coefficient, 3> coefficients, std::string name);

  /// dp, dq, dz.
  static CoframeBasis flat();
  /// c_a(z) = prefactor_a * exp(rate_a z), derivatives analytic.
  static CoframeBasis exponential(std::array<double, 3> prefactors, std::array<double, 3> rates,
                                  std::string name);
  /// Arnold coframe e^{-lambda z} dp, e^{lambda z} dq, dz.
  static CoframeBasis arnold(double lambda);
  /// Arnold coframe scaled by sqrt(c), i.e. the metric multiplied by c.
  static CoframeBasis arnold_constant_conformal(double lambda, double c);
  /// dp, e^{lambda z} dq, e^{lambda z / 2} dz.
  static CoframeBasis stretched_coframe(double lambda);
  /// dp, e^{2 lambda z} dq, e^{lambda z / 2} dz (line element with
  /// dq^2 coefficient e^{4 lambda z} and dz^2 coefficient e^{lambda z}).
  static CoframeBasis stretched_line_element(double lambda);
  /// Coframe of a FrameMetric (scale factors as coefficients).
  static CoframeBasis from_metric(const FrameMetric& metric);

  /// Coefficient jets at z; throws ValidationError if any is not positive.
  std::array<Jet, 3> coefficients(double z) const;
  const std::string& name() const { return name_; }

 private:
  std::array<Coefficient, 3> coefficients_;
  std::string name_;
};

/// d of a one-form, returned on the wedge basis.
TwoForm exterior_derivative(const std::array<Jet, 3>& basis, const OneForm& form);
/// d of a two-form whose slot coefficients have z-derivatives `dc_dz`;
/// returns the coefficient on w^p ^ w^q ^ w^z.
double exterior_derivative(const std::array<Jet, 3>& basis, const TwoForm& form,
                           const std::array<double, 3>& dc_dz);
/// d w^a for a = p, q, z.
std::array<TwoForm, 3> exterior_derivative(const CoframeBasis& basis, double z);

/// Levi-Civita connection one-forms w^i_j = sum_k gamma[i][j][k] w^k at one z.
struct ConnectionForms {
  using Table = std::array<std::array<std::array<double, 3>, 3>, 3>;

  double z = 0.0;
  std::array<Jet, 3> basis{};
  Table gamma{};
  Table dgamma_dz{};
  /// max |w^i_j + w^j_i| coefficient.
  double antisymmetry_residual = 0.0;
  /// max |d w^i + w^i_j ^ w^j| coefficient (first structure equation).
  double torsion_residual = 0.0;
  /// If w^p_q = -alpha w^p exactly, alpha; otherwise empty.
  std::optional<double> alpha;
  /// If w^z_p = beta w^p exactly, beta; otherwise empty.
  std::optional<double> beta;

  OneForm form(int i, int j) const;
};

/// Solves  d w^i = - w^i_j ^ w^j  with w_ij antisymmetric as a 9x9 linear
/// system. Throws NumericalError if the system is singular.
ConnectionForms solve_connection(const CoframeBasis& basis, double z);

/// R[i][j][k][l]: frame Riemann components, R^i_j = sum_{k<l} R^i_{jkl} w^k ^ w^l.
using Riemann = std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3>;

/// Second structure equation  R^i_j = d w^i_j + w^i_l ^ w^l_j.
Riemann curvature(const ConnectionForms& conn);

/// Coordinate Christoffel symbols -> coordinate Riemann tensor -> frame
/// components. Independent of the exterior-calculus path.
Riemann christoffel_riemann(const CoframeBasis& basis, double z);

struct SymmetryResiduals {
  double first_pair = 0.0;     ///< max |R_ijkl + R_jikl|
  double last_pair = 0.0;      ///< max |R_ijkl + R_ijlk|
  double pair_exchange = 0.0;  ///< max |R_ijkl - R_klij|
  double bianchi = 0.0;        ///< max |R_ijkl + R_iklj + R_iljk|
  double max() const;
};

SymmetryResiduals symmetry_residuals(const Riemann& r);

struct CurvatureSample {
  double z = 0.0;
  Riemann r{};
};

struct CurvatureReport {
  std::string metric_name;
  std::string method;
  std::vector<CurvatureSample> samples;
  SymmetryResiduals residuals;   ///< max over samples
  double torsion_residual = 0.0; ///< max over samples (Cartan path only)
};

/// Cartan path over the given z samples.
CurvatureReport curvature_report(const CoframeBasis& basis, std::span<const double> z);
/// Christoffel path over the given z samples.
CurvatureReport christoffel_oracle(const CoframeBasis& basis, std::span<const double> z);
CurvatureReport christoffel_oracle(const FrameMetric& metric, std::span<const double> z);

/// max |R_a - R_b| over all samples and components.
double max_difference(const CurvatureReport& a, const CurvatureReport& b);

/// Frame components of curl e_a = *(d w^a), from the exterior derivative.
std::array<double, 3> hodge_curl_of_frame_vector(const CoframeBasis& basis, Axis a, double z);

/// "R^p_qpq" style label; indices run over the independent i<j, k<l blocks.
std::string component_label(int i, int j, int k, int l);

struct ComparisonRow {
  double z = 0.0;
  std::string component;
  double cartan = 0.0;
  double oracle = 0.0;
  std::optional<double> reference;
  double abs_diff = 0.0;  ///< |cartan - oracle|
};

using ReferenceCurvature = std::function<std::optional<double>(double z, int i, int j, int k, int l)>;

/// Tabulates every independent component (i<j, k<l) at every sample.
std::vector<ComparisonRow> compare_reports(const CurvatureReport& cartan,
                                           const CurvatureReport& oracle,
                                           const ReferenceCurvature& reference = {});

/// Literature closed forms for the stretched coframe:
///   R^p_qpq = lambda e^{-lambda z/2},  R^q_zqz = lambda^2 e^{-lambda z}/2,
///   R^p_zpq = -alpha lambda e^{-lambda z/2}.
ReferenceCurvature stretched_coframe_reference(double lambda, double alpha);

/// Whitespace-separated table with header
///   z component cartan oracle reference abs_diff
/// ("nan" where no reference value exists), 17 significant digits.
std::string format_comparison_table(const std::vector<ComparisonRow>& rows);

}  // namespace dynamo
