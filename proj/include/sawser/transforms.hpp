#pragma once

#include "sawser/expression.hpp"
#include "sawser/numeric.hpp"
#include "sawser/rain.hpp"
#include "sawser/tessellation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sawser {

/// Scalar function with an optional closed-form derivative.
struct RealFunction {
  ScalarFn value;
  ScalarFn derivative;  // empty -> central difference, h = 1e-6 * max(1, |t|)
  std::string label;

  double operator()(double t) const { return value(t); }
  double derivative_at(double t) const;
};

RealFunction constant_function(double c);
RealFunction from_expression(const Expression& e, std::string label);

/// Parameters of the exponential family: X(psi(s)) = a e^{b s},
/// xi^2(s) = e^{-b s0} e^{b s}.
struct SawserParams {
  double a = 1.0;
  double b = 1.0;
  double s0 = 0.0;

  /// Throws ArgumentError unless a > 0 and b > 0.
  void validate() const;
  /// Limit of the mean points per unit area, a e^{b s0} (equals a for s0 = 0).
  double mepa_limit() const;
};

/// Rain intensity, spatial scale and time change, read as a GAR triple by
/// the GAR operations and as a GDR triple by the GDR ones.
struct ModelFunctions {
  IntensityProfile chi;
  RealFunction xi_squared;
  RealFunction psi;
  ScalarFn psi_inverse;  // empty -> numeric inversion on the support
  double s0 = 0.0;
  std::optional<SawserParams> params;
  std::string label;

  /// psi^{-1}(t) for t in the image of psi on its support.
  /// Throws ModelError when t is outside that image.
  double inverse_psi(double t) const;

  /// Integral of chi over [psi(s), psi(s + t)]. Throws ModelError when
  /// psi(s + t) < psi(s).
  double rain_mass(double s, double t) const;
};

ModelFunctions case_a(const SawserParams& p);
ModelFunctions case_b(const SawserParams& p);
/// Rain profile with xi^2 = 1, psi(s) = max(s, 0), s0 = 0.
ModelFunctions untransformed(IntensityProfile chi);
/// xi^2 = 1 and psi = a constant: no rain ever reaches the window.
ModelFunctions frozen_time(double a);
/// Case A with chi multiplied by `factor` on [cut, inf).
ModelFunctions rescaled_half_line(const SawserParams& p, double cut, double factor);
/// Same model with xi^2 multiplied by (1 + amplitude sin t).
ModelFunctions perturb_xi_squared(ModelFunctions m, double amplitude);

/// Given psi, the intensity making (chi, e^{-b s0} e^{b t}, psi) satisfy the
/// exponential identity: chi(t) = a b e^{b psi^{-1}(t)} / psi'(psi^{-1}(t)).
/// psi' is checked on `grid` (points with psi > 0); a non-positive value
/// throws ModelError. The returned profile has no closed-form cumulative.
IntensityProfile sawser_chi(const RealFunction& psi, const ScalarFn& psi_inverse, const SawserParams& params,
                            const std::vector<double>& grid);

/// Model from a custom psi, with chi from sawser_chi unless overridden.
ModelFunctions custom_model(const SawserParams& p, const Expression& psi, const std::vector<double>& grid,
                            const std::optional<Expression>& chi_override = std::nullopt,
                            const std::optional<Expression>& xi_squared_override = std::nullopt);

/// Expected count in the GAR reading:
/// (area_at_s / xi^2(s)) * (X(psi(s + t)) - X(psi(s))).
double gar_expected_count(const ModelFunctions& m, double s, double area_at_s, double t);

/// Expected count in the GDR reading:
/// (area / xi^2(psi(s))) * integral over [psi(s), psi(s + t)] of xi^2(u) chi(u).
double gdr_expected_count(const ModelFunctions& m, double s, double area_at_psi_s, double t);

/// GDR triple with the same expected counts: xi_D^2 = xi_A^2 o psi^{-1},
/// chi_D = chi_A / xi_D^2, psi unchanged, s0_D = psi(s0_A).
ModelFunctions gar_to_gdr(const ModelFunctions& m);

struct RegularityCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RegularityReport {
  std::vector<RegularityCheck> checks;
  bool ok() const;
};

/// 0 and `points - 1` geometrically spaced times on [horizon / 1000, horizon].
std::vector<double> default_grid(double horizon, std::size_t points = 101);

/// Grid-based regularity checks: psi' > 0 on the support, (xi^2)' >= 0,
/// a root of xi^2 = 1, an s with psi(s) = s0, nonnegative functions and
/// psi(psi^{-1}(t)) = t.
RegularityReport check_regularity(const ModelFunctions& m, const std::vector<double>& grid);

/// Z(t) = xi(t) Y(psi(t)): truncates y to Y-time psi(t) and dilates by
/// sqrt(xi^2(t)). Throws ModelError when xi^2(t) <= 0.
Tessellation transform_tessellation(const Tessellation& y, const ModelFunctions& m, double t);

}  // namespace sawser
