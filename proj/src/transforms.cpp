#include "sawser/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sawser {

double RealFunction::derivative_at(double t) const {
  if (derivative) return derivative(t);
  return central_difference(value, t, 1e-6);
}

RealFunction constant_function(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }, format_double17(c)};
}

RealFunction from_expression(const Expression& e, std::string label) {
  const Expression d = e.derivative();
  return {[e](double t) { return e(t); }, [d](double t) { return d(t); }, std::move(label)};
}

void SawserParams::validate() const {
  if (!(a > 0) || !std::isfinite(a)) throw ArgumentError("SAWSER parameter a must be positive");
  if (!(b > 0) || !std::isfinite(b)) {
    throw ArgumentError("SAWSER parameter b must be positive (b = 0 breaks the MEPA condition)");
  }
  if (!std::isfinite(s0)) throw ArgumentError("SAWSER parameter s0 must be finite");
}

double SawserParams::mepa_limit() const { return a * std::exp(b * s0); }

namespace {

double numeric_inverse(const RealFunction& psi, double t) {
  if (!(t > 0)) throw ModelError("psi^{-1}: " + format_double17(t) + " is outside the image of the support");
  auto dpsi = [&psi](double s) { return psi.derivative_at(s); };
  auto root = solve_increasing(psi.value, dpsi, t, -1.0, 1.0);
  if (!root || !(std::abs(psi(*root) - t) <= 1e-9 * std::max(1.0, t))) {
    throw ModelError("psi^{-1}: psi does not reach " + format_double17(t));
  }
  return *root;
}

}  // namespace

double ModelFunctions::inverse_psi(double t) const {
  if (!(t > 0)) throw ModelError("psi^{-1}: " + format_double17(t) + " is outside the image of the support");
  if (psi_inverse) return psi_inverse(t);
  return numeric_inverse(psi, t);
}

double ModelFunctions::rain_mass(double s, double t) const {
  const double u0 = psi(s);
  const double u1 = psi(s + t);
  if (!(u0 >= 0) || !(u1 >= 0)) throw ModelError("psi must be nonnegative");
  if (u1 < u0) throw ModelError("psi decreases on [" + format_double17(s) + ", " + format_double17(s + t) + "]");
  return integrated_intensity(chi, u0, u1);
}

namespace {

RealFunction exponential_scale(const SawserParams& p) {
  const double a0 = std::exp(-p.b * p.s0);
  const double b = p.b;
  return {[a0, b](double t) { return a0 * std::exp(b * t); }, [a0, b](double t) { return a0 * b * std::exp(b * t); },
          "exp(-b s0) exp(b t)"};
}

std::string params_text(const SawserParams& p) {
  std::ostringstream os;
  os << "a = " << format_double17(p.a) << ", b = " << format_double17(p.b) << ", s0 = " << format_double17(p.s0);
  return os.str();
}

RealFunction clamp_identity() {
  return {[](double s) { return std::max(s, 0.0); }, [](double s) { return s > 0 ? 1.0 : 0.0; }, "t 1[0,inf)(t)"};
}

}  // namespace

ModelFunctions case_a(const SawserParams& p) {
  p.validate();
  const double a = p.a;
  const double b = p.b;
  ModelFunctions m;
  m.chi = constant_profile(1.0);
  m.xi_squared = exponential_scale(p);
  m.psi = {[a, b](double s) { return a * std::exp(b * s); }, [a, b](double s) { return a * b * std::exp(b * s); },
           "a exp(b t)"};
  m.psi_inverse = [a, b](double t) { return std::log(t / a) / b; };
  m.s0 = p.s0;
  m.params = p;
  m.label = "Case A (" + params_text(p) + ")";
  return m;
}

ModelFunctions case_b(const SawserParams& p) {
  p.validate();
  ModelFunctions m;
  m.chi = exponential_profile(p.a, p.b);
  m.xi_squared = exponential_scale(p);
  m.psi = clamp_identity();
  m.psi_inverse = [](double t) { return t; };
  m.s0 = p.s0;
  m.params = p;
  m.label = "Case B (" + params_text(p) + ")";
  return m;
}

ModelFunctions untransformed(IntensityProfile chi) {
  ModelFunctions m;
  m.label = "untransformed rain, " + chi.description;
  m.chi = std::move(chi);
  m.xi_squared = constant_function(1.0);
  m.psi = clamp_identity();
  m.psi_inverse = [](double t) { return t; };
  m.s0 = 0.0;
  return m;
}

ModelFunctions frozen_time(double a) {
  if (!(a >= 0)) throw ArgumentError("frozen_time: psi value must be nonnegative");
  ModelFunctions m;
  m.chi = constant_profile(1.0);
  m.xi_squared = constant_function(1.0);
  m.psi = constant_function(a);
  m.s0 = 0.0;
  m.label = "frozen time (b = 0), psi = " + format_double17(a);
  return m;
}

ModelFunctions rescaled_half_line(const SawserParams& p, double cut, double factor) {
  if (!(cut >= 0) || !(factor > 0)) throw ArgumentError("rescaled_half_line: need cut >= 0 and factor > 0");
  ModelFunctions m = case_a(p);
  IntensityProfile chi;
  chi.chi = [cut, factor](double u) { return u < cut ? 1.0 : factor; };
  chi.cumulative = [cut, factor](double t) { return t < cut ? t : cut + factor * (t - cut); };
  chi.inverse_cumulative = [cut, factor](double x) { return x < cut ? x : cut + (x - cut) / factor; };
  chi.rate_bound = std::max(1.0, factor);
  chi.description = "chi(u) = 1 on [0, " + format_double17(cut) + "), " + format_double17(factor) + " after";
  m.chi = std::move(chi);
  m.params.reset();
  m.label = "Case A with chi rescaled on a half-line (" + params_text(p) + ")";
  return m;
}

ModelFunctions perturb_xi_squared(ModelFunctions m, double amplitude) {
  RealFunction base = m.xi_squared;
  m.xi_squared = {[base, amplitude](double t) { return base(t) * (1 + amplitude * std::sin(t)); },
                  [base, amplitude](double t) {
                    return base.derivative_at(t) * (1 + amplitude * std::sin(t)) + base(t) * amplitude * std::cos(t);
                  },
                  "(" + base.label + ") (1 + " + format_double17(amplitude) + " sin t)"};
  m.params.reset();
  m.label += ", xi^2 perturbed";
  return m;
}

IntensityProfile sawser_chi(const RealFunction& psi, const ScalarFn& psi_inverse, const SawserParams& params,
                            const std::vector<double>& grid) {
  params.validate();
  for (double s : grid) {
    if (psi(s) > 0 && !(psi.derivative_at(s) > 0)) {
      throw ModelError("sawser_chi: psi' <= 0 at s = " + format_double17(s));
    }
  }
  const double a = params.a;
  const double b = params.b;
  IntensityProfile p;
  p.chi = [psi, psi_inverse, a, b](double t) {
    const double s = psi_inverse(t);
    return a * b * std::exp(b * s) / psi.derivative_at(s);
  };
  p.description = "chi(t) = a b exp(b psi^-1(t)) / psi'(psi^-1(t)), psi = " + psi.label;
  return p;
}

ModelFunctions custom_model(const SawserParams& p, const Expression& psi, const std::vector<double>& grid,
                            const std::optional<Expression>& chi_override,
                            const std::optional<Expression>& xi_squared_override) {
  p.validate();
  ModelFunctions m;
  m.psi = from_expression(psi, psi.to_string());
  m.xi_squared = xi_squared_override ? from_expression(*xi_squared_override, xi_squared_override->to_string())
                                     : exponential_scale(p);
  m.s0 = p.s0;
  m.params = p;
  const RealFunction psi_fn = m.psi;
  auto inverse = [psi_fn](double t) { return numeric_inverse(psi_fn, t); };
  if (chi_override) {
    m.chi = numeric_profile([e = *chi_override](double u) { return e(u); }, "chi(u) = " + chi_override->to_string());
    m.params.reset();
  } else {
    m.chi = sawser_chi(m.psi, inverse, p, grid);
  }
  if (xi_squared_override) m.params.reset();
  m.label = "custom psi = " + psi.to_string() + " (" + params_text(p) + ")";
  return m;
}

double gar_expected_count(const ModelFunctions& m, double s, double area_at_s, double t) {
  if (!(t >= 0)) throw ArgumentError("gar_expected_count: t must be nonnegative");
  if (!(area_at_s >= 0)) throw ArgumentError("gar_expected_count: area must be nonnegative");
  const double scale = m.xi_squared(s);
  if (!(scale > 0)) throw ModelError("gar_expected_count: xi^2(s) must be positive");
  if (t == 0 || area_at_s == 0) return 0.0;
  return area_at_s / scale * m.rain_mass(s, t);
}

double gdr_expected_count(const ModelFunctions& m, double s, double area_at_psi_s, double t) {
  if (!(t >= 0)) throw ArgumentError("gdr_expected_count: t must be nonnegative");
  if (!(area_at_psi_s >= 0)) throw ArgumentError("gdr_expected_count: area must be nonnegative");
  const double u0 = m.psi(s);
  const double u1 = m.psi(s + t);
  if (!(u0 >= 0)) throw ModelError("gdr_expected_count: psi must be nonnegative");
  if (u1 < u0) throw ModelError("gdr_expected_count: psi decreases");
  if (t == 0 || area_at_psi_s == 0 || u1 == u0) return 0.0;
  const double scale = m.xi_squared(u0);
  if (!(scale > 0)) throw ModelError("gdr_expected_count: xi^2(psi(s)) must be positive");
  const double mass = integrate([&m](double u) { return m.xi_squared(u) * m.chi.chi(u); }, u0, u1);
  return area_at_psi_s / scale * mass;
}

ModelFunctions gar_to_gdr(const ModelFunctions& m) {
  ModelFunctions d;
  d.psi = m.psi;
  d.psi_inverse = m.psi_inverse;
  d.s0 = m.psi(m.s0);
  d.params = m.params;
  // Captured by value: the returned triple must outlive m.
  auto xi_a = m.xi_squared;
  auto inverse = [src = m](double u) { return src.inverse_psi(u); };
  d.xi_squared = {[xi_a, inverse](double u) { return xi_a(inverse(u)); }, {}, "xi_A^2 o psi^-1"};
  auto xi_d = d.xi_squared;
  auto chi_a = m.chi.chi;
  d.chi = numeric_profile([chi_a, xi_d](double u) { return chi_a(u) / xi_d(u); }, "chi_A / xi_D^2");
  d.label = "GDR translation of " + m.label;
  return d;
}

bool RegularityReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const RegularityCheck& c) { return c.pass; });
}

std::vector<double> default_grid(double horizon, std::size_t points) {
  if (!(horizon > 0)) throw ArgumentError("default_grid: horizon must be positive");
  if (points < 2) throw ArgumentError("default_grid: need at least 2 points");
  std::vector<double> grid{0.0};
  const auto rest = geometric_grid(horizon * 1e-3, horizon, points - 1);
  grid.insert(grid.end(), rest.begin(), rest.end());
  return grid;
}

RegularityReport check_regularity(const ModelFunctions& m, const std::vector<double>& grid) {
  if (grid.empty()) throw ArgumentError("check_regularity: grid must be nonempty");
  RegularityReport report;
  auto add = [&report](std::string name, bool pass, std::string detail) {
    report.checks.push_back({std::move(name), pass, std::move(detail)});
  };
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());

  {
    bool pass = true;
    std::string detail = "psi' > 0 wherever psi > 0";
    double prev_s = std::numeric_limits<double>::quiet_NaN();
    double prev_psi = 0;
    for (double s : sorted) {
      const double v = m.psi(s);
      if (v > 0) {
        if (!(m.psi.derivative_at(s) > 0)) {
          pass = false;
          detail = "psi'(" + format_double17(s) + ") <= 0 on the support";
          break;
        }
        if (!std::isnan(prev_s) && !(v > prev_psi)) {
          pass = false;
          detail = "psi not strictly increasing between " + format_double17(prev_s) + " and " + format_double17(s);
          break;
        }
        prev_s = s;
        prev_psi = v;
      }
    }
    if (pass && std::isnan(prev_s)) {
      pass = false;
      detail = "psi vanishes on the whole grid";
    }
    add("psi strictly increasing on support", pass, detail);
  }
  {
    bool pass = true;
    std::string detail = "(xi^2)' >= 0 on the grid";
    for (double s : sorted) {
      const double slope = m.xi_squared.derivative_at(s);
      if (slope < -1e-12 * std::max(1.0, std::abs(m.xi_squared(s)))) {
        pass = false;
        detail = "(xi^2)'(" + format_double17(s) + ") = " + format_double17(slope) + " < 0";
        break;
      }
    }
    add("xi^2 nondecreasing", pass, detail);
  }
  {
    const double lo = sorted.front();
    const double hi = std::max(sorted.back(), m.s0);
    auto root = bisect_root([&m](double s) { return m.xi_squared(s) - 1.0; }, std::min(lo, m.s0), hi, 1e-12);
    const double at_s0 = m.xi_squared(m.s0);
    const bool pass = root.has_value() && m.s0 >= 0 && std::abs(at_s0 - 1.0) <= 1e-12;
    std::string detail = root ? "xi^2 = 1 at s = " + format_double17(*root) : "no root of xi^2 = 1 on the grid";
    detail += "; xi^2(s0) = " + format_double17(at_s0);
    add("xi(s0) = 1", pass, detail);
  }
  {
    // psi may only approach s0 asymptotically (Case A with s0 = 0), so a
    // bracket that gets within 1e-9 counts as reaching it.
    const double span = 100.0 * std::max(1.0, std::abs(sorted.back()));
    auto gap = [&m](double s) { return m.psi(s) - m.s0; };
    std::optional<double> root = bisect_root(gap, -span, span, 1e-12);
    bool pass = root.has_value() && std::abs(gap(*root)) <= 1e-9;
    if (!pass) {
      for (double s = -span; s <= span; s += span / 1000) {
        if (std::abs(gap(s)) <= 1e-9) {
          pass = true;
          root = s;
          break;
        }
      }
    }
    add("psi reaches s0", pass,
        pass ? "psi(" + format_double17(*root) + ") = s0 within 1e-9" : "no s in the search range with psi(s) = s0");
  }
  {
    bool pass = true;
    std::string detail = "chi >= 0, psi >= 0, xi^2 > 0 on the grid";
    for (double s : sorted) {
      const double p = m.psi(s);
      const double x = m.xi_squared(s);
      if (!(p >= 0) || !(x > 0)) {
        pass = false;
        detail = "psi or xi^2 out of range at s = " + format_double17(s);
        break;
      }
      if (p > 0) {
        const double c = m.chi.chi(p);
        if (!(c >= 0)) {
          pass = false;
          detail = "chi(" + format_double17(p) + ") < 0";
          break;
        }
      }
    }
    add("nonnegative functions", pass, detail);
  }
  {
    bool pass = true;
    std::string detail = "psi(psi^-1(t)) = t within 1e-9 on the grid image";
    try {
      for (double s : sorted) {
        const double t = m.psi(s);
        if (!(t > 0)) continue;
        const double back = m.psi(m.inverse_psi(t));
        if (std::abs(back - t) > 1e-9 * std::max(1.0, t)) {
          pass = false;
          detail = "psi(psi^-1(" + format_double17(t) + ")) = " + format_double17(back);
          break;
        }
      }
    } catch (const ModelError& e) {
      pass = false;
      detail = e.what();
    }
    add("psi invertible on support", pass, detail);
  }
  return report;
}

Tessellation transform_tessellation(const Tessellation& y, const ModelFunctions& m, double t) {
  const double xi2 = m.xi_squared(t);
  if (!(xi2 > 0) || !std::isfinite(xi2)) throw ModelError("transform_tessellation: xi^2(t) must be positive");
  const double y_time = m.psi(t);
  Tessellation at = y_time >= y.clock() ? y : y.truncated(y_time);
  if (xi2 == 1.0) return at;
  return at.scaled(std::sqrt(xi2));
}

}  // namespace sawser
