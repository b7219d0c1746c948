#include "sawser/numeric.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace sawser {

double integrate(const ScalarFn& f, double lo, double hi, double rel_tol) {
  if (lo == hi) return 0.0;
  if (hi < lo) return -integrate(f, hi, lo, rel_tol);
  // Boost's error estimate does not shrink with the interval width, so short
  // intervals recurse to full depth. Integrate over [0, 1] instead. The
  // tolerance is relative to the L1 norm and must stay above rounding.
  const double width = hi - lo;
  auto unit = [&](double x) { return f(lo + width * x); };
  return width * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(unit, 0.0, 1.0, 15, rel_tol);
}

double central_difference(const ScalarFn& f, double x, double rel_step) {
  const double h = rel_step * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

std::optional<double> bisect_root(const ScalarFn& f, double lo, double hi, double x_tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) return std::nullopt;
  auto tol = [x_tol](double a, double b) { return std::abs(b - a) <= x_tol; };
  std::uintmax_t max_iter = 2000;
  auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol, max_iter);
  return 0.5 * (a + b);
}

std::optional<double> invert_increasing(const ScalarFn& f, double target, double lo, double hi,
                                        double x_tol, int max_expansions) {
  double width = std::max(1.0, hi - lo);
  for (int i = 0; i < max_expansions && f(lo) > target; ++i) {
    lo -= width;
    width *= 2.0;
  }
  width = std::max(1.0, hi - lo);
  for (int i = 0; i < max_expansions && f(hi) < target; ++i) {
    hi += width;
    width *= 2.0;
  }
  if (f(lo) > target || f(hi) < target) return std::nullopt;
  return bisect_root([&](double x) { return f(x) - target; }, lo, hi, x_tol);
}

std::optional<double> solve_increasing(const ScalarFn& f, const ScalarFn& df, double target, double lo,
                                       double hi, int max_expansions, double x_tol) {
  double width = std::max(1.0, hi - lo);
  for (int i = 0; i < max_expansions && f(lo) > target; ++i) {
    hi = lo;
    lo -= width;
    width *= 2.0;
  }
  width = std::max(1.0, hi - lo);
  for (int i = 0; i < max_expansions && f(hi) < target; ++i) {
    lo = hi;
    hi += width;
    width *= 2.0;
  }
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  if (flo > 0 || fhi < 0) return std::nullopt;
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double fx = f(x) - target;
    if (fx == 0) return x;
    if (fx < 0) {
      lo = x;
    } else {
      hi = x;
    }
    const double slope = df(x);
    double next = slope > 0 ? x - fx / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double tol = std::max(x_tol, 4 * std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(next));
    if (std::abs(next - x) <= tol || hi - lo <= tol) return next;
    x = next;
  }
  return x;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo)) throw ArgumentError("geometric_grid: need 0 < lo <= hi");
  if (count == 0) return {};
  if (count == 1) return {hi};
  std::vector<double> out(count);
  const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo * std::exp(ratio * static_cast<double>(i));
  out.back() = hi;
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {hi};
  std::vector<double> out(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

std::string format_double17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace sawser
