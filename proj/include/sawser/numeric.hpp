#pragma once

#include "sawser/errors.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sawser {

using ScalarFn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod integral of f over [lo, hi].
/// Tolerance is relative to the integral of |f|.
double integrate(const ScalarFn& f, double lo, double hi, double rel_tol = 1e-12);

/// Central difference with step h = rel_step * max(1, |x|).
double central_difference(const ScalarFn& f, double x, double rel_step = 1e-6);

/// Bisection for an increasing-or-decreasing sign change of f on [lo, hi].
/// Returns nullopt if f(lo) and f(hi) have the same strict sign.
std::optional<double> bisect_root(const ScalarFn& f, double lo, double hi,
                                  double x_tol = 1e-12);

/// Solve f(x) = target for nondecreasing f. The bracket is grown
/// geometrically from [lo, hi] until it straddles the target, at most
/// `max_expansions` times per side.
std::optional<double> invert_increasing(const ScalarFn& f, double target, double lo, double hi,
                                        double x_tol = 1e-12, int max_expansions = 60);

/// Like invert_increasing, with Newton steps on `df` inside the bracket
/// (bisection whenever a step leaves it). Stops once a step or the bracket
/// is below x_tol * max(1, |x|).
std::optional<double> solve_increasing(const ScalarFn& f, const ScalarFn& df, double target, double lo,
                                       double hi, int max_expansions = 60, double x_tol = 1e-13);

/// `count` points from lo to hi with constant ratio (lo, hi > 0).
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

/// `count` evenly spaced points from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

/// 17 significant digits ("%.17g"); round-trips every double.
std::string format_double17(double v);

}  // namespace sawser
