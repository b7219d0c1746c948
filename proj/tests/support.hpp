#pragma once

#include "sawser/geometry.hpp"
#include "sawser/rain.hpp"
#include "sawser/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace testing {

/// Composite Simpson rule; an oracle independent of the library's quadrature.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int panels = 20000) {
  if (panels % 2) ++panels;
  const double h = (hi - lo) / panels;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) sum += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1e-300, std::abs(a), std::abs(b)});
}

/// Convex polygon from 3..12 points on a jittered ellipse.
inline sawser::ConvexPolygon random_convex(sawser::Rng& rng) {
  const std::size_t n = 3 + rng.index(10);
  std::vector<double> angles(n);
  for (double& a : angles) a = 2 * std::numbers::pi * rng.uniform();
  std::sort(angles.begin(), angles.end());
  const double rx = rng.uniform(0.5, 3.0);
  const double ry = rng.uniform(0.5, 3.0);
  const sawser::Vec2 c{rng.uniform(-2, 2), rng.uniform(-2, 2)};
  std::vector<sawser::Vec2> pts;
  for (double a : angles) pts.push_back({c.x + rx * std::cos(a), c.y + ry * std::sin(a)});
  try {
    return sawser::ConvexPolygon(pts);
  } catch (const sawser::GeometryError&) {
    return sawser::regular_ngon(n, rx);
  }
}

/// Point strictly inside: random convex combination of vertices.
inline sawser::Vec2 random_interior(const sawser::ConvexPolygon& poly, sawser::Rng& rng) {
  sawser::Vec2 p{0, 0};
  double total = 0;
  for (sawser::Vec2 v : poly.vertices()) {
    const double w = rng.uniform() + 0.05;
    p = p + w * v;
    total += w;
  }
  return (1.0 / total) * p;
}

/// kappa uniform drops in [0, 1) on the unit square, sorted by time.
inline std::vector<sawser::RainPoint> random_rain(sawser::Rng& rng, std::size_t kappa,
                                                   const sawser::ConvexPolygon& window = sawser::unit_square()) {
  std::vector<sawser::RainPoint> rain;
  const auto& box = window.bounds();
  while (rain.size() < kappa) {
    const sawser::Vec2 x{rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y)};
    if (!sawser::contains(window, x, 0.0)) continue;
    rain.push_back({x, rng.uniform(), std::numbers::pi * rng.uniform()});
  }
  std::sort(rain.begin(), rain.end(), [](const auto& a, const auto& b) { return a.tau < b.tau; });
  return rain;
}

}  // namespace testing
