#include "sawser/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace sawser {
namespace {

constexpr double kCollinearSine = 1e-9;
constexpr double kDuplicateRel = 1e-13;

double signed_area2(const std::vector<Vec2>& v) {
  double acc = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) acc += cross(v[i], v[(i + 1) % n]);
  return acc;
}

BoundingBox bounding_box(const std::vector<Vec2>& v) {
  BoundingBox b{v.front(), v.front()};
  for (const Vec2 p : v) {
    b.lo.x = std::min(b.lo.x, p.x);
    b.lo.y = std::min(b.lo.y, p.y);
    b.hi.x = std::max(b.hi.x, p.x);
    b.hi.y = std::max(b.hi.y, p.y);
  }
  return b;
}

// Drops near-duplicate neighbours, then middle vertices of collinear
// triples, until stable.
void normalize(std::vector<Vec2>& v) {
  if (v.size() < 3) return;
  const BoundingBox box = bounding_box(v);
  const double dup_eps = kDuplicateRel * std::max({1.0, box.width(), box.height()});

  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
      const std::size_t j = (i + 1) % v.size();
      if (distance(v[i], v[j]) <= dup_eps) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
        --i;
      }
    }
    for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
      const std::size_t n = v.size();
      const Vec2 a = v[(i + n - 1) % n];
      const Vec2 b = v[i];
      const Vec2 c = v[(i + 1) % n];
      const Vec2 e0 = b - a;
      const Vec2 e1 = c - b;
      const double sine = cross(e0, e1) / (norm(e0) * norm(e1));
      if (std::abs(sine) <= kCollinearSine && dot(e0, e1) > 0) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
}

}  // namespace

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  for (const Vec2 p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("polygon vertex is not finite");
  }
  if (vertices_.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
  if (signed_area2(vertices_) < 0) std::reverse(vertices_.begin(), vertices_.end());
  normalize(vertices_);
  if (vertices_.size() < 3 || !(signed_area2(vertices_) > 0)) {
    throw GeometryError("polygon is degenerate (zero area)");
  }
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = vertices_[i] - vertices_[(i + n - 1) % n];
    const Vec2 e1 = vertices_[(i + 1) % n] - vertices_[i];
    if (cross(e0, e1) / (norm(e0) * norm(e1)) < -kCollinearSine) {
      throw GeometryError("polygon is not convex");
    }
  }
  bounds_ = bounding_box(vertices_);
}

double ConvexPolygon::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
      best = std::max(best, distance(vertices_[i], vertices_[j]));
    }
  }
  return best;
}

ConvexPolygon unit_square() { return rectangle(1.0, 1.0); }

ConvexPolygon square(double side) { return rectangle(side, side); }

ConvexPolygon rectangle(double width, double height) {
  if (!(width > 0) || !(height > 0)) throw ArgumentError("rectangle: sides must be positive");
  return ConvexPolygon({{0, 0}, {width, 0}, {width, height}, {0, height}});
}

ConvexPolygon regular_ngon(std::size_t sides, double radius) {
  if (sides < 3) throw ArgumentError("regular_ngon: need at least 3 sides");
  if (!(radius > 0)) throw ArgumentError("regular_ngon: radius must be positive");
  std::vector<Vec2> v(sides);
  for (std::size_t i = 0; i < sides; ++i) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(sides);
    v[i] = {radius * std::cos(phi), radius * std::sin(phi)};
  }
  return ConvexPolygon(std::move(v));
}

double polygon_area(const ConvexPolygon& poly) {
  // Shoelace about the first vertex keeps cancellation small for cells far
  // from the origin.
  const auto v = poly.vertices();
  double acc = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) acc += cross(v[i] - v[0], v[i + 1] - v[0]);
  return 0.5 * acc;
}

double interior_depth(const ConvexPolygon& poly, Vec2 p) {
  const auto v = poly.vertices();
  double depth = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Vec2 e = v[(i + 1) % n] - v[i];
    depth = std::min(depth, cross(e, p - v[i]) / norm(e));
  }
  return depth;
}

bool contains(const ConvexPolygon& poly, Vec2 p, double eps) {
  if (!poly.bounds().contains(p, eps)) return false;
  return interior_depth(poly, p) >= -eps;
}

Vec2 chord_direction(double mark) {
  double theta = std::fmod(mark + 0.5 * std::numbers::pi, std::numbers::pi);
  if (theta < 0) theta += std::numbers::pi;
  return {std::cos(theta), std::sin(theta)};
}

Chord chord_through(const ConvexPolygon& poly, Vec2 x, double mark) {
  if (!(interior_depth(poly, x) > kIncidenceEps)) {
    throw GeometryError("chord_through: point is not strictly interior");
  }
  return clip_line(poly, x, mark);
}

Chord clip_line(const ConvexPolygon& poly, Vec2 x, double mark) {
  const Vec2 d = chord_direction(mark);
  const auto v = poly.vertices();
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  // Each edge is a half-plane cross(e, q - a) >= 0; intersect the line's
  // parameter interval with all of them.
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Vec2 a = v[i];
    const Vec2 e = v[(i + 1) % n] - a;
    const double rate = cross(e, d);
    const double offset = cross(e, x - a);
    if (rate > 0) {
      lo = std::max(lo, -offset / rate);
    } else if (rate < 0) {
      hi = std::min(hi, -offset / rate);
    }
  }
  return Chord{x + lo * d, x + hi * d, x, mark};
}

std::pair<ConvexPolygon, ConvexPolygon> split(const ConvexPolygon& poly, const Chord& chord) {
  const Vec2 axis = chord.p1 - chord.p0;
  const double len = norm(axis);
  if (!(len >= kIncidenceEps)) throw GeometryError("split: degenerate chord");

  const auto v = poly.vertices();
  const std::size_t n = v.size();
  const double on_line = 1e-12 * std::max(1.0, poly.diameter());
  std::vector<double> side(n);
  for (std::size_t i = 0; i < n; ++i) side[i] = cross(axis, v[i] - chord.p0) / len;

  auto snap = [&](Vec2 q) { return distance(q, chord.p0) <= distance(q, chord.p1) ? chord.p0 : chord.p1; };

  std::vector<Vec2> left;
  std::vector<Vec2> right;
  left.reserve(n + 2);
  right.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double si = side[i];
    const double sj = side[j];
    if (std::abs(si) <= on_line) {
      left.push_back(v[i]);
      right.push_back(v[i]);
    } else if (si > 0) {
      left.push_back(v[i]);
    } else {
      right.push_back(v[i]);
    }
    if ((si > on_line && sj < -on_line) || (si < -on_line && sj > on_line)) {
      const double t = si / (si - sj);
      const Vec2 q = snap(v[i] + t * (v[j] - v[i]));
      left.push_back(q);
      right.push_back(q);
    }
  }
  if (left.size() < 3 || right.size() < 3) throw GeometryError("split: chord does not cross the polygon");
  return {ConvexPolygon(std::move(left)), ConvexPolygon(std::move(right))};
}

ConvexPolygon scale(const ConvexPolygon& poly, double factor) {
  if (!(factor > 0) || !std::isfinite(factor)) throw ArgumentError("scale: factor must be positive");
  std::vector<Vec2> v(poly.vertices().begin(), poly.vertices().end());
  for (Vec2& p : v) p = factor * p;
  return ConvexPolygon(std::move(v));
}

nlohmann::json to_json(const ConvexPolygon& poly) {
  nlohmann::json out = nlohmann::json::array();
  for (const Vec2 p : poly.vertices()) out.push_back({p.x, p.y});
  return out;
}

ConvexPolygon polygon_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ArgumentError("polygon JSON must be an array of [x, y] pairs");
  std::vector<Vec2> v;
  v.reserve(j.size());
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ArgumentError("polygon vertex must be a [x, y] pair of numbers");
    }
    v.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return ConvexPolygon(std::move(v));
}

}  // namespace sawser
