#pragma once

#include "sawser/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace sawser {

/// Incidence tolerance for boundary and containment tests (length units).
inline constexpr double kIncidenceEps = 1e-9;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

struct BoundingBox {
  Vec2 lo;
  Vec2 hi;

  bool contains(Vec2 p, double eps = kIncidenceEps) const {
    return p.x >= lo.x - eps && p.x <= hi.x + eps && p.y >= lo.y - eps && p.y <= hi.y + eps;
  }
  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Strictly convex polygon with counter-clockwise vertices.
///
/// Construction normalizes the input: clockwise input is reversed,
/// near-duplicate vertices are merged and collinear triples (turn sine
/// below 1e-9) drop their middle vertex. Non-convex or degenerate input
/// throws GeometryError.
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Vec2> vertices);

  std::span<const Vec2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  Vec2 operator[](std::size_t i) const { return vertices_[i]; }
  const BoundingBox& bounds() const { return bounds_; }
  double diameter() const;

  friend bool operator==(const ConvexPolygon&, const ConvexPolygon&) = default;

 private:
  std::vector<Vec2> vertices_;
  BoundingBox bounds_;
};

/// Maximal segment through an interior point, clipped to a polygon.
struct Chord {
  Vec2 p0;
  Vec2 p1;
  Vec2 through;
  double mark = 0.0;

  double length() const { return distance(p0, p1); }
};

ConvexPolygon unit_square();
ConvexPolygon square(double side);
ConvexPolygon rectangle(double width, double height);
/// Regular n-gon inscribed in a circle of `radius` about the origin.
ConvexPolygon regular_ngon(std::size_t sides, double radius);

double polygon_area(const ConvexPolygon& poly);

/// Closed-polygon membership; points within kIncidenceEps of an edge count.
bool contains(const ConvexPolygon& poly, Vec2 p, double eps = kIncidenceEps);

/// Signed distance from p to the nearest edge line, positive inside.
double interior_depth(const ConvexPolygon& poly, Vec2 p);

/// Unit direction of the dividing line for a mark: angle (mark + pi/2) mod pi.
Vec2 chord_direction(double mark);

/// Chord through strictly interior x along chord_direction(mark).
/// Throws GeometryError when x is within kIncidenceEps of the boundary or outside.
Chord chord_through(const ConvexPolygon& poly, Vec2 x, double mark);

/// Line through x along chord_direction(mark), clipped to the polygon, with
/// no interior check. x may lie on the boundary; the result can then be
/// degenerate.
Chord clip_line(const ConvexPolygon& poly, Vec2 x, double mark);

/// Splits along the chord's supporting line. `first` lies to the left of
/// p0 -> p1. Throws GeometryError for chords shorter than kIncidenceEps or
/// lines that miss the interior.
std::pair<ConvexPolygon, ConvexPolygon> split(const ConvexPolygon& poly, const Chord& chord);

/// Dilation about the origin. Throws ArgumentError for factor <= 0.
ConvexPolygon scale(const ConvexPolygon& poly, double factor);

nlohmann::json to_json(const ConvexPolygon& poly);
ConvexPolygon polygon_from_json(const nlohmann::json& j);

}  // namespace sawser
