#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "sawser/geometry.hpp"

#include <numbers>

using namespace sawser;
using doctest::Approx;

namespace {

ConvexPolygon triangle() { return ConvexPolygon({{0, 0}, {1, 0}, {0, 1}}); }

bool same_points(Vec2 a, Vec2 b, double tol = 1e-12) { return distance(a, b) <= tol; }

bool chord_matches(const Chord& c, Vec2 a, Vec2 b) {
  return (same_points(c.p0, a) && same_points(c.p1, b)) || (same_points(c.p0, b) && same_points(c.p1, a));
}

}  // namespace

TEST_CASE("polygon area") {
  CHECK(polygon_area(unit_square()) == Approx(1.0));
  CHECK(polygon_area(triangle()) == Approx(0.5));
  CHECK(polygon_area(scale(unit_square(), 3.0)) == Approx(9.0));
  CHECK(polygon_area(regular_ngon(4, std::sqrt(0.5))) == Approx(1.0));
}

TEST_CASE("construction normalizes orientation and collinear vertices") {
  const ConvexPolygon cw({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  CHECK(polygon_area(cw) == Approx(1.0));
  CHECK(cross(cw[1] - cw[0], cw[2] - cw[1]) > 0);

  const ConvexPolygon with_midpoint({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(with_midpoint.size() == 4);

  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}, {2, 0}}), GeometryError);
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}}), GeometryError);
  CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}}), GeometryError);
}

TEST_CASE("containment is closed") {
  CHECK(contains(unit_square(), {0.5, 0.5}));
  CHECK_FALSE(contains(unit_square(), {1.5, 0.5}));
  CHECK(contains(unit_square(), {1.0, 0.5}));
  CHECK(contains(unit_square(), {1.0 + 5e-10, 0.5}));
  CHECK_FALSE(contains(unit_square(), {1.0 + 1e-6, 0.5}));
}

TEST_CASE("chord through a point follows mark + pi/2") {
  CHECK(chord_matches(chord_through(unit_square(), {0.5, 0.5}, 0.0), {0.5, 0}, {0.5, 1}));
  CHECK(chord_matches(chord_through(unit_square(), {0.5, 0.5}, std::numbers::pi / 2), {0, 0.5}, {1, 0.5}));
  CHECK(chord_matches(chord_through(unit_square(), {0.25, 0.75}, std::numbers::pi / 2), {0, 0.75}, {1, 0.75}));

  CHECK_THROWS_AS(chord_through(unit_square(), {1.0, 0.5}, 0.0), GeometryError);
  CHECK_THROWS_AS(chord_through(unit_square(), {2.0, 0.5}, 0.0), GeometryError);
}

TEST_CASE("split examples") {
  {
    const auto [left, right] = split(unit_square(), chord_through(unit_square(), {0.5, 0.5}, 0.0));
    CHECK(polygon_area(left) == Approx(0.5));
    CHECK(polygon_area(right) == Approx(0.5));
    CHECK(left.bounds().width() == Approx(0.5));
    CHECK(right.bounds().height() == Approx(1.0));
  }
  {
    const Chord diagonal{{0, 0}, {1, 1}, {0.5, 0.5}, 3 * std::numbers::pi / 4};
    const auto [a, b] = split(unit_square(), diagonal);
    CHECK(a.size() == 3);
    CHECK(b.size() == 3);
    CHECK(polygon_area(a) == Approx(0.5));
    CHECK(polygon_area(b) == Approx(0.5));
  }
  const Chord tiny{{0.5, 0}, {0.5, 1e-12}, {0.5, 0}, 0.0};
  CHECK_THROWS_AS(split(unit_square(), tiny), GeometryError);
}

TEST_CASE("scale") {
  CHECK(scale(unit_square(), 1.0) == unit_square());
  CHECK(polygon_area(scale(unit_square(), 2.0)) == Approx(4.0));
  const double xi = 1.7;
  CHECK(testing::close_rel(polygon_area(scale(triangle(), xi)), xi * xi * 0.5, 1e-12));
  CHECK_THROWS_AS(scale(unit_square(), 0.0), ArgumentError);
  CHECK_THROWS_AS(scale(unit_square(), -1.0), ArgumentError);
}

TEST_CASE("json round trip") {
  const ConvexPolygon p = regular_ngon(7, 1.3);
  CHECK(polygon_from_json(to_json(p)) == p);
  CHECK(to_json(unit_square()).dump() == "[[0.0,0.0],[1.0,0.0],[1.0,1.0],[0.0,1.0]]");
}

TEST_CASE("property: split conserves area, stays convex and keeps the generating point") {
  Rng rng(12345);
  for (int i = 0; i < 1000; ++i) {
    const ConvexPolygon poly = testing::random_convex(rng);
    const Vec2 x = testing::random_interior(poly, rng);
    const double mark = std::numbers::pi * rng.uniform();
    const Chord c = chord_through(poly, x, mark);

    const Vec2 dir = (1.0 / c.length()) * (c.p1 - c.p0);
    CHECK(std::abs(dot(dir, {std::cos(mark), std::sin(mark)})) < 1e-9);
    CHECK(std::abs(interior_depth(poly, c.p0)) < 1e-9);
    CHECK(std::abs(interior_depth(poly, c.p1)) < 1e-9);

    const auto [a, b] = split(poly, c);  // constructor enforces convexity
    const double total = polygon_area(poly);
    CHECK(std::abs(polygon_area(a) + polygon_area(b) - total) <= 1e-9 * total);
    CHECK(contains(a, x));
    CHECK(contains(b, x));
  }
}

TEST_CASE("property: scale composes") {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    const ConvexPolygon p = testing::random_convex(rng);
    const double f = rng.uniform(0.1, 4);
    const double g = rng.uniform(0.1, 4);
    const ConvexPolygon twice = scale(scale(p, f), g);
    const ConvexPolygon once = scale(p, f * g);
    REQUIRE(twice.size() == once.size());
    for (std::size_t k = 0; k < once.size(); ++k) {
      CHECK(distance(twice[k], once[k]) <= 1e-12 * std::max(1.0, norm(once[k])));
    }
  }
}
