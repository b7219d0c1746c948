#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include "sawser/stability.hpp"
#include "sawser/transforms.hpp"

#include <cmath>
#include <numbers>

using namespace sawser;
using doctest::Approx;

namespace {

const double kLn2 = std::numbers::ln2;

std::vector<double> positive_grid(double horizon, std::size_t n) { return geometric_grid(horizon / 1000, horizon, n); }

ModelFunctions from_text(const SawserParams& p, const char* psi) {
  const std::map<std::string, double> k{{"a", p.a}, {"b", p.b}, {"s0", p.s0}};
  return custom_model(p, Expression::parse(psi, k), default_grid(5.0));
}

// Closed-form GDR triple for Case A: chi_D = a e^{b s0} / t, xi_D^2 = e^{-b s0} t / a.
ModelFunctions case_a_gdr(const SawserParams& p) {
  const double m = p.a * std::exp(p.b * p.s0);
  ModelFunctions g = case_a(p);
  g.chi = numeric_profile([m](double u) { return m / u; }, "m / u");
  g.xi_squared = {[m](double u) { return u / m; }, [m](double) { return 1 / m; }, "u / m"};
  g.s0 = p.a * std::exp(p.b * p.s0);
  return g;
}

}  // namespace

TEST_CASE("expected counts: identity model") {
  const ModelFunctions m = untransformed(constant_profile(1.0));
  CHECK(gar_expected_count(m, 0, 1, 5) == Approx(5.0));
  CHECK(gdr_expected_count(m, 0, 1, 5) == Approx(5.0));
  CHECK(gar_expected_count(m, 2, 3, 0) == 0.0);
}

TEST_CASE("expected counts: Case A, b = ln 2") {
  const SawserParams p{1.0, kLn2, 0.0};
  const ModelFunctions m = case_a(p);
  CHECK(gar_expected_count(m, 0, 1, 1) == Approx(1.0).epsilon(1e-12));
  CHECK(gar_expected_count(m, 0, 1, 0) == 0.0);
  // From s = 1 the rain doubles: (2 / 2) * (4 - 2) = 2 on area 2.
  CHECK(gar_expected_count(m, 1, 2, 1) == Approx(2.0).epsilon(1e-12));
  CHECK(gdr_expected_count(case_a_gdr(p), 0, 1, 1) == Approx(1.0).epsilon(1e-10));
  CHECK(gdr_expected_count(case_a_gdr(p), 0, 1, 0) == 0.0);
}

TEST_CASE("expected counts reject bad input") {
  const ModelFunctions m = case_a({1, 1, 0});
  CHECK_THROWS_AS(gar_expected_count(m, 0, 1, -1), ArgumentError);
  CHECK_THROWS_AS(gar_expected_count(m, 0, -1, 1), ArgumentError);
  ModelFunctions down = untransformed(constant_profile(1.0));
  down.psi = {[](double s) { return 5 - s; }, [](double) { return -1.0; }, "5 - s"};
  CHECK_THROWS_AS(gar_expected_count(down, 0, 1, 1), ModelError);
  CHECK_THROWS_AS(gdr_expected_count(down, 0, 1, 1), ModelError);
  CHECK_THROWS_AS(case_a({1, 0, 0}), ArgumentError);
  CHECK_THROWS_AS(case_b({-1, 1, 0}), ArgumentError);
}

TEST_CASE("gar_to_gdr: Case A closed form") {
  for (double a : {1.0, 2.0}) {
    const SawserParams p{a, kLn2, 0.0};
    const ModelFunctions d = gar_to_gdr(case_a(p));
    CHECK(d.s0 == Approx(a));
    for (double t : {0.5, 1.0, 3.0, 10.0}) {
      CHECK(d.chi.chi(t) == Approx(a / t).epsilon(1e-10));
      CHECK(d.xi_squared(t) == Approx(t / a).epsilon(1e-10));
      CHECK(d.psi(t) == Approx(a * std::exp(kLn2 * t)));
    }
  }
}

TEST_CASE("gar_to_gdr: Case B closed form") {
  const SawserParams p{1.5, 0.8, 0.0};
  const ModelFunctions d = gar_to_gdr(case_b(p));
  CHECK(d.s0 == 0.0);
  for (double t : {0.25, 1.0, 4.0}) {
    CHECK(d.chi.chi(t) == Approx(p.a * p.b).epsilon(1e-10));
    CHECK(d.xi_squared(t) == Approx(std::exp(p.b * t)).epsilon(1e-10));
  }
}

TEST_CASE("gar_to_gdr: identity scale keeps chi") {
  const ModelFunctions m = untransformed(linear_profile());
  const ModelFunctions d = gar_to_gdr(m);
  for (double t : {0.5, 2.0}) {
    CHECK(d.chi.chi(t) == Approx(m.chi.chi(t)));
    CHECK(d.xi_squared(t) == Approx(1.0));
  }
}

TEST_CASE("property: GAR and GDR counts agree on a 20 x 20 grid") {
  const SawserParams p{1.0, 0.5, 0.0};
  std::vector<ModelFunctions> models{case_a(p), case_b(p), from_text(p, "exp(2*b*t)"), from_text(p, "t^3 + t"),
                                     from_text(p, "log(1 + t) + t")};
  const auto grid = positive_grid(5.0, 20);
  for (const ModelFunctions& m : models) {
    CAPTURE(m.label);
    const ModelFunctions d = gar_to_gdr(m);
    double worst = 0;
    for (double s : grid) {
      for (double t : grid) {
        const double area = 1.0 + s;
        const double gar = gar_expected_count(m, s, area, t);
        // xi_D^2(psi(s)) = xi_A^2(s), so the region has the same area in both readings.
        CHECK(d.xi_squared(m.psi(s)) == Approx(m.xi_squared(s)).epsilon(1e-9));
        const double gdr = gdr_expected_count(d, s, area, t);
        worst = std::max(worst, std::abs(gar - gdr) / std::max(1.0, std::abs(gar)));
      }
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("property: translation maps s0 to psi(s0)") {
  for (double s0 : {0.0, 0.5, 2.0}) {
    const SawserParams p{1.2, 0.9, s0};
    for (const ModelFunctions& m : {case_a(p), case_b(p), from_text(p, "t^3 + t")}) {
      CHECK(gar_to_gdr(m).s0 == Approx(m.psi(m.s0)));
    }
  }
}

TEST_CASE("sawser_chi reproduces the closed forms") {
  const SawserParams p{1.0, 0.7, 0.0};
  const auto grid = default_grid(5.0);
  const ModelFunctions a = from_text(p, "a*exp(b*t)");
  for (double u : {1.2, 3.0, 20.0}) CHECK(a.chi.chi(u) == Approx(1.0).epsilon(1e-9));
  const ModelFunctions b = from_text(p, "max(t, 0)");
  for (double u : {0.1, 1.0, 4.0}) CHECK(b.chi.chi(u) == Approx(p.a * p.b * std::exp(p.b * u)).epsilon(1e-9));

  const RealFunction bad = from_expression(Expression::parse("exp(-t)"), "exp(-t)");
  CHECK_THROWS_AS(sawser_chi(bad, [](double t) { return -std::log(t); }, p, grid), ModelError);
}

TEST_CASE("sawser_chi for psi = exp(2 b s) satisfies INOT") {
  const SawserParams p{1.0, 0.5, 0.0};
  const ModelFunctions m = from_text(p, "exp(2*b*t)");
  for (double u : {1.5, 4.0}) CHECK(m.chi.chi(u) == Approx(0.5 / std::sqrt(u)).epsilon(1e-9));
  const auto grid = positive_grid(5.0, 20);
  CHECK(inot_grid(m, grid, grid).max_abs_residual < 1e-6);
}

TEST_CASE("regularity checks") {
  const auto grid = default_grid(5.0);
  CHECK(check_regularity(case_a({1, 1, 0}), grid).ok());
  CHECK(check_regularity(case_b({2, 0.5, 1}), grid).ok());

  ModelFunctions shrinking = case_a({1, 1, 0});
  shrinking.xi_squared = {[](double t) { return 1 / (1 + t); }, [](double t) { return -1 / ((1 + t) * (1 + t)); },
                          "1/(1+t)"};
  const RegularityReport r = check_regularity(shrinking, grid);
  CHECK_FALSE(r.ok());
  bool flagged = false;
  for (const auto& c : r.checks) flagged |= (c.name == "xi^2 nondecreasing" && !c.pass);
  CHECK(flagged);

  CHECK_FALSE(check_regularity(frozen_time(1.0), grid).ok());
  CHECK_THROWS_AS(check_regularity(case_a({1, 1, 0}), {}), ArgumentError);
}

TEST_CASE("transform_tessellation") {
  const std::vector<RainPoint> rain{{{0.5, 0.5}, 0.3, 0.0}, {{0.25, 0.5}, 2.0, std::numbers::pi / 2}};
  const Tessellation y = build(unit_square(), rain);

  const ModelFunctions flat = untransformed(constant_profile(1));
  CHECK(transform_tessellation(y, flat, 5).to_json() == y.to_json());

  ModelFunctions four = flat;
  four.xi_squared = constant_function(4.0);
  const Tessellation z = transform_tessellation(y, four, 1.0);
  CHECK(polygon_area(z.window()) == Approx(4.0));
  CHECK(z.alive_count() == 2);
  for (CellId id : z.alive_ids()) CHECK(polygon_area(z.cell(id).polygon) == Approx(2.0));

  ModelFunctions zero = flat;
  zero.xi_squared = constant_function(0.0);
  CHECK_THROWS_AS(transform_tessellation(y, zero, 1.0), ModelError);
}

TEST_CASE("property: transformed cell counts follow psi") {
  Rng rng(5);
  const ModelFunctions m = case_b({1, 1, 0});
  const Tessellation y = build(unit_square(), testing::random_rain(rng, 60));
  for (double t : {0.0, 0.2, 0.5, 0.9}) {
    std::size_t expect = 1;
    for (const RainPoint& r : y.rain()) expect += r.tau <= m.psi(t);
    const Tessellation z = transform_tessellation(y, m, t);
    CHECK(z.alive_count() == expect);
    CHECK(polygon_area(z.window()) == Approx(m.xi_squared(t)));
  }
}
