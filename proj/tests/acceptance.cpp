// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include "sawser/cli.hpp"
#include "sawser/random.hpp"
#include "sawser/stability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace sawser;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. Poisson count law of the rain.
Verdict count_law() {
  const auto start = Clock::now();
  const IntensityProfile chi = constant_profile(1.0);
  const std::size_t n = 10000;
  double sum = 0, sum_sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double k =
        static_cast<double>(sample_rain(chi, unit_square(), 0, 1, AngleLaw::uniform(), child_seed(101, i)).size());
    sum += k;
    sum_sq += k * k;
  }
  const double mean = sum / n;
  const double var = (sum_sq - n * mean * mean) / (n - 1);
  const double secs = seconds_since(start);
  return {std::abs(mean - 1) <= 0.04 && std::abs(var - 1) <= 0.1 && secs < 10,
          fmt("mean %.4f, variance %.4f, %.2f s", mean, var, secs)};
}

// 2. GAR and translated GDR counts agree, and the closed-form translations hold.
Verdict equivalence() {
  const std::map<std::string, double> k{{"a", 1.0}, {"b", 0.5}, {"s0", 0.0}};
  const SawserParams p{1.0, 0.5, 0.0};
  std::vector<ModelFunctions> models{case_a(p), case_b(p)};
  for (const char* psi : {"exp(2*b*t)", "t^3 + t", "log(1 + t) + t"}) {
    models.push_back(custom_model(p, Expression::parse(psi, k), default_grid(5.0)));
  }
  const auto grid = geometric_grid(5e-3, 5.0, 20);
  double worst = 0;
  for (const ModelFunctions& m : models) {
    const ModelFunctions d = gar_to_gdr(m);
    for (double s : grid) {
      for (double t : grid) {
        const double gar = gar_expected_count(m, s, 1.0, t);
        const double gdr = gdr_expected_count(d, s, 1.0, t);
        worst = std::max(worst, std::abs(gar - gdr) / std::max(1e-300, std::abs(gar)));
      }
    }
  }

  // Rows at a = 1: Case A -> (a/t, t, e^{bt}), Case B -> (ab, e^{bt}, t).
  double row_err = 0;
  const SawserParams q{1.0, 0.7, 0.0};
  const ModelFunctions da = gar_to_gdr(case_a(q));
  const ModelFunctions db = gar_to_gdr(case_b(q));
  for (double t : {0.5, 1.0, 2.0, 8.0}) {
    row_err = std::max({row_err, std::abs(da.chi.chi(t) - q.a / t) / (q.a / t), std::abs(da.xi_squared(t) - t) / t,
                        std::abs(da.psi(t) - std::exp(q.b * t)) / std::exp(q.b * t),
                        std::abs(db.chi.chi(t) - q.a * q.b) / (q.a * q.b),
                        std::abs(db.xi_squared(t) - std::exp(q.b * t)) / std::exp(q.b * t),
                        std::abs(db.psi(t) - t) / t});
  }
  return {worst < 1e-8 && row_err < 1e-8,
          fmt("5 models, max relative gap %.2e; closed-form rows max error %.2e", worst, row_err)};
}

// 3. MEPA limit and its failures.
Verdict mepa_limit() {
  double worst = 0;
  bool all_converged = true;
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {0.5, 1.0}) {
      const MepaResult r = mepa_estimate(case_a({a, b, 0}), 0, 30 / b);
      all_converged &= r.satisfied();
      worst = std::max(worst, std::abs(r.estimate - a) / a);
    }
  }
  // b -> 0: xi^2 = 1 and psi = a, nothing ever falls.
  const bool degenerate_flagged = !mepa_estimate(frozen_time(1.0), 0, 30).satisfied();
  const bool identity_flagged = !mepa_estimate(untransformed(constant_profile(1.0)), 0, 30).satisfied();
  return {all_converged && worst <= 1e-4 && degenerate_flagged && identity_flagged,
          fmt("max relative error %.2e; b->0 flagged %s, identity flagged %s", worst,
              degenerate_flagged ? "yes" : "no", identity_flagged ? "yes" : "no")};
}

// 4. INOT residuals.
Verdict inot() {
  const auto grid = geometric_grid(5e-3, 5.0, 20);
  double worst_family = 0;
  for (double b : {0.5, 1.0}) {
    worst_family = std::max(worst_family, inot_grid(case_a({1.0, b, 0}), grid, grid).max_abs_residual);
    worst_family = std::max(worst_family, inot_grid(case_b({1.0, b, 0}), grid, grid).max_abs_residual);
  }
  const InotGridResult control = inot_grid(untransformed(linear_profile()), grid, grid);
  double control_gap = 0;
  for (const auto& [s, t, r] : control.residuals) control_gap = std::max(control_gap, std::abs(r - t));
  return {worst_family < 1e-6 && control_gap <= 1e-4,
          fmt("Cases A/B max residual %.2e; control max |residual - t| %.2e", worst_family, control_gap)};
}

// 5. Cells = points + 1 and the areas partition the window.
Verdict count_identity() {
  std::size_t violations = 0;
  double worst_area = 0;
  std::size_t max_kappa = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Rng rng(child_seed(505, i));
    const double rate = rng.uniform(0, 150);
    std::vector<RainPoint> rain =
        sample_rain(constant_profile(rate), unit_square(), 0, 1, AngleLaw::uniform(), child_seed(506, i));
    if (rain.size() > 200) rain.resize(200);
    max_kappa = std::max(max_kappa, rain.size());
    const Tessellation t = build(unit_square(), rain);
    if (t.alive_count() != rain.size() + 1) ++violations;
    worst_area = std::max(worst_area, std::abs(alive_area(t) - 1.0));
  }
  return {violations == 0 && worst_area <= 1e-8,
          fmt("%zu violations, max area error %.2e, max kappa %zu", violations, worst_area, max_kappa)};
}

// 6. Lifetimes of cells with Z-area near L follow the closed-form survival.
Verdict lifetime_law() {
  const SawserParams p{1.0, std::numbers::ln2, 0.0};
  const ModelFunctions m = case_a(p);
  const double s = 1.0;
  const double follow_up = 4.0;  // survival there is e^{-15}
  const double area = 1.0;
  const AreaBand band = band_around(area);
  LifetimeSample sample;
  for_each_replicate(m, scale(unit_square(), 4.0), s + follow_up, AngleLaw::uniform(), 800, 606, 1,
                     [&](std::size_t, const Tessellation& y) {
                       const auto recs = lifetime_records(y, m, s, s + follow_up);
                       const LifetimeSample part = filter_lifetimes(recs, band);
                       sample.lifetimes.insert(sample.lifetimes.end(), part.lifetimes.begin(), part.lifetimes.end());
                       sample.censored += part.censored;
                     });
  auto survival = [&](double t) { return std::exp(-area * p.a * (std::exp(p.b * t) - 1)); };
  const double d = sup_distance_to_survival(sample.lifetimes, survival);
  const bool spot = std::abs(waiting_time_survival(m, area, s, 1.0) - std::exp(-1.0)) < 1e-12;
  return {d < 0.05 && sample.lifetimes.size() >= 1000 && spot,
          fmt("%zu uncensored lifetimes (%zu censored), sup distance %.4f; S(1) = e^-1 %s", sample.lifetimes.size(),
              sample.censored, d, spot ? "yes" : "no")};
}

// 7. Full statistical suite on the shipped configs, plus the necessity probe.
Verdict statistical_suite() {
  const auto start = Clock::now();
  std::ostringstream detail;
  bool pass = true;
  for (const char* name : {"case_a.toml", "case_b.toml"}) {
    const RunConfig c = load_config(std::string(SAWSER_CONFIG_DIR) + "/" + name);
    const StabilityReport r = run_verify(c);
    pass &= r.all_passed();
    detail << name << ' ' << (r.all_passed() ? "pass" : "FAIL");
    for (const TestOutcome& t : r.checks) {
      if (t.p_value) detail << fmt(", %s p=%.3f", t.name.c_str(), *t.p_value);
      if (t.name == "cells per area") detail << fmt(", cells/area stat %.4f", t.statistic);
    }
    detail << "; ";
  }
  const RunConfig probe = load_config(std::string(SAWSER_CONFIG_DIR) + "/control_perturbed_xi.toml");
  const StabilityReport r = run_verify(probe);
  bool inot_failed = false;
  for (const TestOutcome& t : r.checks) inot_failed |= (t.name == "inot" && !t.passed());
  const std::string cmd = std::string("\"") + SAWSER_TOOL + "\" verify --config \"" + SAWSER_CONFIG_DIR +
                          "/control_perturbed_xi.toml\" > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  const bool nonzero = status != 0;
  pass &= inot_failed && nonzero;
  const double secs = seconds_since(start);
  pass &= secs <= 300;
  detail << fmt("perturbed xi^2: INOT residual %.3g, INOT %s, tool exit %s; %.1f s", r.inot_residual_max,
                inot_failed ? "fails" : "passes", nonzero ? "nonzero" : "zero", secs);
  return {pass, detail.str()};
}

// 8. Null calibration: both groups observed at the same time.
Verdict null_calibration() {
  const ModelFunctions m = case_a({1.0, std::numbers::ln2, 0.0});
  const ConvexPolygon window = scale(unit_square(), 4.0);
  const double s = 1.0;
  const double follow_up = 3.0;
  const std::size_t per_group = 60;
  int rejections = 0;
  int conclusive = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    std::vector<LifetimeRecord> groups[2];
    for_each_replicate(m, window, s + follow_up, AngleLaw::uniform(), 2 * per_group, child_seed(808, rep), 1,
                       [&](std::size_t i, const Tessellation& y) {
                         const auto recs = lifetime_records(y, m, s, s + follow_up);
                         groups[i % 2].insert(groups[i % 2].end(), recs.begin(), recs.end());
                       });
    std::vector<double> areas;
    for (const auto& g : groups) {
      for (const LifetimeRecord& r : g) areas.push_back(r.cell_area_at_birth);
    }
    std::nth_element(areas.begin(), areas.begin() + areas.size() / 2, areas.end());
    const AreaBand band = band_around(areas[areas.size() / 2]);
    const TestOutcome t =
        empirical_lifetime_invariance(filter_lifetimes(groups[0], band), filter_lifetimes(groups[1], band), 0.05);
    if (t.status == TestOutcome::Status::kInconclusive) continue;
    ++conclusive;
    rejections += t.p_value && *t.p_value < 0.05;
  }
  const double rate = conclusive ? static_cast<double>(rejections) / conclusive : 0.0;
  return {conclusive == 100 && rate >= 0.01 && rate <= 0.12,
          fmt("%d of %d repetitions with p < 0.05 (%.0f%%)", rejections, conclusive, 100 * rate)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"Poisson count law", count_law},
      {"GAR/GDR equivalence", equivalence},
      {"MEPA limit", mepa_limit},
      {"INOT residuals", inot},
      {"cell count identity", count_identity},
      {"lifetime survival law", lifetime_law},
      {"statistical suite", statistical_suite},
      {"null calibration", null_calibration},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("criterion %d (%s): %s  %s\n", index, name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
