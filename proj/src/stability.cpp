#include "sawser/stability.hpp"

#include "sawser/errors.hpp"
#include "sawser/random.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

namespace sawser {

bool MepaResult::satisfied() const {
  return status == MepaStatus::kConverged && std::isfinite(estimate) && estimate > 0;
}

MepaResult mepa_estimate(const ModelFunctions& m, double s, double horizon, double rel_tol) {
  if (!(horizon > 0)) throw ArgumentError("mepa_estimate: horizon must be positive");
  auto f = [&](double t) { return m.rain_mass(s, t) / m.xi_squared(s + t); };
  MepaResult r;
  r.samples = {f(horizon / 4), f(horizon / 2), f(horizon)};
  const double prev = r.samples[1];
  const double last = r.samples[2];
  r.estimate = last;
  if (!std::isfinite(last)) {
    r.status = MepaStatus::kDivergesToInfinity;
  } else if (std::abs(last - prev) <= rel_tol * std::max(std::abs(last), std::abs(prev))) {
    r.status = MepaStatus::kConverged;
  } else {
    r.status = last > prev ? MepaStatus::kDivergesToInfinity : MepaStatus::kDivergesToZero;
  }
  return r;
}

double inot_residual(const ModelFunctions& m, double s, double t) {
  if (!(t > 0)) throw ArgumentError("inot_residual: t must be positive");
  const double h = 1e-5 * std::max(1.0, std::abs(s));
  auto g = [&](double x) { return m.rain_mass(x, t) / m.xi_squared(x); };
  return (g(s + h) - g(s - h)) / (2 * h);
}

InotGridResult inot_grid(const ModelFunctions& m, std::span<const double> s_grid, std::span<const double> t_grid) {
  InotGridResult out;
  out.residuals.reserve(s_grid.size() * t_grid.size());
  for (double s : s_grid) {
    for (double t : t_grid) {
      const double r = inot_residual(m, s, t);
      out.residuals.push_back({s, t, r});
      if (!(std::abs(r) <= out.max_abs_residual)) {
        out.max_abs_residual = std::isnan(r) ? std::numeric_limits<double>::infinity() : std::abs(r);
        out.worst_s = s;
        out.worst_t = t;
      }
    }
  }
  return out;
}

double waiting_time_survival(const ModelFunctions& m, double area_at_s, double s, double t) {
  if (!(t >= 0)) throw ArgumentError("waiting_time_survival: t must be nonnegative");
  if (!(area_at_s >= 0)) throw ArgumentError("waiting_time_survival: area must be nonnegative");
  return std::exp(-gar_expected_count(m, s, area_at_s, t));
}

Tessellation simulate_replicate(const ModelFunctions& m, const ConvexPolygon& window, double horizon,
                                const AngleLaw& angles, std::uint64_t seed) {
  const double end = m.psi(horizon);
  if (!(end >= 0)) throw ModelError("simulate_replicate: psi(horizon) must be nonnegative");
  const auto rain = sample_rain(m.chi, window, 0.0, end, angles, seed);
  return build(window, rain);
}

void for_each_replicate(const ModelFunctions& m, const ConvexPolygon& window, double horizon, const AngleLaw& angles,
                        std::size_t count, std::uint64_t seed, unsigned threads,
                        const std::function<void(std::size_t, const Tessellation&)>& visit) {
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) visit(i, simulate_replicate(m, window, horizon, angles, child_seed(seed, i)));
    return;
  }
  std::vector<std::optional<Tessellation>> batch(threads);
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t start = 0; start < count; start += threads) {
    const std::size_t n = std::min<std::size_t>(threads, count - start);
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      pool.emplace_back([&, k] {
        try {
          batch[k].emplace(simulate_replicate(m, window, horizon, angles, child_seed(seed, start + k)));
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (std::size_t k = 0; k < n; ++k) {
      if (errors[k]) std::rethrow_exception(errors[k]);
      visit(start + k, *batch[k]);
      batch[k].reset();
    }
  }
}

std::string to_string(TestOutcome::Status s) {
  switch (s) {
    case TestOutcome::Status::kPass:
      return "pass";
    case TestOutcome::Status::kFail:
      return "fail";
    case TestOutcome::Status::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

double kolmogorov_q(double x) {
  if (!(x > 0.2)) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-300) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ArgumentError("ks_two_sample: both samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double root = std::sqrt(ne);
  return {d, kolmogorov_q((root + 0.12 + 0.11 / root) * d)};
}

double sup_distance_to_survival(std::vector<double> samples, const std::function<double(double)>& survival) {
  if (samples.empty()) throw ArgumentError("sup_distance_to_survival: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 1.0 - survival(samples[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - cdf), std::abs(cdf - static_cast<double>(i) / n)});
  }
  return d;
}

std::vector<LifetimeRecord> lifetime_records(const Tessellation& y, const ModelFunctions& m, double s,
                                             double horizon) {
  if (!(horizon >= s)) throw ArgumentError("lifetime_records: horizon precedes the observation time");
  const double start = m.psi(s);
  const double end = m.psi(horizon);
  const double scale = m.xi_squared(s);
  if (!(scale > 0)) throw ModelError("lifetime_records: xi^2(s) must be positive");
  std::vector<LifetimeRecord> out;
  for (const Cell& c : y.cells()) {
    if (!c.alive_at(start)) continue;
    LifetimeRecord r;
    r.cell_area_at_birth = scale * polygon_area(c.polygon);
    r.observation_time = s;
    if (c.death_time && *c.death_time <= end) {
      r.observed_lifetime = std::max(0.0, m.inverse_psi(*c.death_time) - s);
    } else {
      r.observed_lifetime = horizon - s;
      r.censored = true;
    }
    out.push_back(r);
  }
  return out;
}

AreaBand band_around(double center, double halfwidth) {
  if (!(center > 0) || !(halfwidth >= 0) || !(halfwidth < 1)) {
    throw ArgumentError("band_around: need center > 0 and 0 <= halfwidth < 1");
  }
  return {(1 - halfwidth) * center, (1 + halfwidth) * center};
}

double LifetimeSample::censored_fraction() const {
  const std::size_t total = lifetimes.size() + censored;
  return total ? static_cast<double>(censored) / static_cast<double>(total) : 0.0;
}

LifetimeSample filter_lifetimes(std::span<const LifetimeRecord> records, const AreaBand& band) {
  LifetimeSample out;
  for (const LifetimeRecord& r : records) {
    if (!band.contains(r.cell_area_at_birth)) continue;
    if (r.censored) {
      ++out.censored;
    } else {
      out.lifetimes.push_back(r.observed_lifetime);
    }
  }
  return out;
}

TestOutcome empirical_lifetime_invariance(const LifetimeSample& first, const LifetimeSample& second, double alpha,
                                          std::size_t min_samples) {
  TestOutcome out;
  out.name = "lifetime invariance (KS)";
  const std::size_t n1 = first.lifetimes.size();
  const std::size_t n2 = second.lifetimes.size();
  char buf[160];
  std::snprintf(buf, sizeof buf, "n = %zu / %zu uncensored, censored %.3f / %.3f", n1, n2,
                first.censored_fraction(), second.censored_fraction());
  out.detail = buf;
  if (n1 < min_samples || n2 < min_samples) {
    out.status = TestOutcome::Status::kInconclusive;
    out.detail += ", fewer than " + std::to_string(min_samples) + " per group";
    return out;
  }
  const KsResult ks = ks_two_sample(first.lifetimes, second.lifetimes);
  out.statistic = ks.statistic;
  out.p_value = ks.p_value;
  out.status = ks.p_value > alpha ? TestOutcome::Status::kPass : TestOutcome::Status::kFail;
  return out;
}

std::vector<SelectionRecord> selection_records(const Tessellation& y, std::size_t limit) {
  std::vector<SelectionRecord> out;
  // Alive cells in id order with their areas.
  std::vector<std::pair<CellId, double>> alive{{0, polygon_area(y.window())}};
  for (const DivisionEvent& e : y.events()) {
    if (out.size() >= limit) break;
    auto it = std::lower_bound(alive.begin(), alive.end(), e.parent_id,
                               [](const auto& entry, CellId id) { return entry.first < id; });
    if (it == alive.end() || it->first != e.parent_id) throw ModelError("selection_records: event parent is not alive");
    SelectionRecord r;
    r.areas.reserve(alive.size());
    for (const auto& entry : alive) r.areas.push_back(entry.second);
    r.selected = static_cast<std::size_t>(it - alive.begin());
    out.push_back(std::move(r));
    alive.erase(it);
    for (CellId child : {e.child_a_id, e.child_b_id}) {
      const auto pos = std::lower_bound(alive.begin(), alive.end(), child,
                                        [](const auto& entry, CellId id) { return entry.first < id; });
      alive.insert(pos, {child, polygon_area(y.cell(child).polygon)});
    }
  }
  return out;
}

std::vector<SelectionRecord> uniform_selection_control(std::vector<SelectionRecord> records, std::uint64_t seed) {
  Rng rng(seed);
  for (SelectionRecord& r : records) {
    if (r.areas.empty()) throw ArgumentError("uniform_selection_control: record without cells");
    r.selected = static_cast<std::size_t>(rng.index(r.areas.size()));
  }
  return records;
}

TestOutcome selection_weight_test(std::span<const SelectionRecord> records, std::uint64_t seed, std::size_t bins,
                                  double alpha, std::size_t min_events) {
  if (bins < 2) throw ArgumentError("selection_weight_test: need at least 2 bins");
  TestOutcome out;
  out.name = "selection weights (chi-square)";
  out.detail = std::to_string(records.size()) + " events, " + std::to_string(bins) + " bins";
  if (records.size() < min_events) {
    out.status = TestOutcome::Status::kInconclusive;
    out.detail += ", fewer than " + std::to_string(min_events);
    return out;
  }
  Rng rng(seed);
  std::vector<double> observed(bins, 0.0);
  std::vector<std::size_t> order;
  for (const SelectionRecord& r : records) {
    if (r.selected >= r.areas.size()) throw ArgumentError("selection_weight_test: selected index out of range");
    order.resize(r.areas.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return r.areas[i] < r.areas[j]; });
    const double total = std::accumulate(r.areas.begin(), r.areas.end(), 0.0);
    double below = 0.0;
    for (std::size_t i : order) {
      if (i == r.selected) break;
      below += r.areas[i];
    }
    const double u = std::clamp((below + rng.uniform() * r.areas[r.selected]) / total, 0.0, 1.0);
    observed[std::min(bins - 1, static_cast<std::size_t>(u * static_cast<double>(bins)))] += 1.0;
  }
  const double expected = static_cast<double>(records.size()) / static_cast<double>(bins);
  double chi2 = 0.0;
  for (double o : observed) chi2 += (o - expected) * (o - expected) / expected;
  const boost::math::chi_squared dist(static_cast<double>(bins - 1));
  out.statistic = chi2;
  out.p_value = boost::math::cdf(boost::math::complement(dist, chi2));
  out.status = *out.p_value > alpha ? TestOutcome::Status::kPass : TestOutcome::Status::kFail;
  return out;
}

CellsPerAreaAccumulator::CellsPerAreaAccumulator(const ModelFunctions& m, const ConvexPolygon& window,
                                                 std::vector<double> times)
    : model_(m), window_area_(polygon_area(window)), times_(std::move(times)) {
  if (!std::is_sorted(times_.begin(), times_.end())) throw ArgumentError("cells_per_area_series: times must increase");
  for (double t : times_) psi_times_.push_back(m.psi(t));
  sums_.assign(times_.size(), 0.0);
}

void CellsPerAreaAccumulator::add(const Tessellation& y) {
  for (std::size_t k = 0; k < times_.size(); ++k) {
    const double at = psi_times_[k];
    const auto alive = std::count_if(y.cells().begin(), y.cells().end(), [at](const Cell& c) { return c.alive_at(at); });
    sums_[k] += static_cast<double>(alive);
  }
  ++count_;
}

std::vector<SeriesPoint> CellsPerAreaAccumulator::series() const {
  std::vector<SeriesPoint> out;
  for (std::size_t k = 0; k < times_.size(); ++k) {
    const double mean = count_ ? sums_[k] / static_cast<double>(count_) : 0.0;
    out.push_back({times_[k], mean / (model_.xi_squared(times_[k]) * window_area_)});
  }
  return out;
}

std::vector<SeriesPoint> cells_per_area_series(const ModelFunctions& m, const ConvexPolygon& window,
                                               std::span<const double> times, std::size_t replicates,
                                               std::uint64_t seed, unsigned threads) {
  if (replicates < 1) throw ArgumentError("cells_per_area_series: replicates must be at least 1");
  if (times.empty()) return {};
  CellsPerAreaAccumulator acc(m, window, {times.begin(), times.end()});
  for_each_replicate(m, window, times.back(), AngleLaw::uniform(), replicates, seed, threads,
                     [&](std::size_t, const Tessellation& y) { acc.add(y); });
  return acc.series();
}

VerifySettings with_default_grids(VerifySettings settings, double grid_horizon, std::size_t grid_points) {
  if (settings.regularity_grid.empty()) settings.regularity_grid = default_grid(grid_horizon, grid_points);
  if (settings.inot_s_grid.empty()) settings.inot_s_grid = geometric_grid(grid_horizon / 1000, grid_horizon, 20);
  if (settings.inot_t_grid.empty()) settings.inot_t_grid = geometric_grid(grid_horizon / 1000, grid_horizon, 20);
  return settings;
}

bool StabilityReport::all_passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const TestOutcome& c) { return c.passed(); });
}

bool StabilityReport::any_inconclusive() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const TestOutcome& c) { return c.status == TestOutcome::Status::kInconclusive; });
}

namespace {

std::string status_name(MepaStatus s) {
  switch (s) {
    case MepaStatus::kConverged:
      return "converged";
    case MepaStatus::kDivergesToZero:
      return "diverges_to_zero";
    case MepaStatus::kDivergesToInfinity:
      return "diverges_to_infinity";
  }
  return "unknown";
}

nlohmann::json mepa_json(const MepaResult& r) {
  nlohmann::json j;
  j["status"] = status_name(r.status);
  if (std::isfinite(r.estimate)) {
    j["estimate"] = r.estimate;
  } else {
    j["estimate"] = nullptr;
  }
  j["samples"] = r.samples;
  j["satisfied"] = r.satisfied();
  return j;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

}  // namespace

nlohmann::json StabilityReport::to_json() const {
  nlohmann::json j;
  j["model"] = model_label;
  j["mepa"] = mepa_json(mepa);
  j["mepa"]["by_s"] = nlohmann::json::array();
  for (const MepaResult& r : mepa_by_s) j["mepa"]["by_s"].push_back(mepa_json(r));
  if (mepa_target) {
    j["mepa_target"] = *mepa_target;
  } else {
    j["mepa_target"] = nullptr;
  }
  j["inot_residual_max"] = inot_residual_max;
  j["inot_worst"] = {{"s", inot_worst_s}, {"t", inot_worst_t}};
  j["regularity"] = nlohmann::json::array();
  for (const RegularityCheck& c : regularity.checks) {
    j["regularity"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  j["statistical_tests"] = nlohmann::json::array();
  for (const TestOutcome& c : checks) {
    nlohmann::json t{{"name", c.name}, {"statistic", c.statistic}, {"pass", c.passed()},
                     {"status", to_string(c.status)}, {"detail", c.detail}};
    if (c.p_value) {
      t["p_value"] = *c.p_value;
    } else {
      t["p_value"] = nullptr;
    }
    j["statistical_tests"].push_back(std::move(t));
  }
  j["series"] = nlohmann::json::array();
  for (const SeriesPoint& p : series) j["series"].push_back({{"t", p.t}, {"cells_per_area", p.cells_per_area}});
  j["notes"] = notes;
  j["passed"] = all_passed();
  return j;
}

std::string StabilityReport::to_text() const {
  std::ostringstream os;
  os << "model: " << model_label << '\n';
  os << "mepa: " << status_name(mepa.status) << ", estimate " << fmt("%.10g", mepa.estimate);
  if (mepa_target) os << ", target " << fmt("%.10g", *mepa_target);
  os << '\n';
  os << "inot residual max: " << fmt("%.3e", inot_residual_max) << " at s = " << fmt("%.6g", inot_worst_s)
     << ", t = " << fmt("%.6g", inot_worst_t) << "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-34s %-13s %-12s %-10s %s\n", "check", "status", "statistic", "p-value",
                "detail");
  os << line;
  for (const RegularityCheck& c : regularity.checks) {
    std::snprintf(line, sizeof line, "  %-32s %-13s %-12s %-10s %s\n", c.name.c_str(), c.pass ? "pass" : "fail", "",
                  "", c.detail.c_str());
    os << line;
  }
  for (const TestOutcome& c : checks) {
    const std::string p = c.p_value ? fmt("%.4g", *c.p_value) : "-";
    std::snprintf(line, sizeof line, "%-34s %-13s %-12s %-10s %s\n", c.name.c_str(), to_string(c.status).c_str(),
                  fmt("%.5g", c.statistic).c_str(), p.c_str(), c.detail.c_str());
    os << line;
  }
  if (!series.empty()) {
    os << "\ncells per area:\n";
    for (const SeriesPoint& p : series) os << "  t = " << fmt("%-8.4g", p.t) << fmt("%.6g", p.cells_per_area) << '\n';
  }
  for (const std::string& n : notes) os << "note: " << n << '\n';
  os << "\nresult: " << (all_passed() ? "PASS" : any_inconclusive() ? "INCONCLUSIVE" : "FAIL") << '\n';
  return os.str();
}

namespace {

TestOutcome failed_check(std::string name, const std::exception& e) {
  TestOutcome t;
  t.name = std::move(name);
  t.status = TestOutcome::Status::kFail;
  t.detail = e.what();
  return t;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

StabilityReport run_verification(const ModelFunctions& m, const ConvexPolygon& window, const AngleLaw& angles,
                                 const VerifySettings& settings) {
  StabilityReport report;
  report.model_label = m.label;
  report.notes.push_back("the checks do not depend on the direction law; this run used " +
                         std::string(angles.kind() == AngleLaw::Kind::kUniform    ? "uniform"
                                     : angles.kind() == AngleLaw::Kind::kDiscrete ? "discrete"
                                                                                  : "fixed") +
                         " directions");
  report.notes.push_back("MEPA is checked at the configured s values only");

  // Regularity.
  {
    TestOutcome t;
    t.name = "regularity";
    try {
      report.regularity = check_regularity(m, settings.regularity_grid);
      const auto failed = std::count_if(report.regularity.checks.begin(), report.regularity.checks.end(),
                                        [](const RegularityCheck& c) { return !c.pass; });
      t.statistic = static_cast<double>(failed);
      t.status = failed ? TestOutcome::Status::kFail : TestOutcome::Status::kPass;
      t.detail = std::to_string(failed) + " of " + std::to_string(report.regularity.checks.size()) + " checks failed";
    } catch (const std::exception& e) {
      t = failed_check("regularity", e);
    }
    report.checks.push_back(std::move(t));
  }

  // MEPA on every configured s.
  const double mepa_horizon = settings.mepa_horizon.value_or(m.params ? 30.0 / m.params->b : 30.0);
  if (m.params) report.mepa_target = m.params->mepa_limit();
  {
    TestOutcome t;
    t.name = "mepa";
    try {
      bool ok = !settings.mepa_s_values.empty();
      for (double s : settings.mepa_s_values) {
        const MepaResult r = mepa_estimate(m, s, mepa_horizon, settings.mepa_rel_tol);
        report.mepa_by_s.push_back(r);
        ok = ok && r.satisfied();
      }
      if (!report.mepa_by_s.empty()) report.mepa = report.mepa_by_s.front();
      if (!report.mepa_target && report.mepa.satisfied()) report.mepa_target = report.mepa.estimate;
      t.statistic = report.mepa.estimate;
      t.detail = status_name(report.mepa.status) + " at horizon " + fmt("%.6g", mepa_horizon);
      if (ok && report.mepa_target) {
        for (const MepaResult& r : report.mepa_by_s) {
          if (std::abs(r.estimate - *report.mepa_target) > settings.mepa_rel_tol * *report.mepa_target) {
            ok = false;
            t.detail += ", estimate differs from the limit " + fmt("%.10g", *report.mepa_target);
            break;
          }
        }
      }
      t.status = ok ? TestOutcome::Status::kPass : TestOutcome::Status::kFail;
    } catch (const std::exception& e) {
      t = failed_check("mepa", e);
    }
    report.checks.push_back(std::move(t));
  }

  // INOT grid.
  {
    TestOutcome t;
    t.name = "inot";
    try {
      const InotGridResult g = inot_grid(m, settings.inot_s_grid, settings.inot_t_grid);
      report.inot_residual_max = g.max_abs_residual;
      report.inot_worst_s = g.worst_s;
      report.inot_worst_t = g.worst_t;
      t.statistic = g.max_abs_residual;
      t.status = g.max_abs_residual < settings.inot_tolerance ? TestOutcome::Status::kPass : TestOutcome::Status::kFail;
      t.detail = std::to_string(g.residuals.size()) + " grid points, tolerance " + fmt("%.3g", settings.inot_tolerance);
    } catch (const std::exception& e) {
      t = failed_check("inot", e);
    }
    report.checks.push_back(std::move(t));
  }

  if (!settings.monte_carlo) return report;

  // Monte Carlo suite. Even replicates observe at s1, odd ones at s2, so the
  // two lifetime groups are independent. Both are censored after the same
  // follow-up time.
  const double s1 = settings.lifetime_s1;
  const double s2 = settings.lifetime_s2;
  const double follow_up = settings.horizon - std::max(s1, s2);
  std::vector<double> series_times = settings.series_times;
  if (series_times.empty()) {
    for (double t = 1; t <= settings.horizon + 1e-12; t += 1) series_times.push_back(t);
  }
  try {
    if (s1 == s2) throw ArgumentError("lifetime observation times must differ");
    if (!(follow_up > 0)) throw ArgumentError("horizon must exceed both lifetime observation times");
    if (series_times.back() > settings.horizon) throw ArgumentError("series times must not exceed the horizon");

    std::array<std::vector<LifetimeRecord>, 2> records;
    std::vector<SelectionRecord> selections;
    CellsPerAreaAccumulator series(m, window, series_times);
    for_each_replicate(m, window, settings.horizon, angles, settings.replicates, settings.seed, settings.threads,
                       [&](std::size_t i, const Tessellation& y) {
                         const double s = i % 2 ? s2 : s1;
                         auto recs = lifetime_records(y, m, s, s + follow_up);
                         auto& group = records[i % 2];
                         group.insert(group.end(), recs.begin(), recs.end());
                         if (selections.size() < settings.selection_events) {
                           auto sel = selection_records(y, settings.selection_events - selections.size());
                           std::move(sel.begin(), sel.end(), std::back_inserter(selections));
                         }
                         series.add(y);
                       });

    double center = 0.0;
    if (settings.band_center) {
      center = *settings.band_center;
    } else {
      std::vector<double> areas;
      for (const auto& group : records) {
        for (const LifetimeRecord& r : group) areas.push_back(r.cell_area_at_birth);
      }
      center = median(std::move(areas));
    }
    if (!(center > 0)) throw ModelError("no cells observed at the lifetime observation times");
    const AreaBand band = band_around(center, settings.band_halfwidth);
    const LifetimeSample first = filter_lifetimes(records[0], band);
    const LifetimeSample second = filter_lifetimes(records[1], band);
    TestOutcome ks = empirical_lifetime_invariance(first, second, settings.ks_alpha, settings.min_lifetimes);
    ks.detail += ", s = " + fmt("%.4g", s1) + " vs " + fmt("%.4g", s2) + ", band [" + fmt("%.4g", band.lo) + ", " +
                 fmt("%.4g", band.hi) + "]";
    report.checks.push_back(std::move(ks));
    for (const LifetimeSample* g : {&first, &second}) {
      if (g->censored_fraction() > settings.censor_warning) {
        report.notes.push_back("censored fraction " + fmt("%.3f", g->censored_fraction()) +
                               " exceeds the warning level; consider a longer horizon");
        break;
      }
    }

    report.checks.push_back(selection_weight_test(selections, splitmix64(settings.seed ^ 0x5e1ec7ULL),
                                                  settings.selection_bins, settings.chi_alpha,
                                                  settings.min_selection_events));

    report.series = series.series();
    TestOutcome ratio;
    ratio.name = "cells per area";
    ratio.statistic = report.series.back().cells_per_area;
    if (!report.mepa_target) {
      ratio.status = TestOutcome::Status::kFail;
      ratio.detail = "no finite limit to compare against";
    } else {
      const double rel = std::abs(ratio.statistic - *report.mepa_target) / *report.mepa_target;
      ratio.status = rel <= settings.ratio_tolerance ? TestOutcome::Status::kPass : TestOutcome::Status::kFail;
      ratio.detail = "t = " + fmt("%.4g", report.series.back().t) + ", relative error " + fmt("%.4f", rel) +
                     " against " + fmt("%.6g", *report.mepa_target);
    }
    report.checks.push_back(std::move(ratio));
  } catch (const std::exception& e) {
    report.checks.push_back(failed_check("monte carlo suite", e));
  }
  return report;
}

}  // namespace sawser
