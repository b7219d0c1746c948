#pragma once

#include "sawser/geometry.hpp"
#include "sawser/rain.hpp"
#include "sawser/tessellation.hpp"
#include "sawser/transforms.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sawser {

// ---------------------------------------------------------------------------
// Analytic conditions

enum class MepaStatus { kConverged, kDivergesToZero, kDivergesToInfinity };

struct MepaResult {
  MepaStatus status = MepaStatus::kConverged;
  double estimate = 0.0;               // F(horizon)
  std::array<double, 3> samples{};     // F at horizon / 4, / 2, and horizon
  /// Converged to a finite positive limit.
  bool satisfied() const;
};

/// Points per unit area F(t) = (X(psi(s + t)) - X(psi(s))) / xi^2(s + t),
/// sampled at horizon / 4, horizon / 2 and horizon. Converged when the last
/// two samples agree to `rel_tol`.
MepaResult mepa_estimate(const ModelFunctions& m, double s, double horizon, double rel_tol = 1e-4);

/// d/ds of G(s) = (X(psi(s + t)) - X(psi(s))) / xi^2(s) by central
/// difference with h = 1e-5 max(1, |s|). Zero for every (s, t) iff the
/// waiting time to a hit does not depend on when observation starts.
double inot_residual(const ModelFunctions& m, double s, double t);

struct InotGridResult {
  double max_abs_residual = 0.0;
  double worst_s = 0.0;
  double worst_t = 0.0;
  std::vector<std::array<double, 3>> residuals;  // (s, t, residual)
};

InotGridResult inot_grid(const ModelFunctions& m, std::span<const double> s_grid, std::span<const double> t_grid);

/// P(no drop hits a set of area `area_at_s` during [s, s + t]).
double waiting_time_survival(const ModelFunctions& m, double area_at_s, double s, double t);

// ---------------------------------------------------------------------------
// Simulation

/// Y(psi(horizon), W): rain on W x [0, psi(horizon)].
Tessellation simulate_replicate(const ModelFunctions& m, const ConvexPolygon& window, double horizon,
                                const AngleLaw& angles, std::uint64_t seed);

/// Builds replicates 0..count-1 with child_seed(seed, i), `threads` at a
/// time, and hands each to `visit` in index order.
void for_each_replicate(const ModelFunctions& m, const ConvexPolygon& window, double horizon, const AngleLaw& angles,
                        std::size_t count, std::uint64_t seed, unsigned threads,
                        const std::function<void(std::size_t, const Tessellation&)>& visit);

// ---------------------------------------------------------------------------
// Statistics

struct TestOutcome {
  enum class Status { kPass, kFail, kInconclusive };

  std::string name;
  double statistic = 0.0;
  std::optional<double> p_value;  // statistical tests only
  Status status = Status::kInconclusive;
  std::string detail;

  bool passed() const { return status == Status::kPass; }
};

std::string to_string(TestOutcome::Status s);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test, asymptotic p-value with the
/// effective-size correction (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) D.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function Q(x) = 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_q(double x);

/// One-sample sup distance between the empirical survival of `samples`
/// and `survival`.
double sup_distance_to_survival(std::vector<double> samples, const std::function<double(double)>& survival);

struct LifetimeRecord {
  double cell_area_at_birth = 0.0;  // Z-area at the observation time
  double observation_time = 0.0;
  double observed_lifetime = 0.0;
  bool censored = false;
};

/// Cells of Z(s) = xi(s) Y(psi(s)) with their remaining lifetime in Z-time.
/// `horizon` is the Z-time the replicate was simulated to; cells still
/// alive there are censored with lifetime horizon - s.
std::vector<LifetimeRecord> lifetime_records(const Tessellation& y, const ModelFunctions& m, double s,
                                             double horizon);

struct AreaBand {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double area) const { return area >= lo && area <= hi; }
};

/// [(1 - halfwidth) L, (1 + halfwidth) L].
AreaBand band_around(double center, double halfwidth = 0.1);

struct LifetimeSample {
  std::vector<double> lifetimes;  // uncensored, Z-area inside the band
  std::size_t censored = 0;       // inside the band but censored
  double censored_fraction() const;
};

LifetimeSample filter_lifetimes(std::span<const LifetimeRecord> records, const AreaBand& band);

/// KS comparison of lifetimes observed at two times. Fewer than
/// `min_samples` uncensored lifetimes in either group is inconclusive.
TestOutcome empirical_lifetime_invariance(const LifetimeSample& first, const LifetimeSample& second,
                                          double alpha = 0.01, std::size_t min_samples = 100);

/// Alive cells at one division and which of them was divided.
struct SelectionRecord {
  std::vector<double> areas;
  std::size_t selected = 0;
};

/// One record per division event, in order; at most `limit` records.
std::vector<SelectionRecord> selection_records(const Tessellation& y, std::size_t limit = SIZE_MAX);

/// Negative control: same cell configurations, division target drawn
/// uniformly over cells regardless of area.
std::vector<SelectionRecord> uniform_selection_control(std::vector<SelectionRecord> records, std::uint64_t seed);

/// Area-weighted selection test. Cells are ordered by area, the selected
/// cell maps to a randomized position U in its slice of the cumulative area
/// fraction, and U is binned into `bins` equal classes; under area weighting
/// U is uniform and the Pearson statistic is chi-square with bins - 1 dof.
TestOutcome selection_weight_test(std::span<const SelectionRecord> records, std::uint64_t seed,
                                  std::size_t bins = 10, double alpha = 0.01, std::size_t min_events = 1000);

struct SeriesPoint {
  double t = 0.0;
  double cells_per_area = 0.0;
};

/// Mean alive-cell count of Z(t) divided by the window area xi^2(t) |W|.
std::vector<SeriesPoint> cells_per_area_series(const ModelFunctions& m, const ConvexPolygon& window,
                                               std::span<const double> times, std::size_t replicates,
                                               std::uint64_t seed, unsigned threads = 1);

/// Accumulates cells_per_area_series one replicate at a time.
class CellsPerAreaAccumulator {
 public:
  CellsPerAreaAccumulator(const ModelFunctions& m, const ConvexPolygon& window, std::vector<double> times);
  void add(const Tessellation& y);
  std::vector<SeriesPoint> series() const;

 private:
  const ModelFunctions& model_;
  double window_area_;
  std::vector<double> times_;
  std::vector<double> psi_times_;
  std::vector<double> sums_;
  std::size_t count_ = 0;
};

// ---------------------------------------------------------------------------
// Verification driver

struct VerifySettings {
  // Analytic checks.
  std::vector<double> regularity_grid;
  std::vector<double> inot_s_grid;
  std::vector<double> inot_t_grid;
  double inot_tolerance = 1e-6;
  std::vector<double> mepa_s_values{0.0};
  std::optional<double> mepa_horizon;  // default: 30 / b when b is known, else 30
  double mepa_rel_tol = 1e-4;

  // Monte Carlo.
  bool monte_carlo = true;
  std::size_t replicates = 500;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double horizon = 7.0;  // Z-time each replicate is simulated to
  double lifetime_s1 = 1.0;
  double lifetime_s2 = 2.0;
  std::optional<double> band_center;  // default: median Z-area of the observed cells
  double band_halfwidth = 0.1;
  std::size_t min_lifetimes = 100;
  double ks_alpha = 0.01;
  std::size_t selection_bins = 10;
  std::size_t selection_events = 10000;
  std::size_t min_selection_events = 1000;
  double chi_alpha = 0.01;
  std::vector<double> series_times;  // default: 1 .. horizon
  double ratio_tolerance = 0.1;
  double censor_warning = 0.2;
};

/// Fills empty grids from `horizon` (101-point default grid, 20 x 20 INOT
/// grid on [horizon / 1000, horizon]).
VerifySettings with_default_grids(VerifySettings settings, double grid_horizon, std::size_t grid_points = 101);

struct StabilityReport {
  std::string model_label;
  MepaResult mepa;                   // at the first configured s
  std::vector<MepaResult> mepa_by_s;
  std::optional<double> mepa_target;
  double inot_residual_max = 0.0;
  double inot_worst_s = 0.0;
  double inot_worst_t = 0.0;
  RegularityReport regularity;
  std::vector<TestOutcome> checks;  // analytic checks and statistical tests, in run order
  std::vector<SeriesPoint> series;
  std::vector<std::string> notes;

  bool all_passed() const;
  bool any_inconclusive() const;
  nlohmann::json to_json() const;
  std::string to_text() const;
};

StabilityReport run_verification(const ModelFunctions& m, const ConvexPolygon& window, const AngleLaw& angles,
                                 const VerifySettings& settings);

}  // namespace sawser
