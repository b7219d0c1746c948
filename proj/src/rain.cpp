#include "sawser/rain.hpp"

#include "sawser/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace sawser {

IntensityProfile constant_profile(double rate) {
  if (!(rate >= 0)) throw ArgumentError("constant_profile: rate must be nonnegative");
  IntensityProfile p;
  p.chi = [rate](double) { return rate; };
  p.cumulative = [rate](double t) { return rate * t; };
  if (rate > 0) p.inverse_cumulative = [rate](double m) { return m / rate; };
  p.rate_bound = rate;
  p.description = "chi(u) = " + format_double17(rate);
  return p;
}

IntensityProfile exponential_profile(double a, double b) {
  if (!(a > 0) || !(b > 0)) throw ArgumentError("exponential_profile: a and b must be positive");
  IntensityProfile p;
  p.chi = [a, b](double u) { return a * b * std::exp(b * u); };
  p.cumulative = [a, b](double t) { return a * std::expm1(b * t); };
  p.inverse_cumulative = [a, b](double m) { return std::log1p(m / a) / b; };
  p.description = "chi(u) = a b exp(b u), a = " + format_double17(a) + ", b = " + format_double17(b);
  return p;
}

IntensityProfile linear_profile() {
  IntensityProfile p;
  p.chi = [](double u) { return u; };
  p.cumulative = [](double t) { return 0.5 * t * t; };
  p.inverse_cumulative = [](double m) { return std::sqrt(2.0 * m); };
  p.description = "chi(u) = u";
  return p;
}

IntensityProfile numeric_profile(ScalarFn chi, std::string description, std::optional<double> rate_bound) {
  IntensityProfile p;
  p.chi = std::move(chi);
  p.rate_bound = rate_bound;
  p.description = std::move(description);
  return p;
}

AngleLaw AngleLaw::uniform() { return AngleLaw(Kind::kUniform, {}, {}); }

AngleLaw AngleLaw::fixed(double angle) {
  if (!(angle >= 0) || !(angle < std::numbers::pi)) throw ArgumentError("AngleLaw::fixed: angle must lie in [0, pi)");
  return AngleLaw(Kind::kFixed, {angle}, {1.0});
}

AngleLaw AngleLaw::discrete(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size()) {
    throw ArgumentError("AngleLaw::discrete: need matching nonempty atoms and weights");
  }
  for (double a : atoms) {
    if (!(a >= 0) || !(a < std::numbers::pi)) throw ArgumentError("AngleLaw::discrete: atom outside [0, pi)");
  }
  for (double w : weights) {
    if (!(w >= 0)) throw ArgumentError("AngleLaw::discrete: negative weight");
  }
  if (std::abs(std::accumulate(weights.begin(), weights.end(), 0.0) - 1.0) > 1e-12) {
    throw ArgumentError("AngleLaw::discrete: weights must sum to 1");
  }
  return AngleLaw(Kind::kDiscrete, std::move(atoms), std::move(weights));
}

double AngleLaw::draw(double u) const {
  switch (kind_) {
    case Kind::kUniform:
      return std::numbers::pi * u;
    case Kind::kFixed:
      return atoms_.front();
    case Kind::kDiscrete: {
      double acc = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        acc += weights_[i];
        if (u < acc) return atoms_[i];
      }
      return atoms_.back();
    }
  }
  return 0.0;
}

double integrated_intensity(const IntensityProfile& profile, double t0, double t1) {
  if (!(t0 >= 0) || !(t1 >= t0)) throw ArgumentError("integrated_intensity: need 0 <= t0 <= t1");
  if (t0 == t1) return 0.0;
  if (profile.has_cumulative()) return std::max(0.0, profile.cumulative(t1) - profile.cumulative(t0));
  return integrate(profile.chi, t0, t1);
}

double expected_count(const IntensityProfile& profile, double region_area, double t0, double t1) {
  if (!(region_area >= 0)) throw ArgumentError("expected_count: area must be nonnegative");
  return region_area * integrated_intensity(profile, t0, t1);
}

namespace {

Vec2 uniform_in(const ConvexPolygon& region, Rng& rng) {
  const BoundingBox& box = region.bounds();
  for (;;) {
    const Vec2 p{rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y)};
    if (contains(region, p, 0.0)) return p;
  }
}

// Fall time with density chi / mass on [t0, t1], from u in [0, 1), for a
// profile with a closed-form cumulative.
double invert_fall_time(const IntensityProfile& profile, double t0, double t1, double mass, double u) {
  const double target = profile.cumulative(t0) + u * mass;
  if (profile.inverse_cumulative) return std::clamp(profile.inverse_cumulative(target), t0, t1);
  auto root = bisect_root([&](double t) { return profile.cumulative(t) - target; }, t0, t1, 1e-12);
  return root.value_or(t1);
}

// Cumulative mass tabulated by quadrature on equal cells; fall times are
// solved inside one cell with Newton steps guarded by bisection.
class NumericCumulative {
 public:
  NumericCumulative(const IntensityProfile& profile, double t0, double t1) : profile_(profile) {
    constexpr std::size_t kCells = 64;
    knots_ = linear_grid(t0, t1, kCells + 1);
    mass_.assign(knots_.size(), 0.0);
    for (std::size_t k = 1; k < knots_.size(); ++k) {
      mass_[k] = mass_[k - 1] + integrate(profile.chi, knots_[k - 1], knots_[k]);
    }
  }

  double total() const { return mass_.back(); }

  double invert(double target) const {
    auto it = std::upper_bound(mass_.begin(), mass_.end(), target);
    std::size_t k = it == mass_.begin() ? 0 : static_cast<std::size_t>(it - mass_.begin()) - 1;
    k = std::min(k, knots_.size() - 2);
    const double lo = knots_[k];
    const double hi = knots_[k + 1];
    const double base = mass_[k];
    auto f = [&](double t) { return t <= lo ? base : base + integrate(profile_.chi, lo, std::min(t, hi)); };
    auto root = solve_increasing(f, profile_.chi, target, lo, hi, 0);
    return std::clamp(root.value_or(hi), lo, hi);
  }

 private:
  const IntensityProfile& profile_;
  std::vector<double> knots_;
  std::vector<double> mass_;
};

}  // namespace

std::vector<RainPoint> sample_rain(const IntensityProfile& profile, const ConvexPolygon& region, double t0,
                                   double t1, const AngleLaw& angles, std::uint64_t seed, SamplingMethod method) {
  if (!(t0 >= 0) || !(t1 >= t0)) throw ArgumentError("sample_rain: need 0 <= t0 <= t1");
  if (method == SamplingMethod::kAuto) {
    if (profile.has_cumulative() || !profile.rate_bound) {
      method = SamplingMethod::kInversion;
    } else {
      method = SamplingMethod::kThinning;
    }
  }
  const double area = polygon_area(region);
  Rng rng(seed);
  std::vector<RainPoint> out;

  if (method == SamplingMethod::kInversion) {
    if (t1 == t0) return out;
    std::optional<NumericCumulative> table;
    if (!profile.has_cumulative()) table.emplace(profile, t0, t1);
    const double mass = table ? table->total() : integrated_intensity(profile, t0, t1);
    if (!(mass > 0)) return out;
    const std::uint64_t count = rng.poisson(area * mass);
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      RainPoint p;
      const double u = rng.uniform();
      p.tau = table ? table->invert(u * mass) : invert_fall_time(profile, t0, t1, mass, u);
      p.x = uniform_in(region, rng);
      p.alpha = angles.draw(rng.uniform());
      out.push_back(p);
    }
  } else {
    if (!profile.rate_bound) throw ArgumentError("sample_rain: thinning needs a rate bound");
    const double bound = *profile.rate_bound;
    if (!(bound > 0) || t1 == t0) return out;
    const std::uint64_t count = rng.poisson(area * bound * (t1 - t0));
    for (std::uint64_t i = 0; i < count; ++i) {
      const double tau = rng.uniform(t0, t1);
      const double keep = rng.uniform();
      const Vec2 x = uniform_in(region, rng);
      const double alpha = angles.draw(rng.uniform());
      const double rate = profile.chi(tau);
      if (rate > bound * (1 + 1e-12)) throw ModelError("sample_rain: intensity exceeds its declared bound");
      if (keep * bound < rate) out.push_back({x, tau, alpha});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const RainPoint& a, const RainPoint& b) { return a.tau < b.tau; });
  return out;
}

std::string rain_to_json(std::span<const RainPoint> points) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < points.size(); ++i) {
    const RainPoint& p = points[i];
    if (i) os << ',';
    os << "{\"x\":[" << format_double17(p.x.x) << ',' << format_double17(p.x.y)
       << "],\"tau\":" << format_double17(p.tau) << ",\"alpha\":" << format_double17(p.alpha) << '}';
  }
  os << ']';
  return os.str();
}

std::string rain_to_csv(std::span<const RainPoint> points) {
  std::ostringstream os;
  os << "x,y,tau,alpha\n";
  for (const RainPoint& p : points) {
    os << format_double17(p.x.x) << ',' << format_double17(p.x.y) << ',' << format_double17(p.tau) << ','
       << format_double17(p.alpha) << '\n';
  }
  return os.str();
}

std::vector<RainPoint> rain_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ArgumentError("rain JSON must be an array");
  std::vector<RainPoint> out;
  out.reserve(j.size());
  for (const auto& item : j) {
    const auto& x = item.at("x");
    out.push_back({{x.at(0).get<double>(), x.at(1).get<double>()}, item.at("tau").get<double>(),
                   item.at("alpha").get<double>()});
  }
  return out;
}

}  // namespace sawser
