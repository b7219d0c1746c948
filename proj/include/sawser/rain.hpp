#pragma once

#include "sawser/geometry.hpp"
#include "sawser/numeric.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sawser {

/// One drop of the marked space-time Poisson rain.
struct RainPoint {
  Vec2 x;
  double tau = 0.0;    // fall time
  double alpha = 0.0;  // mark in [0, pi); the dividing line is orthogonal to it

  friend bool operator==(const RainPoint&, const RainPoint&) = default;
};

/// Temporal rain intensity chi(u) (points per unit area per unit time).
///
/// The optional members are closed forms. When `cumulative` is empty the
/// cumulative mass is integrated numerically; when `inverse_cumulative` is
/// empty fall times are found by bisection on the cumulative mass.
/// `rate_bound`, if set, is an upper bound on chi used for thinning.
struct IntensityProfile {
  ScalarFn chi;
  ScalarFn cumulative;          // X(t) with X(0) = 0
  ScalarFn inverse_cumulative;  // X^{-1}(m)
  std::optional<double> rate_bound;
  std::string description;

  bool has_cumulative() const { return static_cast<bool>(cumulative); }
};

IntensityProfile constant_profile(double rate);
/// chi(u) = a b e^{b u}, X(t) = a (e^{b t} - 1).
IntensityProfile exponential_profile(double a, double b);
/// chi(u) = u, X(t) = t^2 / 2.
IntensityProfile linear_profile();
/// Closure without closed forms; everything goes through quadrature.
IntensityProfile numeric_profile(ScalarFn chi, std::string description,
                                 std::optional<double> rate_bound = std::nullopt);

/// Law of the angle mark on [0, pi).
class AngleLaw {
 public:
  enum class Kind { kUniform, kDiscrete, kFixed };

  static AngleLaw uniform();
  static AngleLaw fixed(double angle);
  /// Throws ArgumentError unless atoms lie in [0, pi) and weights are
  /// nonnegative and sum to 1 (within 1e-12).
  static AngleLaw discrete(std::vector<double> atoms, std::vector<double> weights);

  Kind kind() const { return kind_; }
  std::span<const double> atoms() const { return atoms_; }
  std::span<const double> weights() const { return weights_; }

  /// Draws from a uniform variate u in [0, 1).
  double draw(double u) const;

 private:
  AngleLaw(Kind kind, std::vector<double> atoms, std::vector<double> weights)
      : kind_(kind), atoms_(std::move(atoms)), weights_(std::move(weights)) {}

  Kind kind_;
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

/// X(t1) - X(t0). Throws ArgumentError unless 0 <= t0 <= t1.
double integrated_intensity(const IntensityProfile& profile, double t0, double t1);

/// region_area * (X(t1) - X(t0)).
double expected_count(const IntensityProfile& profile, double region_area, double t0, double t1);

enum class SamplingMethod {
  kAuto,       // inversion with a closed-form X, else thinning if bounded, else numeric inversion
  kInversion,  // invert X (closed form or bisection to 1e-12)
  kThinning,   // Lewis thinning against profile.rate_bound
};

/// Rain on region x [t0, t1], sorted by fall time (ties keep draw order).
/// Identical arguments give bitwise identical output.
std::vector<RainPoint> sample_rain(const IntensityProfile& profile, const ConvexPolygon& region,
                                   double t0, double t1, const AngleLaw& angles,
                                   std::uint64_t seed, SamplingMethod method = SamplingMethod::kAuto);

/// JSON array of {"x": [fx, fy], "tau": ..., "alpha": ...}, floats at 17
/// significant digits.
std::string rain_to_json(std::span<const RainPoint> points);
/// CSV with header `x,y,tau,alpha`.
std::string rain_to_csv(std::span<const RainPoint> points);
std::vector<RainPoint> rain_from_json(const nlohmann::json& j);

}  // namespace sawser
