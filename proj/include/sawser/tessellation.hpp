#pragma once

#include "sawser/geometry.hpp"
#include "sawser/rain.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sawser {

using CellId = std::int64_t;
inline constexpr CellId kNoCell = -1;

struct Cell {
  CellId id = kNoCell;
  ConvexPolygon polygon;
  double birth_time = 0.0;
  std::optional<double> death_time;
  CellId parent = kNoCell;
  std::array<CellId, 2> children{kNoCell, kNoCell};  // {left of chord, right of chord}
  std::int64_t division = -1;                         // index into segments/events once divided

  bool alive() const { return !death_time.has_value(); }
  /// Alive in the state at `time`: born at or before it and not yet divided.
  bool alive_at(double time) const { return birth_time <= time && (!death_time || *death_time > time); }
};

struct Segment {
  Chord chord;
  double time = 0.0;
};

struct DivisionEvent {
  double time = 0.0;
  CellId parent_id = kNoCell;
  CellId child_a_id = kNoCell;
  CellId child_b_id = kNoCell;
  double parent_area_at_division = 0.0;
  Vec2 generating_point;
  double mark = 0.0;
};

/// Cell-division tessellation of a convex window driven by an ordered rain.
///
/// Each drop divides the alive cell containing it along the chord through
/// the drop. Divided cells are kept (with their death time) so that
/// lifetimes can be read back; the division history also serves as a
/// binary space partition for point location.
class Tessellation {
 public:
  explicit Tessellation(ConvexPolygon window);

  const ConvexPolygon& window() const { return window_; }
  std::span<const Cell> cells() const { return cells_; }
  const Cell& cell(CellId id) const { return cells_.at(static_cast<std::size_t>(id)); }
  std::span<const Segment> segments() const { return segments_; }
  std::span<const DivisionEvent> events() const { return events_; }
  double clock() const { return clock_; }
  std::size_t alive_count() const { return alive_count_; }
  std::vector<CellId> alive_ids() const;

  /// Number of drops accepted so far (one per division).
  std::size_t point_count() const { return events_.size(); }

  /// Applies further drops. Throws ArgumentError (leaving the state
  /// untouched) if the drops are unsorted, precede the clock, or fall
  /// outside the window.
  void advance(std::span<const RainPoint> rain);

  /// Alive cell whose closed polygon contains p; ties go to the smallest id.
  /// Descends the division history. Throws ArgumentError outside the window.
  CellId locate_cell(Vec2 p) const;
  /// Same contract by a linear scan over alive cells.
  CellId locate_cell_linear(Vec2 p) const;

  /// The drops that built this tessellation, in order.
  std::vector<RainPoint> rain() const;

  /// State after all drops with fall time <= time.
  Tessellation truncated(double time) const;

  /// Every vertex, chord and generating point multiplied by factor; ids,
  /// times and event order unchanged. Throws ArgumentError for factor <= 0.
  Tessellation scaled(double factor) const;

  nlohmann::json to_json() const;
  static Tessellation from_json(const nlohmann::json& j);

 private:
  void divide(const RainPoint& drop);
  void collect_ties(CellId node, Vec2 p, CellId& best) const;

  ConvexPolygon window_;
  std::vector<Cell> cells_;
  std::vector<Segment> segments_;
  std::vector<DivisionEvent> events_;
  double clock_ = 0.0;
  std::size_t alive_count_ = 1;
};

Tessellation build(const ConvexPolygon& window, std::span<const RainPoint> rain);
Tessellation advance(Tessellation tess, std::span<const RainPoint> more_rain);
CellId locate_cell(const Tessellation& tess, Vec2 p);

/// Sum of alive-cell areas.
double alive_area(const Tessellation& tess);

struct SvgOptions {
  int width_px = 800;
  double stroke = 1.0;  // multiplier on the default stroke of window diameter / 500
  std::optional<double> snapshot_time;
};

/// Window outline plus segments in creation order (only those with
/// time <= snapshot_time when set). Output is deterministic.
std::string render_svg(const Tessellation& tess, const SvgOptions& options = {});

}  // namespace sawser
