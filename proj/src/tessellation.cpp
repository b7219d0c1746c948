#include "sawser/tessellation.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace sawser {

Tessellation::Tessellation(ConvexPolygon window) : window_(std::move(window)) {
  cells_.push_back(Cell{0, window_, 0.0, std::nullopt, kNoCell, {kNoCell, kNoCell}, -1});
}

std::vector<CellId> Tessellation::alive_ids() const {
  std::vector<CellId> out;
  out.reserve(alive_count_);
  for (const Cell& c : cells_) {
    if (c.alive()) out.push_back(c.id);
  }
  return out;
}

void Tessellation::advance(std::span<const RainPoint> rain) {
  double last = clock_;
  bool strict = !events_.empty();
  for (const RainPoint& drop : rain) {
    if (!std::isfinite(drop.tau) || (strict ? !(drop.tau > last) : !(drop.tau >= last))) {
      throw ArgumentError("advance: rain must be sorted by fall time and later than the clock");
    }
    if (!contains(window_, drop.x)) throw ArgumentError("advance: rain point outside the window");
    last = drop.tau;
    strict = false;
  }
  for (const RainPoint& drop : rain) divide(drop);
}

void Tessellation::divide(const RainPoint& drop) {
  const CellId target = locate_cell(drop.x);
  const std::size_t ti = static_cast<std::size_t>(target);
  const ConvexPolygon& poly = cells_[ti].polygon;
  // A drop on an existing segment has probability zero; clip the line
  // anyway so the count identity survives floating-point coincidences.
  const Chord chord =
      interior_depth(poly, drop.x) > kIncidenceEps ? chord_through(poly, drop.x, drop.alpha) : clip_line(poly, drop.x, drop.alpha);
  auto [left, right] = split(poly, chord);
  const double parent_area = polygon_area(poly);

  const CellId a = static_cast<CellId>(cells_.size());
  const CellId b = a + 1;
  const auto division = static_cast<std::int64_t>(events_.size());
  cells_[ti].death_time = drop.tau;
  cells_[ti].children = {a, b};
  cells_[ti].division = division;
  cells_.push_back(Cell{a, std::move(left), drop.tau, std::nullopt, target, {kNoCell, kNoCell}, -1});
  cells_.push_back(Cell{b, std::move(right), drop.tau, std::nullopt, target, {kNoCell, kNoCell}, -1});
  segments_.push_back({chord, drop.tau});
  events_.push_back({drop.tau, target, a, b, parent_area, drop.x, drop.alpha});
  ++alive_count_;
  clock_ = drop.tau;
}

void Tessellation::collect_ties(CellId node, Vec2 p, CellId& best) const {
  const Cell& c = cells_[static_cast<std::size_t>(node)];
  if (c.alive()) {
    if (contains(c.polygon, p) && (best == kNoCell || node < best)) best = node;
    return;
  }
  const Chord& chord = segments_[static_cast<std::size_t>(c.division)].chord;
  const Vec2 axis = chord.p1 - chord.p0;
  const double side = cross(axis, p - chord.p0) / norm(axis);
  if (side >= -kIncidenceEps) collect_ties(c.children[0], p, best);
  if (side <= kIncidenceEps) collect_ties(c.children[1], p, best);
}

CellId Tessellation::locate_cell(Vec2 p) const {
  if (!contains(window_, p)) throw ArgumentError("locate_cell: point outside the window");
  CellId node = 0;
  for (;;) {
    const Cell& c = cells_[static_cast<std::size_t>(node)];
    if (c.alive()) return node;
    const Chord& chord = segments_[static_cast<std::size_t>(c.division)].chord;
    const Vec2 axis = chord.p1 - chord.p0;
    const double side = cross(axis, p - chord.p0) / norm(axis);
    if (side > kIncidenceEps) {
      node = c.children[0];
    } else if (side < -kIncidenceEps) {
      node = c.children[1];
    } else {
      CellId best = kNoCell;
      collect_ties(node, p, best);
      if (best != kNoCell) return best;
      // The point sits on the chord's line but beyond the cell; any child works.
      node = c.children[0];
    }
  }
}

CellId Tessellation::locate_cell_linear(Vec2 p) const {
  if (!contains(window_, p)) throw ArgumentError("locate_cell: point outside the window");
  for (const Cell& c : cells_) {
    if (c.alive() && contains(c.polygon, p)) return c.id;
  }
  throw GeometryError("locate_cell: no alive cell contains the point");
}

std::vector<RainPoint> Tessellation::rain() const {
  std::vector<RainPoint> out;
  out.reserve(events_.size());
  for (const DivisionEvent& e : events_) out.push_back({e.generating_point, e.time, e.mark});
  return out;
}

Tessellation Tessellation::truncated(double time) const {
  std::vector<RainPoint> prefix;
  for (const DivisionEvent& e : events_) {
    if (e.time > time) break;
    prefix.push_back({e.generating_point, e.time, e.mark});
  }
  return build(window_, prefix);
}

Tessellation Tessellation::scaled(double factor) const {
  if (!(factor > 0) || !std::isfinite(factor)) throw ArgumentError("scaled: factor must be positive");
  Tessellation out = *this;
  out.window_ = scale(window_, factor);
  for (Cell& c : out.cells_) c.polygon = scale(c.polygon, factor);
  for (Segment& s : out.segments_) {
    s.chord.p0 = factor * s.chord.p0;
    s.chord.p1 = factor * s.chord.p1;
    s.chord.through = factor * s.chord.through;
  }
  for (DivisionEvent& e : out.events_) {
    e.generating_point = factor * e.generating_point;
    e.parent_area_at_division *= factor * factor;
  }
  return out;
}

namespace {

nlohmann::json point_json(Vec2 p) { return nlohmann::json::array({p.x, p.y}); }

Vec2 point_from(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

nlohmann::json Tessellation::to_json() const {
  nlohmann::json cells = nlohmann::json::array();
  for (const Cell& c : cells_) {
    cells.push_back({{"id", c.id},
                     {"vertices", sawser::to_json(c.polygon)},
                     {"birth", c.birth_time},
                     {"death", c.death_time ? nlohmann::json(*c.death_time) : nlohmann::json(nullptr)},
                     {"parent", c.parent}});
  }
  nlohmann::json segments = nlohmann::json::array();
  for (const Segment& s : segments_) {
    segments.push_back({{"p0", point_json(s.chord.p0)},
                        {"p1", point_json(s.chord.p1)},
                        {"through", point_json(s.chord.through)},
                        {"mark", s.chord.mark},
                        {"time", s.time}});
  }
  nlohmann::json events = nlohmann::json::array();
  for (const DivisionEvent& e : events_) {
    events.push_back({{"time", e.time},
                      {"parent", e.parent_id},
                      {"child_a", e.child_a_id},
                      {"child_b", e.child_b_id},
                      {"parent_area", e.parent_area_at_division},
                      {"point", point_json(e.generating_point)},
                      {"mark", e.mark}});
  }
  return {{"window", sawser::to_json(window_)},
          {"clock", clock_},
          {"cells", std::move(cells)},
          {"segments", std::move(segments)},
          {"events", std::move(events)}};
}

Tessellation Tessellation::from_json(const nlohmann::json& j) {
  try {
    Tessellation out(polygon_from_json(j.at("window")));
    out.cells_.clear();
    for (const auto& jc : j.at("cells")) {
      const auto id = jc.at("id").get<CellId>();
      if (id != static_cast<CellId>(out.cells_.size())) throw ArgumentError("tessellation JSON: cell ids must be 0..n-1");
      std::optional<double> death;
      if (jc.contains("death") && !jc.at("death").is_null()) death = jc.at("death").get<double>();
      out.cells_.push_back(Cell{id, polygon_from_json(jc.at("vertices")), jc.at("birth").get<double>(), death,
                                jc.value("parent", kNoCell), {kNoCell, kNoCell}, -1});
    }
    if (out.cells_.empty()) throw ArgumentError("tessellation JSON: no cells");
    for (const auto& js : j.at("segments")) {
      out.segments_.push_back({Chord{point_from(js.at("p0")), point_from(js.at("p1")),
                                     point_from(js.value("through", js.at("p0"))), js.value("mark", 0.0)},
                               js.at("time").get<double>()});
    }
    for (const auto& je : j.at("events")) {
      DivisionEvent e{je.at("time").get<double>(),   je.at("parent").get<CellId>(),
                      je.at("child_a").get<CellId>(), je.at("child_b").get<CellId>(),
                      je.at("parent_area").get<double>(), point_from(je.at("point")),
                      je.at("mark").get<double>()};
      const auto n = static_cast<CellId>(out.cells_.size());
      if (e.parent_id < 0 || e.parent_id >= n || e.child_a_id < 0 || e.child_a_id >= n || e.child_b_id < 0 ||
          e.child_b_id >= n) {
        throw ArgumentError("tessellation JSON: event refers to an unknown cell");
      }
      Cell& parent = out.cells_[static_cast<std::size_t>(e.parent_id)];
      parent.children = {e.child_a_id, e.child_b_id};
      parent.division = static_cast<std::int64_t>(out.events_.size());
      out.events_.push_back(e);
    }
    if (out.events_.size() != out.segments_.size()) throw ArgumentError("tessellation JSON: segments and events differ");
    out.alive_count_ = 0;
    for (const Cell& c : out.cells_) out.alive_count_ += c.alive() ? 1 : 0;
    out.clock_ = j.value("clock", out.events_.empty() ? 0.0 : out.events_.back().time);
    return out;
  } catch (const nlohmann::json::exception& ex) {
    throw ArgumentError(std::string("tessellation JSON: ") + ex.what());
  }
}

Tessellation build(const ConvexPolygon& window, std::span<const RainPoint> rain) {
  Tessellation tess(window);
  tess.advance(rain);
  return tess;
}

Tessellation advance(Tessellation tess, std::span<const RainPoint> more_rain) {
  tess.advance(more_rain);
  return tess;
}

CellId locate_cell(const Tessellation& tess, Vec2 p) { return tess.locate_cell(p); }

double alive_area(const Tessellation& tess) {
  double acc = 0.0;
  for (const Cell& c : tess.cells()) {
    if (c.alive()) acc += polygon_area(c.polygon);
  }
  return acc;
}

namespace {

std::string fixed(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string render_svg(const Tessellation& tess, const SvgOptions& options) {
  const BoundingBox& box = tess.window().bounds();
  const double diam = tess.window().diameter();
  const double stroke = options.stroke * diam / 500.0;
  const double margin = 2.0 * stroke;
  const double w = box.width() + 2 * margin;
  const double h = box.height() + 2 * margin;
  const int width_px = options.width_px > 0 ? options.width_px : 800;
  const int height_px = static_cast<int>(std::lround(width_px * h / w));

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px << "\" height=\"" << height_px
     << "\" viewBox=\"" << fixed(box.lo.x - margin) << ' ' << fixed(-(box.hi.y + margin)) << ' ' << fixed(w) << ' '
     << fixed(h) << "\">\n";
  // Flip y so the picture uses mathematical orientation.
  os << "<g transform=\"scale(1,-1)\" fill=\"none\" stroke=\"black\" stroke-width=\"" << fixed(stroke)
     << "\" stroke-linecap=\"round\">\n";
  os << "<polygon points=\"";
  const auto v = tess.window().vertices();
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << fixed(v[i].x) << ',' << fixed(v[i].y);
  os << "\"/>\n";
  for (const Segment& s : tess.segments()) {
    if (options.snapshot_time && s.time > *options.snapshot_time) continue;
    os << "<line x1=\"" << fixed(s.chord.p0.x) << "\" y1=\"" << fixed(s.chord.p0.y) << "\" x2=\"" << fixed(s.chord.p1.x)
       << "\" y2=\"" << fixed(s.chord.p1.y) << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace sawser
