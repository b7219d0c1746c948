#include "sawser/cli.hpp"

#include "sawser/expression.hpp"
#include "sawser/random.hpp"

#define TOML_HEADER_ONLY 1
#include <toml.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace sawser {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [key, value] : *t) out[std::string(key.str())] = toml_to_json(value);
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& value : *a) out.push_back(toml_to_json(value));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw ConfigError("unsupported TOML value (dates and times are not accepted)");
}

void check_keys(const json& table, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!table.is_object()) throw ConfigError(where + " must be a table");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : table.items()) {
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& table, const char* key, double fallback) {
  if (!table.contains(key)) return fallback;
  const json& v = table.at(key);
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t count(const json& table, const char* key, std::uint64_t fallback) {
  if (!table.contains(key)) return fallback;
  const json& v = table.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(std::string("'") + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

bool flag(const json& table, const char* key, bool fallback) {
  if (!table.contains(key)) return fallback;
  if (!table.at(key).is_boolean()) throw ConfigError(std::string("'") + key + "' must be true or false");
  return table.at(key).get<bool>();
}

std::optional<std::string> text(const json& table, const char* key) {
  if (!table.contains(key)) return std::nullopt;
  if (!table.at(key).is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
  return table.at(key).get<std::string>();
}

std::vector<double> numbers(const json& table, const char* key) {
  std::vector<double> out;
  if (!table.contains(key)) return out;
  const json& v = table.at(key);
  if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be an array of numbers");
  for (const json& x : v) {
    if (!x.is_number()) throw ConfigError(std::string("'") + key + "' must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

json table_or_empty(const json& root, const char* key) { return root.contains(key) ? root.at(key) : json::object(); }

AngleLaw build_angles(const json& t) {
  check_keys(t, "[angles]", {"law", "angle", "atoms", "weights"});
  const std::string law = text(t, "law").value_or("uniform");
  if (law == "uniform") return AngleLaw::uniform();
  if (law == "fixed") {
    if (!t.contains("angle")) throw ConfigError("law \"fixed\" needs an angle");
    return AngleLaw::fixed(number(t, "angle", 0.0));
  }
  if (law == "discrete") return AngleLaw::discrete(numbers(t, "atoms"), numbers(t, "weights"));
  throw ConfigError("unknown angle law '" + law + "' (uniform, fixed or discrete)");
}

ModelFunctions build_model(const json& t, double grid_horizon, std::size_t grid_points) {
  check_keys(t, "[model]", {"case", "a", "b", "s0", "psi", "chi", "xi_squared", "xi_perturbation"});
  const std::string kind = text(t, "case").value_or("A");
  SawserParams p{number(t, "a", 1.0), number(t, "b", 1.0), number(t, "s0", 0.0)};
  const std::map<std::string, double> constants{{"a", p.a}, {"b", p.b}, {"s0", p.s0}};
  auto expr = [&](const char* key) -> std::optional<Expression> {
    auto s = text(t, key);
    if (!s) return std::nullopt;
    return Expression::parse(*s, constants);
  };

  ModelFunctions m;
  if (kind == "A") {
    m = case_a(p);
  } else if (kind == "B") {
    m = case_b(p);
  } else if (kind == "custom") {
    auto psi = expr("psi");
    if (!psi) throw ConfigError("case \"custom\" needs a psi expression");
    m = custom_model(p, *psi, default_grid(grid_horizon, grid_points), expr("chi"), expr("xi_squared"));
  } else if (kind == "identity") {
    auto chi = expr("chi");
    if (!chi) {
      m = untransformed(constant_profile(1.0));
    } else {
      m = untransformed(numeric_profile([e = *chi](double u) { return e(u); }, "chi(u) = " + chi->to_string()));
    }
  } else if (kind == "frozen") {
    m = frozen_time(p.a);
  } else {
    throw ConfigError("unknown model case '" + kind + "' (expected A, B, custom, identity or frozen)");
  }
  if (kind != "custom" && (t.contains("psi") || t.contains("xi_squared"))) {
    throw ConfigError("psi and xi_squared are only accepted for case \"custom\"");
  }
  if (kind != "custom" && kind != "identity" && t.contains("chi")) {
    throw ConfigError("chi is only accepted for cases \"custom\" and \"identity\"");
  }
  const double amplitude = number(t, "xi_perturbation", 0.0);
  if (amplitude != 0.0) {
    if (!(std::abs(amplitude) < 1)) throw ConfigError("xi_perturbation must lie in (-1, 1)");
    m = perturb_xi_squared(std::move(m), amplitude);
  }
  return m;
}

ConvexPolygon build_window(const json& t) {
  check_keys(t, "[window]", {"shape", "side", "width", "height", "sides", "radius", "vertices"});
  const std::string shape = text(t, "shape").value_or("unit-square");
  if (shape == "unit-square") return unit_square();
  if (shape == "square") return square(number(t, "side", 1.0));
  if (shape == "rectangle") return rectangle(number(t, "width", 1.0), number(t, "height", 1.0));
  if (shape == "ngon") return regular_ngon(count(t, "sides", 64), number(t, "radius", 1.0));
  if (shape == "vertices") {
    if (!t.contains("vertices")) throw ConfigError("shape \"vertices\" needs a vertices array");
    return polygon_from_json(t.at("vertices"));
  }
  throw ConfigError("unknown window shape '" + shape + "' (expected unit-square, square, rectangle, ngon or vertices)");
}

void read_verify(const json& t, VerifySettings& v) {
  check_keys(t, "[verify]",
             {"monte_carlo", "lifetime_s1", "lifetime_s2", "band_center", "band_halfwidth", "min_lifetimes",
              "ks_alpha", "selection_bins", "selection_events", "min_selection_events", "chi_alpha", "ratio_tolerance",
              "censor_warning", "inot_tolerance", "mepa_horizon", "mepa_rel_tol", "mepa_s", "series_times"});
  v.monte_carlo = flag(t, "monte_carlo", v.monte_carlo);
  v.lifetime_s1 = number(t, "lifetime_s1", v.lifetime_s1);
  v.lifetime_s2 = number(t, "lifetime_s2", v.lifetime_s2);
  if (t.contains("band_center")) v.band_center = number(t, "band_center", 1.0);
  v.band_halfwidth = number(t, "band_halfwidth", v.band_halfwidth);
  v.min_lifetimes = count(t, "min_lifetimes", v.min_lifetimes);
  v.ks_alpha = number(t, "ks_alpha", v.ks_alpha);
  v.selection_bins = count(t, "selection_bins", v.selection_bins);
  v.selection_events = count(t, "selection_events", v.selection_events);
  v.min_selection_events = count(t, "min_selection_events", v.min_selection_events);
  v.chi_alpha = number(t, "chi_alpha", v.chi_alpha);
  v.ratio_tolerance = number(t, "ratio_tolerance", v.ratio_tolerance);
  v.censor_warning = number(t, "censor_warning", v.censor_warning);
  v.inot_tolerance = number(t, "inot_tolerance", v.inot_tolerance);
  if (t.contains("mepa_horizon")) v.mepa_horizon = number(t, "mepa_horizon", 30.0);
  v.mepa_rel_tol = number(t, "mepa_rel_tol", v.mepa_rel_tol);
  if (t.contains("mepa_s")) v.mepa_s_values = numbers(t, "mepa_s");
  v.series_times = numbers(t, "series_times");

  if (v.lifetime_s1 == v.lifetime_s2) throw ConfigError("lifetime_s1 and lifetime_s2 must differ");
  if (v.selection_bins < 2) throw ConfigError("selection_bins must be at least 2");
  if (!(v.band_halfwidth > 0 && v.band_halfwidth < 1)) throw ConfigError("band_halfwidth must lie in (0, 1)");
  if (v.band_center && !(*v.band_center > 0)) throw ConfigError("band_center must be positive");
  if (v.mepa_horizon && !(*v.mepa_horizon > 0)) throw ConfigError("mepa_horizon must be positive");
  if (!std::is_sorted(v.series_times.begin(), v.series_times.end())) throw ConfigError("series_times must increase");
}

std::string snapshot_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%02zu.svg", index);
  return buf;
}

std::string replicate_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "replicate_%04zu.json", index);
  return buf;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << content;
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> default_snapshots(double horizon) { return geometric_grid(horizon / 8, horizon, 4); }

RunConfig parse_config(const std::string& text_bytes, bool is_json, const std::string& source_name) {
  json root;
  try {
    if (is_json) {
      root = json::parse(text_bytes);
    } else {
      root = toml_to_json(toml::parse(text_bytes, source_name));
    }
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source_name << ": " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(os.str());
  } catch (const json::exception& e) {
    throw ConfigError(source_name + ": " + e.what());
  }

  RunConfig c;
  c.source_name = source_name;
  c.config_hash = fnv1a_hex(text_bytes);
  try {
    check_keys(root, "the top level",
               {"horizon", "replicates", "seed", "threads", "snapshots", "model", "window", "angles", "outputs", "grid",
                "verify"});
    if (!root.contains("horizon")) throw ConfigError("horizon is required");
    c.horizon = number(root, "horizon", 0.0);
    if (!(c.horizon > 0) || !std::isfinite(c.horizon)) throw ConfigError("horizon must be positive");
    c.replicates = count(root, "replicates", 1);
    if (c.replicates < 1) throw ConfigError("replicates must be at least 1");
    c.seed = count(root, "seed", 0);
    c.threads = static_cast<unsigned>(count(root, "threads", 1));
    if (c.threads < 1) throw ConfigError("threads must be at least 1");

    const json grid = table_or_empty(root, "grid");
    check_keys(grid, "[grid]", {"points", "horizon"});
    c.grid_points = count(grid, "points", 101);
    c.grid_horizon = number(grid, "horizon", c.horizon);
    if (c.grid_points < 2) throw ConfigError("grid points must be at least 2");
    if (!(c.grid_horizon > 0)) throw ConfigError("grid horizon must be positive");

    c.model = build_model(table_or_empty(root, "model"), c.grid_horizon, c.grid_points);
    c.window = build_window(table_or_empty(root, "window"));
    c.angles = build_angles(table_or_empty(root, "angles"));

    c.snapshots = root.contains("snapshots") ? numbers(root, "snapshots") : default_snapshots(c.horizon);
    for (double t : c.snapshots) {
      if (!(t >= 0) || t > c.horizon) throw ConfigError("snapshot times must lie in [0, horizon]");
    }

    const json outputs = table_or_empty(root, "outputs");
    check_keys(outputs, "[outputs]", {"json", "csv", "svg", "report", "tessellations"});
    c.outputs.json = flag(outputs, "json", true);
    c.outputs.csv = flag(outputs, "csv", true);
    c.outputs.svg = flag(outputs, "svg", true);
    c.outputs.report = flag(outputs, "report", true);
    c.outputs.tessellations = count(outputs, "tessellations", 1);

    read_verify(table_or_empty(root, "verify"), c.verify);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
  apply_overrides(c, std::nullopt, std::nullopt);
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return parse_config(os.str(), path.extension() == ".json", path.filename().string());
}

void apply_overrides(RunConfig& c, std::optional<std::uint64_t> seed, std::optional<unsigned> threads) {
  if (seed) c.seed = *seed;
  if (threads) {
    if (*threads < 1) throw ConfigError("threads must be at least 1");
    c.threads = *threads;
  }
  c.verify = with_default_grids(std::move(c.verify), c.grid_horizon, c.grid_points);
  c.verify.replicates = c.replicates;
  c.verify.seed = c.seed;
  c.verify.threads = c.threads;
  c.verify.horizon = c.horizon;
}

std::size_t run_simulate(const RunConfig& c, const fs::path& out) {
  fs::create_directories(out);
  std::size_t files = 0;
  std::ostringstream events;
  events << "replicate,event,time,parent,child_a,child_b,parent_area,x,y,mark\n";
  json manifest;
  manifest["config"] = c.source_name;
  manifest["config_hash"] = c.config_hash;
  manifest["seed"] = c.seed;
  manifest["replicates"] = c.replicates;
  manifest["horizon"] = c.horizon;
  manifest["model"] = c.model.label;
  manifest["window"] = to_json(c.window);
  manifest["point_counts"] = json::array();
  manifest["files"] = json::array();

  for_each_replicate(c.model, c.window, c.horizon, c.angles, c.replicates, c.seed, c.threads,
                     [&](std::size_t i, const Tessellation& y) {
                       log_message(LogLevel::kDebug, "replicate " + std::to_string(i) + ": " +
                                                         std::to_string(y.point_count()) + " points");
                       manifest["point_counts"].push_back(y.point_count());
                       if (c.outputs.json && i < c.outputs.tessellations) {
                         write_file(out / replicate_name(i), y.to_json().dump() + "\n");
                         manifest["files"].push_back(replicate_name(i));
                         ++files;
                       }
                       if (c.outputs.svg && i == 0) {
                         for (std::size_t k = 0; k < c.snapshots.size(); ++k) {
                           const Tessellation z = transform_tessellation(y, c.model, c.snapshots[k]);
                           write_file(out / snapshot_name(k), render_svg(z));
                           manifest["files"].push_back(snapshot_name(k));
                           ++files;
                         }
                       }
                       if (c.outputs.csv) {
                         std::size_t k = 0;
                         for (const DivisionEvent& e : y.events()) {
                           events << i << ',' << k++ << ',' << format_double17(e.time) << ',' << e.parent_id << ','
                                  << e.child_a_id << ',' << e.child_b_id << ','
                                  << format_double17(e.parent_area_at_division) << ','
                                  << format_double17(e.generating_point.x) << ','
                                  << format_double17(e.generating_point.y) << ',' << format_double17(e.mark) << '\n';
                         }
                       }
                     });
  if (c.outputs.svg) {
    manifest["snapshots"] = c.snapshots;
  }
  if (c.outputs.csv) {
    write_file(out / "events.csv", events.str());
    manifest["files"].push_back("events.csv");
    ++files;
  }
  manifest["files"].push_back("manifest.json");
  write_file(out / "manifest.json", manifest.dump(2) + "\n");
  return files + 1;
}

StabilityReport run_verify(const RunConfig& c) { return run_verification(c.model, c.window, c.angles, c.verify); }

void run_render(const fs::path& input, const fs::path& output, const SvgOptions& options) {
  std::ifstream is(input, std::ios::binary);
  if (!is) throw ArgumentError("cannot read " + input.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ArgumentError(input.string() + ": " + e.what());
  }
  const Tessellation t = Tessellation::from_json(j);
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  write_file(output, render_svg(t, options));
}

std::string translate_text(const RunConfig& c) {
  const ModelFunctions& a = c.model;
  const ModelFunctions d = gar_to_gdr(a);
  std::ostringstream os;
  os << "model: " << a.label << "\n\n";
  if (a.params) {
    const double ap = a.params->a;
    const double b = a.params->b;
    const double s0 = a.params->s0;
    const std::string k = format_double17(std::exp(b * s0));
    const std::string lab = a.label.substr(0, 6);
    if (lab == "Case A") {
      os << "GAR: chi(t) = 1, xi^2(t) = exp(-b s0) exp(b t), psi(t) = a exp(b t)\n";
      os << "GDR: chi(t) = a exp(b s0) / t, xi^2(t) = exp(-b s0) t / a, psi(t) = a exp(b t)\n";
      os << "     with a = " << format_double17(ap) << ", b = " << format_double17(b) << ", exp(b s0) = " << k
         << "\n\n";
    } else if (lab == "Case B") {
      os << "GAR: chi(t) = a b exp(b t), xi^2(t) = exp(-b s0) exp(b t), psi(t) = t 1[0,inf)(t)\n";
      os << "GDR: chi(t) = a b exp(b s0), xi^2(t) = exp(-b s0) exp(b t), psi(t) = t 1[0,inf)(t)\n";
      os << "     with a = " << format_double17(ap) << ", b = " << format_double17(b) << ", exp(b s0) = " << k
         << "\n\n";
    }
  }
  os << "s0: GAR " << format_double17(a.s0) << ", GDR " << format_double17(d.s0) << "\n\n";
  char line[200];
  std::snprintf(line, sizeof line, "%-10s %-22s %-22s %-22s %-22s\n", "t", "chi_A(t)", "xi_A^2(t)", "chi_D(t)",
                "xi_D^2(t)");
  os << line;
  for (double t : geometric_grid(c.grid_horizon / 100, c.grid_horizon, 6)) {
    auto value = [](const auto& f, double x) {
      try {
        return format_double17(f(x));
      } catch (const std::exception&) {
        return std::string("undefined");
      }
    };
    std::snprintf(line, sizeof line, "%-10.4g %-22s %-22s %-22s %-22s\n", t, value(a.chi.chi, t).c_str(),
                  value(a.xi_squared, t).c_str(), value(d.chi.chi, t).c_str(), value(d.xi_squared, t).c_str());
    os << line;
  }
  return os.str();
}

LogLevel log_level_from_env() {
  const char* v = std::getenv("SAWSER_LOG");
  if (!v) return LogLevel::kWarn;
  const std::string s(v);
  if (s == "quiet" || s == "0") return LogLevel::kQuiet;
  if (s == "info" || s == "2") return LogLevel::kInfo;
  if (s == "debug" || s == "3") return LogLevel::kDebug;
  return LogLevel::kWarn;
}

void log_message(LogLevel level, const std::string& message) {
  static const LogLevel threshold = log_level_from_env();
  if (level == LogLevel::kQuiet || level > threshold) return;
  static const char* names[] = {"", "warn", "info", "debug"};
  std::cerr << "sawser " << names[static_cast<int>(level)] << ": " << message << '\n';
}

}  // namespace sawser
