#pragma once

#include "sawser/errors.hpp"
#include "sawser/stability.hpp"
#include "sawser/transforms.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sawser {

/// Invalid or unreadable configuration (exit code 2).
class ConfigError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

struct OutputFlags {
  bool json = true;
  bool csv = true;
  bool svg = true;
  bool report = true;
  std::size_t tessellations = 1;  // replicates whose JSON is written
};

struct RunConfig {
  ModelFunctions model;
  ConvexPolygon window = unit_square();
  AngleLaw angles = AngleLaw::uniform();
  double horizon = 1.0;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::vector<double> snapshots;
  OutputFlags outputs;
  std::size_t grid_points = 101;
  double grid_horizon = 1.0;
  VerifySettings verify;
  std::string config_hash;  // FNV-1a of the config bytes, hex
  std::string source_name;
};

/// Parses TOML, or JSON when `json` is set. Throws ConfigError.
RunConfig parse_config(const std::string& text, bool json, const std::string& source_name = "config");
/// Reads a config file; `.json` files are parsed as JSON, anything else as TOML.
RunConfig load_config(const std::filesystem::path& path);

/// Applies --seed / --threads overrides and refreshes the derived settings.
void apply_overrides(RunConfig& config, std::optional<std::uint64_t> seed, std::optional<unsigned> threads);

/// Four geometrically spaced times ending at the horizon.
std::vector<double> default_snapshots(double horizon);

std::string fnv1a_hex(const std::string& bytes);

/// Runs the replicates and writes the artifacts into `out`. Returns the
/// number of files written.
std::size_t run_simulate(const RunConfig& config, const std::filesystem::path& out);

StabilityReport run_verify(const RunConfig& config);

/// Renders a tessellation JSON file to SVG. Throws ArgumentError on malformed input.
void run_render(const std::filesystem::path& input, const std::filesystem::path& output, const SvgOptions& options);

/// GAR triple of the configured model next to its GDR translation.
std::string translate_text(const RunConfig& config);

enum class LogLevel { kQuiet = 0, kWarn = 1, kInfo = 2, kDebug = 3 };
/// From SAWSER_LOG (quiet, warn, info, debug); default warn.
LogLevel log_level_from_env();
void log_message(LogLevel level, const std::string& message);

}  // namespace sawser
