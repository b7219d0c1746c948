// sawser: simulate, verify, render and translate from a run config.

#include "sawser/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kVerifyFailed = 1;
constexpr int kUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace sawser;

  CLI::App app{"Area-weighted cell-division tessellations: simulation and stability checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out_dir;
  std::vector<double> snapshots;
  bool print_json = false;

  auto* simulate = app.add_subcommand("simulate", "Run replicates and write tessellations, SVGs and an event log");
  simulate->add_option("--config", config_path, "Run config (TOML or .json)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "Override the config seed");
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--threads", threads, "Replicates built concurrently");
  simulate->add_option("--snapshot", snapshots, "Snapshot times for the SVGs of replicate 0");

  auto* verify = app.add_subcommand("verify", "Check regularity, MEPA, INOT and run the Monte Carlo suite");
  verify->add_option("--config", config_path, "Run config (TOML or .json)")->required()->check(CLI::ExistingFile);
  verify->add_option("--seed", seed, "Override the config seed");
  verify->add_option("--out", out_dir, "Directory for report.json");
  verify->add_option("--threads", threads, "Replicates built concurrently");
  verify->add_flag("--json", print_json, "Print the report as JSON instead of a table");

  std::string render_in;
  std::string render_out;
  SvgOptions svg;
  std::optional<double> render_snapshot;
  auto* render = app.add_subcommand("render", "Render a tessellation JSON file to SVG");
  render->add_option("input", render_in, "Tessellation JSON")->required();
  render->add_option("output", render_out, "SVG path")->required();
  render->add_option("--width", svg.width_px, "Image width in pixels")->check(CLI::PositiveNumber);
  render->add_option("--stroke", svg.stroke, "Stroke width multiplier")->check(CLI::PositiveNumber);
  render->add_option("--snapshot", render_snapshot, "Draw only segments created at or before this time");

  auto* translate = app.add_subcommand("translate", "Print the GAR triple of a config next to its GDR translation");
  translate->add_option("--config", config_path, "Run config (TOML or .json)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (render->parsed()) {
      svg.snapshot_time = render_snapshot;
      run_render(render_in, render_out, svg);
      log_message(LogLevel::kInfo, "wrote " + render_out);
      return 0;
    }

    RunConfig config = load_config(config_path);
    apply_overrides(config, seed, threads);

    if (simulate->parsed()) {
      if (!snapshots.empty()) {
        for (double t : snapshots) {
          if (!(t >= 0) || t > config.horizon) throw ConfigError("snapshot times must lie in [0, horizon]");
        }
        config.snapshots = snapshots;
      }
      const std::size_t files = run_simulate(config, out_dir);
      log_message(LogLevel::kInfo, "wrote " + std::to_string(files) + " files to " + out_dir);
      return 0;
    }
    if (translate->parsed()) {
      std::cout << translate_text(config);
      return 0;
    }

    log_message(LogLevel::kInfo, "verifying " + config.model.label + " with " +
                                     std::to_string(config.replicates) + " replicates");
    const StabilityReport report = run_verify(config);
    if (print_json) {
      std::cout << report.to_json().dump(2) << '\n';
    } else {
      std::cout << report.to_text();
    }
    if (!out_dir.empty() && config.outputs.report) {
      std::filesystem::create_directories(out_dir);
      std::ofstream os(std::filesystem::path(out_dir) / "report.json");
      os << report.to_json().dump(2) << '\n';
      if (!os) throw std::runtime_error("cannot write report.json");
    }
    if (report.any_inconclusive() && !report.all_passed()) {
      log_message(LogLevel::kWarn, "some statistics were inconclusive; increase replicates or the window");
    }
    return report.all_passed() ? 0 : kVerifyFailed;
  } catch (const std::exception& e) {
    std::cerr << "sawser: " << e.what() << '\n';
    return kUsage;
  }
}
