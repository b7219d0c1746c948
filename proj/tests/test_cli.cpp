#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sawser/cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sawser;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = SAWSER_CONFIG_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sawser_test_" + name);
  fs::remove_all(dir);
  return dir;
}

const char* kMinimal = R"(
horizon = 2.0
replicates = 3
seed = 11
[model]
case = "B"
a = 1.0
b = 1.0
[window]
shape = "rectangle"
width = 2.0
height = 0.5
)";

}  // namespace

TEST_CASE("parse a TOML config") {
  const RunConfig c = parse_config(kMinimal, false);
  CHECK(c.horizon == 2.0);
  CHECK(c.replicates == 3);
  CHECK(c.seed == 11);
  CHECK(polygon_area(c.window) == Approx(1.0));
  REQUIRE(c.model.params);
  CHECK(c.model.params->a == 1.0);
  CHECK(c.grid_horizon == 2.0);
  CHECK(c.config_hash == fnv1a_hex(kMinimal));
  CHECK(c.config_hash.size() == 16);
}

TEST_CASE("parse a JSON config") {
  const RunConfig c = load_config(kConfigs / "quick.json");
  CHECK(c.horizon == 3.0);
  CHECK(c.snapshots == std::vector<double>{0.5, 1.0, 2.0, 3.0});
  CHECK(polygon_area(c.window) == Approx(1.0));
}

TEST_CASE("shipped configs load") {
  for (const char* name : {"case_a.toml", "case_b.toml", "control_perturbed_xi.toml", "control_linear_chi.toml"}) {
    CAPTURE(name);
    const RunConfig c = load_config(kConfigs / name);
    CHECK(c.replicates == 500);
    CHECK(c.verify.replicates == 500);
  }
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("horizon = 0\n[model]\ncase = \"A\"\n", false), ConfigError);
  CHECK_THROWS_AS(parse_config("replicates = 2\n[model]\ncase = \"A\"\n", false), ConfigError);
  CHECK_THROWS_AS(parse_config("horizon = 1\nreplicates = 0\n[model]\ncase = \"A\"\n", false), ConfigError);
  CHECK_THROWS_AS(parse_config("horizon = 1\ncolour = 3\n[model]\ncase = \"A\"\n", false), ConfigError);
  CHECK_THROWS_AS(parse_config("horizon = 1\n[model]\ncase = \"A\"\nb = 0\n", false), ArgumentError);
  CHECK_THROWS_AS(parse_config("horizon = 1\n[model]\ncase = \"custom\"\npsi = \"exp(\"\n", false), ArgumentError);
  CHECK_THROWS_AS(parse_config("horizon = [", false), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"horizon\": }", true), ConfigError);
  CHECK_THROWS_AS(load_config(kConfigs / "missing.toml"), ConfigError);
}

TEST_CASE("angle laws") {
  const std::string base = "horizon = 1\n[model]\ncase = \"A\"\n";
  CHECK(parse_config(base, false).angles.kind() == AngleLaw::Kind::kUniform);
  const RunConfig fixed = parse_config(base + "[angles]\nlaw = \"fixed\"\nangle = 0.5\n", false);
  CHECK(fixed.angles.kind() == AngleLaw::Kind::kFixed);
  CHECK(fixed.angles.draw(0.3) == 0.5);
  const RunConfig discrete =
      parse_config(base + "[angles]\nlaw = \"discrete\"\natoms = [0.0, 1.0]\nweights = [0.25, 0.75]\n", false);
  CHECK(discrete.angles.atoms().size() == 2);
  CHECK_THROWS_AS(parse_config(base + "[angles]\nlaw = \"discrete\"\natoms = [0.0]\nweights = [0.5]\n", false),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(base + "[angles]\nlaw = \"spiral\"\n", false), ConfigError);
}

TEST_CASE("overrides") {
  RunConfig c = parse_config(kMinimal, false);
  apply_overrides(c, 99, 2);
  CHECK(c.seed == 99);
  CHECK(c.verify.seed == 99);
  CHECK(c.threads == 2);
  apply_overrides(c, std::nullopt, std::nullopt);
  CHECK(c.seed == 99);
}

TEST_CASE("default snapshots") {
  const auto s = default_snapshots(8.0);
  REQUIRE(s.size() == 4);
  CHECK(s.front() == Approx(1.0));
  CHECK(s.back() == 8.0);
}

TEST_CASE("simulate writes a deterministic artifact set") {
  const RunConfig c = parse_config(kMinimal, false);
  const fs::path first = fresh_dir("sim1");
  const fs::path second = fresh_dir("sim2");
  const std::size_t files = run_simulate(c, first);
  CHECK(run_simulate(c, second) == files);

  for (const auto& entry : fs::directory_iterator(first)) {
    CAPTURE(entry.path().filename().string());
    CHECK(slurp(entry.path()) == slurp(second / entry.path().filename()));
  }

  const nlohmann::json manifest = nlohmann::json::parse(slurp(first / "manifest.json"));
  CHECK(manifest["seed"] == 11);
  CHECK(manifest["replicates"] == 3);
  const auto counts = manifest["point_counts"].get<std::vector<std::size_t>>();
  REQUIRE(counts.size() == 3);

  std::istringstream csv(slurp(first / "events.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "replicate,event,time,parent,child_a,child_b,parent_area,x,y,mark");
  std::size_t rows = 0;
  while (std::getline(csv, line)) rows += !line.empty();
  std::size_t total = 0;
  for (std::size_t n : counts) total += n;
  CHECK(rows == total);

  CHECK(fs::exists(first / "replicate_0000.json"));
  CHECK(fs::exists(first / "snapshot_00.svg"));
  fs::remove_all(first);
  fs::remove_all(second);
}

TEST_CASE("a different seed changes the output") {
  RunConfig c = parse_config(kMinimal, false);
  const fs::path a = fresh_dir("seed_a");
  const fs::path b = fresh_dir("seed_b");
  run_simulate(c, a);
  apply_overrides(c, 12, std::nullopt);
  run_simulate(c, b);
  CHECK(slurp(a / "events.csv") != slurp(b / "events.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("render round trip") {
  const RunConfig c = parse_config(kMinimal, false);
  const fs::path dir = fresh_dir("render");
  run_simulate(c, dir);
  run_render(dir / "replicate_0000.json", dir / "out.svg", {});
  CHECK(slurp(dir / "out.svg").rfind("<svg", 0) != std::string::npos);

  std::ofstream(dir / "bad.json") << "{\"cells\": 1}";
  CHECK_THROWS_AS(run_render(dir / "bad.json", dir / "bad.svg", {}), ArgumentError);
  fs::remove_all(dir);
}

TEST_CASE("translate shows both triples") {
  const std::string a = translate_text(load_config(kConfigs / "case_a.toml"));
  CHECK(a.find("GAR") != std::string::npos);
  CHECK(a.find("GDR") != std::string::npos);
  const std::string b = translate_text(parse_config(kMinimal, false));
  CHECK(b.find("GDR") != std::string::npos);
}
