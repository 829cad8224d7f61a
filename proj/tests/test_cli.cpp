#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pvi/cli.hpp"
#include "pvi/io.hpp"

using namespace pvi;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const char* kHeat = R"json({
  "version": 1,
  "preset": {"name": "neumann_heat"},
  "monte_carlo": {"paths": 400, "steps": 10, "substeps": 2},
  "grid": {"times": [0, 0.25], "points": [0, 0.5, 1]},
  "oracle": {"tolerance": 0.2, "nx": 40, "nt": 40}
})json";

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("pvi_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string file(const std::string& name, const std::string& content) const {
    const std::string p = (dir / name).string();
    write_file(p, content);
    return p;
  }
  std::string out(const std::string& name) const { return (dir / name).string(); }
};

int run(std::vector<std::string> args) { return run_cli(args); }

json read_json(const std::string& path) { return json::parse(read_file(path)); }

}  // namespace

TEST_CASE("validate exit codes", "[cli]") {
  Scratch s("validate");
  const std::string heat = s.file("heat.json", kHeat);
  CHECK(run({"validate", heat, "--out", s.out("ok")}) == 0);
  const json rep = read_json(s.out("ok/validation_report.json"));
  CHECK(rep["passed"] == true);

  const std::string bad = s.file("bad.json", R"json({"version": 1,
    "domain": {"kind": "interval", "left": 0, "right": 1},
    "coefficients": {"drift": [0], "diffusion": [[1]], "g": -1, "h": 0},
    "phi": {"kind": "half_line_lower", "a": -1}, "psi": {"kind": "zero"}, "horizon": 1,
    "constants": {"gamma": 1}})json");
  CHECK(run({"validate", bad, "--out", s.out("bad")}) == 1);
  CHECK(read_json(s.out("bad/validation_report.json"))["passed"] == false);

  CHECK(run({"validate", s.file("broken.json", "{\"version\": 1,,}"), "--out", s.out("x")}) == 2);
  CHECK(run({"validate", s.file("unknown.json", R"({"version": 1, "preset": {"name": "neumann_heat"}, "extra": 1})"),
             "--out", s.out("x")}) == 2);
  CHECK(run({"validate", s.out("missing.json"), "--out", s.out("x")}) == 2);
  CHECK(run({"frobnicate"}) == 2);
}

TEST_CASE("solve writes a manifest whose digests match", "[cli]") {
  Scratch s("solve");
  const std::string heat = s.file("heat.json", kHeat);
  REQUIRE(run({"solve", heat, "--seed", "5", "--out", s.out("a")}) == 0);
  const json m = read_json(s.out("a/manifest.json"));
  CHECK(m["command"] == "solve");
  CHECK(m["seed"] == 5);
  CHECK(m["version"] == kArtifactVersion);
  CHECK(m["effective"]["monte_carlo"]["eps"] == 1e-3);
  CHECK(m["config_sha256"] == sha256_hex(m["config"].dump()));
  for (auto it = m["outputs"].begin(); it != m["outputs"].end(); ++it)
    CHECK(it.value() == sha256_file(s.out("a/" + it.key())));
  const std::string csv = read_file(s.out("a/grid.csv"));
  CHECK(csv.rfind("t,x1,u,std_error,boundary_flag\r\n", 0) == 0);
  // t = 0 row reproduces the initial condition
  CHECK(csv.find("0,0,1,0,1\r\n") != std::string::npos);

  REQUIRE(run({"solve", heat, "--seed", "5", "--out", s.out("b")}) == 0);
  CHECK(read_file(s.out("a/grid.csv")) == read_file(s.out("b/grid.csv")));
  CHECK(read_file(s.out("a/summary.json")) == read_file(s.out("b/summary.json")));

  REQUIRE(run({"solve", heat, "--seed", "5", "--eps", "0.05", "--out", s.out("c")}) == 0);
  CHECK(read_json(s.out("c/manifest.json"))["effective"]["monte_carlo"]["eps"] == 0.05);
}

TEST_CASE("solve argument errors", "[cli]") {
  Scratch s("solve_err");
  const std::string heat = s.file("heat.json", kHeat);
  CHECK(run({"solve", heat, "--out", s.out("a")}) == 2);  // --seed is required
  CHECK(run({"solve", heat, "--seed", "1", "--grid", "t=0.1;x=1.5", "--out", s.out("b")}) == 1);
  CHECK(run({"solve", heat, "--seed", "1", "--grid", "t=0.1;x=", "--out", s.out("c")}) == 2);
  CHECK(run({"solve", heat, "--seed", "1", "--paths", "0", "--out", s.out("d")}) == 2);
}

TEST_CASE("sweep needs three eps values", "[cli]") {
  Scratch s("sweep");
  const std::string heat = s.file("heat.json", kHeat);
  CHECK(run({"sweep-eps", heat, "--seed", "1", "--eps-list", "0.1,0.01", "--out", s.out("a")}) == 1);
  CHECK(run({"sweep-eps", heat, "--seed", "1", "--eps-list", "0.1,0.01,0.001", "--paths", "200", "--out", s.out("b")}) ==
        0);
  CHECK(fs::exists(s.out("b/sweep.csv")));
  CHECK(read_json(s.out("b/sweep.json"))["pairs"].size() == 3);
}

TEST_CASE("compare-oracle", "[cli]") {
  Scratch s("compare");
  const std::string heat = s.file("heat.json", kHeat);
  CHECK(run({"compare-oracle", heat, "--seed", "2", "--oracle", "series", "--out", s.out("series")}) == 0);
  CHECK(read_json(s.out("series/compare.json"))["passed"] == true);
  CHECK(run({"compare-oracle", heat, "--seed", "2", "--oracle", "fd", "--out", s.out("fd")}) == 0);
  CHECK(fs::exists(s.out("fd/oracle_grid.csv")));
  CHECK(fs::exists(s.out("fd/compare.csv")));

  const std::string ball = s.file("ball.json", R"json({"version": 1, "preset": {"name": "ball_diffusion"},
    "grid": {"times": [0.5], "points": [[0, 0]]}})json");
  CHECK(run({"compare-oracle", ball, "--seed", "2", "--out", s.out("ball")}) == 1);

  const std::string strict = s.file("strict.json", std::string(kHeat).replace(std::string(kHeat).find("0.2,"), 4, "0,"));
  CHECK(run({"compare-oracle", strict, "--seed", "2", "--oracle", "series", "--out", s.out("strict")}) == 1);
}

TEST_CASE("simulate-sde and bounds-report outputs", "[cli]") {
  Scratch s("paths");
  const std::string heat = s.file("heat.json", kHeat);
  REQUIRE(run({"simulate-sde", heat, "--seed", "3", "--paths", "4", "--x0", "0.2", "--out", s.out("p")}) == 0);
  const std::string csv = read_file(s.out("p/paths.csv"));
  CHECK(csv.rfind("path,k,t,x1,A\r\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 11);
  REQUIRE(run({"bounds-report", heat, "--seed", "3", "--dump-solution", "--out", s.out("b")}) == 0);
  CHECK(fs::exists(s.out("b/bounds.json")));
  CHECK(read_file(s.out("b/solution.csv")).rfind("path,k,Y,Z1,U,V\r\n", 0) == 0);
}

TEST_CASE("thread count setting", "[cli]") {
  Scratch s("threads");
  const std::string heat = s.file("heat.json", kHeat);
  ::setenv("PVI_NUM_THREADS", "zero", 1);
  CHECK(run({"solve", heat, "--seed", "1", "--out", s.out("a")}) == 2);
  ::setenv("PVI_NUM_THREADS", "3", 1);
  CHECK(run({"solve", heat, "--seed", "1", "--out", s.out("b")}) == 0);
  ::unsetenv("PVI_NUM_THREADS");
  CHECK(run({"solve", heat, "--seed", "1", "--out", s.out("c")}) == 0);
  CHECK(read_file(s.out("b/grid.csv")) == read_file(s.out("c/grid.csv")));
}
