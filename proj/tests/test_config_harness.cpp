#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tdeuler/config.hpp"
#include "tdeuler/harness.hpp"

using namespace tdeuler;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  const fs::path p = fs::temp_directory_path() / ("tdeuler-" + tag + "-" + std::to_string(rng()));
  fs::create_directories(p);
  return p;
}

std::string field_of(const json& cfg) {
  try {
    parse_config(cfg);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

// a short solver run, cheap enough for unit tests
json small_run() {
  json c = preset_config("mass-conservation");
  c["grid"]["L"] = 16.0;
  c["grid"]["N"] = 64;
  c["solver"]["t_final"] = 2.0;
  c["solver"]["snapshots"]["linear"] = 4;
  return c;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("every preset parses") {
  CHECK(presets().size() >= 12);
  for (const auto& p : presets()) {
    INFO(p.name);
    CHECK_NOTHROW(parse_config(preset_config(p.name)));
    CHECK_FALSE(p.description.empty());
  }
  CHECK_THROWS_AS(preset_config("nope"), ConfigError);
}

TEST_CASE("errors name the offending field") {
  json c = preset_config("nonlinear-decay");
  c["grid"]["N"] = 1000;
  CHECK(field_of(c) == "grid.N");
  c = preset_config("nonlinear-decay");
  c["damping"]["lambda"] = 1.2;
  CHECK(field_of(c) == "damping");
  c = preset_config("nonlinear-decay");
  c["damping"]["mu"] = "fast";
  CHECK(field_of(c) == "damping.mu");
  c = preset_config("nonlinear-decay");
  c["diagnostics"] = {"rho-linf-slope", "rho-linf-slope"};
  CHECK(field_of(c) == "diagnostics");
  c["diagnostics"] = {"vorticity-rate"};
  CHECK(field_of(c) == "diagnostics");
  c = preset_config("nonlinear-decay");
  c["initial"]["velocity"] = "rotational";
  CHECK(field_of(c) == "initial.velocity");
  c = preset_config("nonlinear-decay");
  c.erase("seed");
  CHECK(field_of(c) == "seed");
  c = preset_config("nonlinear-decay");
  c["delta"] = 5.0;
  CHECK(field_of(c) == "delta");
}

TEST_CASE("overrides and files") {
  json c = preset_config("nonlinear-decay");
  apply_override(c, "damping.mu=2.5");
  apply_override(c, "output.dir=elsewhere");
  apply_override(c, "solver.snapshots.times=[3, 4]");
  CHECK(c["damping"]["mu"] == 2.5);
  CHECK(c["output"]["dir"] == "elsewhere");
  CHECK(c["solver"]["snapshots"]["times"].size() == 2);
  CHECK_THROWS_AS(apply_override(c, "novalue"), ConfigError);

  const fs::path dir = scratch_dir("cfg");
  std::ofstream(dir / "c.json") << R"({"scenario": "lower-bound", "damping": {"mu": 3}})";
  const json loaded = load_config((dir / "c.json").string());
  CHECK(loaded["damping"]["mu"] == 3);
  CHECK(loaded["damping"]["lambda"] == 0.5);
  CHECK(loaded["initial"]["q0"] == 0.01);
  std::ofstream(dir / "bad.json") << "{";
  CHECK_THROWS_AS(load_config((dir / "bad.json").string()), ConfigError);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("snapshot schedule") {
  SnapshotSchedule s;
  s.early = 4;
  s.log = 3;
  s.linear = 2;
  s.times = {0.5, 7.0, 2000.0};
  const auto t = snapshot_times(s, 1000.0);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 1000.0);
  CHECK(std::is_sorted(t.begin(), t.end()));
  CHECK(std::find(t.begin(), t.end(), 7.0) != t.end());
  CHECK(std::adjacent_find(t.begin(), t.end()) == t.end());
  // 0, .25, .5, .75, 1, 10, 100, 7, 500, 1000
  CHECK(t.size() == 10);
}

TEST_CASE("hash is stable and ignores the output directory") {
  json a = preset_config("convolution-lemma");
  json b = a;
  b["output"]["dir"] = "/tmp/other";
  CHECK(config_hash(a) == config_hash(a));
  CHECK(config_hash(a).size() == 16);
  CHECK(run_directory(a).filename() == run_directory(b).filename());
  b["damping"]["mu"] = 2.0;
  CHECK(run_directory(a).filename() != run_directory(b).filename());
}

}  // TEST_SUITE

TEST_SUITE("harness") {

TEST_CASE("empty diagnostics list gives no verdicts") {
  json c = preset_config("convolution-lemma");
  c["diagnostics"] = json::array();
  const Report r = run_scenario(c, RunOptions{false});
  CHECK(r.verdicts.empty());
  CHECK(r.all_pass());
}

TEST_CASE("reports are byte-identical across runs and round-trip through JSON") {
  const fs::path root = scratch_dir("rep");
  json c = small_run();
  c["output"]["dir"] = root.string();
  const fs::path dir = run_directory(c);
  const char* files[] = {"report.json", "fits.json", "energy.csv", "summary.txt", "config.json"};
  run_scenario(c);
  std::vector<std::string> first;
  for (const char* f : files) first.push_back(oracle::slurp((dir / f).string()));
  const Report r = run_scenario(c);
  for (std::size_t i = 0; i < first.size(); ++i) {
    INFO(files[i]);
    CHECK_FALSE(first[i].empty());
    CHECK(oracle::slurp((dir / files[i]).string()) == first[i]);
  }
  CHECK(r.verdicts.size() == 1);
  const Report back = rerender_report(dir);
  CHECK(back.to_json() == r.to_json());
  fs::remove_all(root);
}

TEST_CASE("single-point sweep equals a direct run") {
  json c = small_run();
  const Report direct = run_scenario(c, RunOptions{false});
  const SweepResult s = sweep(c, {parse_axis("mu=1")}, 1, RunOptions{false});
  REQUIRE(s.runs.size() == 1);
  CHECK(s.runs[0].ok);
  CHECK(s.runs[0].report.to_json() == direct.to_json());

  const SweepResult two = sweep(c, {parse_axis("mu=1,2"), parse_axis("lambda=0.2,0.5")}, 2, RunOptions{false});
  CHECK(two.runs.size() == 4);
  CHECK(two.runs[1].config["damping"]["lambda"] == 0.5);
  CHECK(two.runs[2].config["damping"]["mu"] == 2);
  std::ostringstream os;
  write_sweep_csv(os, two);
  const std::string csv = os.str();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.rfind("mu,lambda,", 0) == 0);
}

TEST_CASE("sweep axes") {
  const SweepAxis a = parse_axis("eps=1e-3,2e-3");
  CHECK(a.key == "eps");
  CHECK(a.values.size() == 2);
  CHECK(axis_path("N") == "grid.N");
  CHECK(axis_path("lambda") == "damping.lambda");
  CHECK_THROWS(parse_axis("gamma=2"));
  CHECK_THROWS(parse_axis("mu="));
}

TEST_CASE("sweep records failures per point") {
  json c = small_run();
  const SweepResult s = sweep(c, {parse_axis("lambda=0.5,1.5")}, 1, RunOptions{false});
  CHECK(s.runs[0].ok);
  CHECK_FALSE(s.runs[1].ok);
  CHECK(s.any_error());
  CHECK(s.runs[1].error.find("damping") != std::string::npos);
}

TEST_CASE("summary lists each verdict") {
  const Report r = run_scenario(preset_config("convolution-lemma"), RunOptions{false});
  const std::string s = render_summary(r);
  for (const auto& v : r.verdicts) CHECK(s.find(v.quantity) != std::string::npos);
}

}  // TEST_SUITE
