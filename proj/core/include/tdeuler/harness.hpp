#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdeuler/config.hpp"
#include "tdeuler/diagnostics.hpp"

namespace tdeuler {

struct Report {
  std::string scenario;
  std::string hash;
  nlohmann::json config;  // full effective config
  std::vector<Verdict> verdicts;
  nlohmann::json fits = nlohmann::json::object();  // quantity -> FitResult record
  std::vector<std::string> warnings;
  std::vector<std::string> files;  // relative to the run directory
  nlohmann::json extra = nlohmann::json::object();  // scenario-specific numbers

  bool all_pass() const;
  nlohmann::json to_json() const;
  static Report from_json(const nlohmann::json& j);
};

struct RunOptions {
  bool write_files = true;
};

/// Runs one scenario from an effective config (preset defaults already
/// merged). Output goes to <output.dir>/<scenario>-<hash>.
Report run_scenario(const nlohmann::json& cfg, const RunOptions& opt = {});

/// <output.dir>/<scenario>-<hash> for cfg.
std::filesystem::path run_directory(const nlohmann::json& cfg);

std::string render_summary(const Report& r);

/// Reads <dir>/report.json, rewrites summary.txt and returns the report.
Report rerender_report(const std::filesystem::path& dir);

struct SweepAxis {
  std::string key;  // lambda, mu, eps, N or delta
  std::vector<nlohmann::json> values;
};

/// "mu=1,2,4" -> {mu, [1, 2, 4]}
SweepAxis parse_axis(const std::string& spec);

/// Dotted config path swept by an axis name.
std::string axis_path(const std::string& key);

struct SweepRun {
  nlohmann::json config;
  std::vector<nlohmann::json> point;  // axis values in axis order
  bool ok = false;
  std::string error;
  Report report;
};

struct SweepResult {
  std::vector<SweepAxis> axes;
  std::vector<SweepRun> runs;  // Cartesian order, first axis outermost
  bool all_pass() const;
  bool any_error() const;
};

/// workers <= 0 uses hardware concurrency.
SweepResult sweep(const nlohmann::json& base, const std::vector<SweepAxis>& axes, int workers = 0,
                  const RunOptions& opt = {});

/// One row per run: axis values, scenario, hash, status, error, then the
/// fitted value of every verdict seen (union in first-seen order).
void write_sweep_csv(std::ostream& os, const SweepResult& r);

}  // namespace tdeuler
