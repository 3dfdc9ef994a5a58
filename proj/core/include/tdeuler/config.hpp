#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdeuler/euler.hpp"
#include "tdeuler/params.hpp"
#include "tdeuler/snapshot_io.hpp"

namespace tdeuler {

/// Invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct PresetInfo {
  std::string name;
  std::string description;
};

const std::vector<PresetInfo>& presets();
bool is_preset(std::string_view name);
/// Full default configuration of a preset; throws ConfigError for unknown names.
nlohmann::json preset_config(std::string_view name);

/// A preset name, or a JSON file whose "scenario" key names a preset; the
/// file is merge-patched over the preset defaults.
nlohmann::json load_config(const std::string& preset_or_path);

/// "a.b.c=value"; value is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& cfg, const std::string& assignment);
void set_path(nlohmann::json& cfg, const std::string& dotted, const nlohmann::json& value);

/// 16 hex digits of FNV-1a over the compact dump.
std::string config_hash(const nlohmann::json& cfg);

struct SnapshotSchedule {
  int early = 10;   // uniform points in [0, 1]
  int log = 0;      // log-spaced points in [1, t_final]
  int linear = 0;   // uniform points in [0, t_final]
  std::vector<double> times;  // explicit extra times
};

std::vector<double> snapshot_times(const SnapshotSchedule& s, double t_final);

struct AnalysisConfig {
  int k_max = 2;
  int energy_order = 2;
  double ball_margin = 2.0;
  double fit_lo = -1.0;  // < 0: t_final / 10
  double fit_hi = -1.0;  // < 0: t_final
  double t0 = 20.0;      // start of the lower-bound window
};

struct ScenarioConfig {
  std::string scenario;
  DampingLaw damping;
  GasLaw gas;
  int n = 1;
  double delta = 0.25;
  WeightSpec weight;
  double L = 0.0;  // 0: automatic
  int N = 0;       // 0: automatic
  InitialDataSpec initial;
  SolverConfig solver;
  SnapshotSchedule schedule;
  AnalysisConfig analysis;
  std::vector<std::string> diagnostics;
  nlohmann::json params;
  std::string output_dir = "runs";
  bool write_snapshots = false;
  SnapshotFormat snapshot_format = SnapshotFormat::Binary;
  bool snapshot_rho = false;
  std::uint64_t seed = 0;
};

/// Typed view with field-level validation.
ScenarioConfig parse_config(const nlohmann::json& cfg);

}  // namespace tdeuler
