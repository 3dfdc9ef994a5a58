#include "tdeuler/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace tdeuler {

namespace {

const nlohmann::json& at_path(const nlohmann::json& j, const std::string& dotted) {
  const nlohmann::json* cur = &j;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!cur->is_object() || !cur->contains(part)) throw ConfigError(dotted, "missing");
    cur = &(*cur)[part];
  }
  return *cur;
}

double num(const nlohmann::json& j, const std::string& f) {
  const auto& v = at_path(j, f);
  if (!v.is_number()) throw ConfigError(f, "expected a number, got " + v.dump());
  return v.get<double>();
}

int integer(const nlohmann::json& j, const std::string& f) {
  const auto& v = at_path(j, f);
  if (!v.is_number_integer()) throw ConfigError(f, "expected an integer, got " + v.dump());
  return v.get<int>();
}

bool boolean(const nlohmann::json& j, const std::string& f) {
  const auto& v = at_path(j, f);
  if (!v.is_boolean()) throw ConfigError(f, "expected true or false, got " + v.dump());
  return v.get<bool>();
}

std::string str(const nlohmann::json& j, const std::string& f) {
  const auto& v = at_path(j, f);
  if (!v.is_string()) throw ConfigError(f, "expected a string, got " + v.dump());
  return v.get<std::string>();
}

template <class Fn>
void guard(const std::string& field, Fn&& fn) {
  try {
    fn();
  } catch (const ParameterError& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace

bool is_preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return true;
  return false;
}

nlohmann::json load_config(const std::string& preset_or_path) {
  if (is_preset(preset_or_path)) return preset_config(preset_or_path);
  std::ifstream is(preset_or_path);
  if (!is) throw ConfigError("<file>", "'" + preset_or_path + "' is neither a preset nor a readable file");
  nlohmann::json user;
  try {
    user = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<file>", std::string("JSON parse error: ") + e.what());
  }
  if (!user.is_object() || !user.contains("scenario") || !user["scenario"].is_string())
    throw ConfigError("scenario", "config file must name a scenario");
  nlohmann::json cfg = preset_config(user["scenario"].get<std::string>());
  cfg.merge_patch(user);
  return cfg;
}

void set_path(nlohmann::json& cfg, const std::string& dotted, const nlohmann::json& value) {
  nlohmann::json* cur = &cfg;
  std::stringstream ss(dotted);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError(dotted, "empty key");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!cur->is_object()) throw ConfigError(dotted, "'" + parts[i] + "' is not an object");
    cur = &(*cur)[parts[i]];
  }
  if (!cur->is_object() && !cur->is_null()) throw ConfigError(dotted, "parent is not an object");
  (*cur)[parts.back()] = value;
}

void apply_override(nlohmann::json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError(assignment, "override must look like key.path=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  set_path(cfg, key, value);
}

std::string config_hash(const nlohmann::json& cfg) {
  const std::string s = cfg.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> snapshot_times(const SnapshotSchedule& s, double t_final) {
  std::vector<double> t{0.0};
  const double early_end = std::min(1.0, t_final);
  for (int i = 1; i <= s.early; ++i) t.push_back(early_end * i / s.early);
  if (s.log > 0 && t_final > 1.0) {
    const double lt = std::log(t_final);
    for (int i = 0; i <= s.log; ++i) t.push_back(std::exp(lt * i / s.log));
  }
  for (int i = 1; i <= s.linear; ++i) t.push_back(t_final * i / s.linear);
  for (double x : s.times)
    if (x >= 0.0 && x <= t_final) t.push_back(x);
  t.push_back(t_final);
  std::sort(t.begin(), t.end());
  // merge near-duplicates produced by the different families
  std::vector<double> out;
  for (double x : t)
    if (out.empty() || x - out.back() > 1e-9 * std::max(1.0, x)) out.push_back(x);
  out.back() = t_final;
  return out;
}

ScenarioConfig parse_config(const nlohmann::json& j) {
  ScenarioConfig c;
  c.scenario = str(j, "scenario");
  if (!is_preset(c.scenario)) throw ConfigError("scenario", "unknown scenario '" + c.scenario + "'");

  c.damping.lambda = num(j, "damping.lambda");
  c.damping.mu = num(j, "damping.mu");
  guard("damping", [&] { validate(c.damping); });
  c.gas.gamma = num(j, "gas.gamma");
  guard("gas.gamma", [&] { validate(c.gas); });

  c.n = integer(j, "n");
  if (c.n < 1 || c.n > 3) throw ConfigError("n", "dimension must be 1, 2 or 3");
  const auto& dj = at_path(j, "delta");
  c.delta = dj.is_null() ? default_delta(c.damping, c.n) : num(j, "delta");
  guard("delta", [&] { c.weight = derive_constants(c.damping, c.n, c.delta); });

  c.L = num(j, "grid.L");
  c.N = integer(j, "grid.N");
  if (c.L < 0.0) throw ConfigError("grid.L", "must be >= 0 (0 selects automatic sizing)");
  if (c.N != 0 && (c.N < 16 || (c.N & (c.N - 1)) != 0))
    throw ConfigError("grid.N", "must be 0 (automatic) or a power of two >= 16");

  c.initial.R = num(j, "initial.R");
  if (!(c.initial.R > 0.0)) throw ConfigError("initial.R", "support radius must be positive");
  c.initial.eps = num(j, "initial.eps");
  if (!(c.initial.eps >= 0.0)) throw ConfigError("initial.eps", "must be >= 0");
  const auto& q0 = at_path(j, "initial.q0");
  if (!q0.is_null()) c.initial.q0 = num(j, "initial.q0");
  const std::string vel = str(j, "initial.velocity");
  if (vel == "none") {
    c.initial.velocity = VelocityKind::None;
  } else if (vel == "irrotational") {
    c.initial.velocity = VelocityKind::Irrotational;
  } else if (vel == "rotational") {
    c.initial.velocity = VelocityKind::Rotational;
    if (c.n == 1) throw ConfigError("initial.velocity", "rotational data needs n >= 2");
  } else {
    throw ConfigError("initial.velocity", "must be none, irrotational or rotational");
  }
  c.initial.sobolev_order = integer(j, "initial.sobolev_order");
  if (c.initial.sobolev_order < -1) throw ConfigError("initial.sobolev_order", "must be >= -1");
  const auto& seed = at_path(j, "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
    throw ConfigError("seed", "must be a nonnegative integer");
  c.seed = seed.get<std::uint64_t>();
  c.initial.seed = c.seed;

  c.solver.cfl = num(j, "solver.cfl");
  c.solver.dealias = boolean(j, "solver.dealias");
  c.solver.t_final = num(j, "solver.t_final");
  c.solver.hyperviscosity = num(j, "solver.hyperviscosity");
  c.solver.integrating_factor = boolean(j, "solver.integrating_factor");
  c.solver.dt_fixed = num(j, "solver.dt_fixed");
  c.solver.blowup_gradient_factor = num(j, "solver.blowup_gradient_factor");
  c.solver.blowup_tail_fraction = num(j, "solver.blowup_tail_fraction");
  c.solver.monitor_stride = integer(j, "solver.monitor_stride");
  c.schedule.early = integer(j, "solver.snapshots.early");
  c.schedule.log = integer(j, "solver.snapshots.log");
  c.schedule.linear = integer(j, "solver.snapshots.linear");
  if (c.schedule.early < 0 || c.schedule.log < 0 || c.schedule.linear < 0)
    throw ConfigError("solver.snapshots", "counts must be >= 0");
  const auto& extra = at_path(j, "solver.snapshots.times");
  if (!extra.is_array()) throw ConfigError("solver.snapshots.times", "expected an array");
  for (const auto& x : extra) {
    if (!x.is_number()) throw ConfigError("solver.snapshots.times", "entries must be numbers");
    c.schedule.times.push_back(x.get<double>());
  }
  guard("solver", [&] { validate(c.solver); });
  c.solver.snapshot_times = snapshot_times(c.schedule, c.solver.t_final);

  c.analysis.k_max = integer(j, "analysis.k_max");
  c.analysis.energy_order = integer(j, "analysis.energy_order");
  c.analysis.ball_margin = num(j, "analysis.ball_margin");
  c.analysis.fit_lo = num(j, "analysis.fit_lo");
  c.analysis.fit_hi = num(j, "analysis.fit_hi");
  c.analysis.t0 = num(j, "analysis.t0");
  if (c.analysis.k_max < 1 || c.analysis.k_max > 4) throw ConfigError("analysis.k_max", "must lie in [1, 4]");
  if (c.analysis.energy_order < 1 || c.analysis.energy_order > 4)
    throw ConfigError("analysis.energy_order", "must lie in [1, 4]");
  if (!(c.analysis.ball_margin >= 0.0)) throw ConfigError("analysis.ball_margin", "must be >= 0");

  const auto& diag = at_path(j, "diagnostics");
  if (!diag.is_array()) throw ConfigError("diagnostics", "expected an array of names");
  const nlohmann::json known = preset_config(c.scenario)["diagnostics"];
  std::set<std::string> seen;
  for (const auto& d : diag) {
    if (!d.is_string()) throw ConfigError("diagnostics", "entries must be strings");
    if (!seen.insert(d.get<std::string>()).second)
      throw ConfigError("diagnostics", "duplicate entry '" + d.get<std::string>() + "'");
    if (std::find(known.begin(), known.end(), d) == known.end())
      throw ConfigError("diagnostics", "'" + d.get<std::string>() + "' is not available for " + c.scenario +
                                           " (available: " + known.dump() + ")");
    c.diagnostics.push_back(d.get<std::string>());
  }
  c.params = at_path(j, "params");
  if (!c.params.is_object()) throw ConfigError("params", "expected an object");

  c.output_dir = str(j, "output.dir");
  c.write_snapshots = boolean(j, "output.snapshots");
  guard("output.format", [&] { c.snapshot_format = parse_snapshot_format(str(j, "output.format")); });
  c.snapshot_rho = boolean(j, "output.rho");
  return c;
}

}  // namespace tdeuler
