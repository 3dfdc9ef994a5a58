#include <nlohmann/json.hpp>

#include "tdeuler/config.hpp"

namespace tdeuler {

namespace {

using json = nlohmann::json;

json base_config(const std::string& scenario) {
  return json{
      {"scenario", scenario},
      {"damping", {{"lambda", 0.5}, {"mu", 1.0}}},
      {"gas", {{"gamma", 2.0}}},
      {"n", 1},
      {"delta", nullptr},
      {"grid", {{"L", 0.0}, {"N", 0}}},
      {"initial",
       {{"R", 4.0}, {"eps", 1e-3}, {"q0", nullptr}, {"velocity", "irrotational"}, {"sobolev_order", -1}}},
      {"solver",
       {{"cfl", 0.4},
        {"dealias", true},
        {"t_final", 1.0},
        {"snapshots", {{"early", 10}, {"log", 0}, {"linear", 0}, {"times", json::array()}}},
        {"hyperviscosity", 0.0},
        {"integrating_factor", false},
        {"dt_fixed", 0.0},
        {"blowup_gradient_factor", 100.0},
        {"blowup_tail_fraction", 0.01},
        {"monitor_stride", 10}}},
      {"diagnostics", json::array()},
      {"analysis",
       {{"k_max", 2}, {"energy_order", 2}, {"ball_margin", 2.0}, {"fit_lo", -1.0}, {"fit_hi", -1.0}, {"t0", 20.0}}},
      {"params", json::object()},
      {"output", {{"dir", "runs"}, {"snapshots", false}, {"format", "binary"}, {"rho", false}}},
      {"seed", 0},
  };
}

// small-data run shared by the decay presets
json small_data_run(const std::string& scenario, json diagnostics) {
  json c = base_config(scenario);
  // R = 12 keeps the bump resolved at dx ~ 1
  c["initial"]["R"] = 12.0;
  c["grid"]["N"] = 2048;
  c["solver"]["t_final"] = 1000.0;
  c["solver"]["snapshots"]["log"] = 60;
  c["diagnostics"] = std::move(diagnostics);
  return c;
}

struct Entry {
  PresetInfo info;
  json (*make)();
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r = {
      {{"linear-decay", "L-infinity decay of the damped-wave kernel applied to a bump, per mode"},
       [] {
         json c = base_config("linear-decay");
         c["damping"]["mu"] = 4.0;
         c["params"] = {{"kernel", 1}, {"g_radius", 8.0}, {"t_min", 100.0}, {"t_max", 1e4},   {"samples", 17},
                        {"dx", 1.0},    {"width_factor", 4.0}, {"negligible", 1e-12}};
         c["diagnostics"] = {"kernel-slope-k0", "kernel-slope-k1", "kernel-upper-bound"};
         return c;
       }},
      {{"zone-bounds", "Fundamental solutions against the zone envelopes on refined (t, xi) grids"},
       [] {
         json c = base_config("zone-bounds");
         c["damping"]["mu"] = 2.0;
         c["params"] = {{"C0", 0.5}, {"kernel", 1}, {"t_max", 100.0}, {"nt", 20}, {"nr", 20},
                        {"z3_r", {2.0, 4.0}}, {"z3_samples", 40}};
         c["diagnostics"] = {"zone1-ratio", "zone2-ratio", "zone3-rate"};
         return c;
       }},
      {{"zone-integrals", "Radial quadrature of |xi|^alpha |Phi| over Z1 against the power-law envelope"},
       [] {
         json c = base_config("zone-integrals");
         c["damping"]["mu"] = 2.0;
         c["params"] = {{"times", {10.0, 100.0, 1000.0}}, {"alphas", {0, 2}}, {"p", 1}, {"kernel", 1},
                        {"ratio_bound", 3.0}, {"gap_rel_tol", 0.2}};
         c["diagnostics"] = {"zone-integral-ratio-a0", "zone-integral-ratio-a2", "zone-integral-alpha-gap"};
         return c;
       }},
      {{"nonlinear-decay", "Decay slopes of |rho-1|_inf and |u|_inf along a small-data run"},
       [] { return small_data_run("nonlinear-decay", {"rho-linf-slope", "u-linf-slope", "slope-difference"}); }},
      {{"u-extra-lambda", "Velocity decays slower than d_x rho by the factor (1+t)^lambda"},
       [] { return small_data_run("u-extra-lambda", {"u-minus-drho-slope"}); }},
      {{"weighted-energy-bounded", "Weighted low and high energies stay within 10x of their early maxima"},
       [] { return small_data_run("weighted-energy-bounded", {"energy-low-bounded", "energy-high-bounded"}); }},
      {{"q-decay", "Decay slope of |Q|_1 and its quadratic scaling in eps"},
       [] { return small_data_run("q-decay", {"q-l1-slope", "q-eps-scaling"}); }},
      {{"mass-conservation", "Drift of M(t) along a positive-mass run"},
       [] {
         json c = base_config("mass-conservation");
         c["initial"]["q0"] = 0.01;
         c["initial"]["velocity"] = "none";
         c["grid"]["N"] = 1024;
         c["solver"]["t_final"] = 200.0;
         c["solver"]["snapshots"]["linear"] = 40;
         c["diagnostics"] = {"mass-drift"};
         return c;
       }},
      {{"lower-bound", "Cauchy-Schwarz, F-inequality and lower-bound margins for positive mass"},
       [] {
         json c = base_config("lower-bound");
         c["initial"]["q0"] = 0.01;
         c["initial"]["velocity"] = "none";
         c["grid"]["N"] = 2048;
         c["solver"]["t_final"] = 500.0;
         c["solver"]["snapshots"]["linear"] = 500;
         c["analysis"]["k_max"] = 1;
         c["diagnostics"] = {"mass-drift", "cauchy-schwarz", "f-inequality", "lower-bound-rho", "lower-bound-u"};
         return c;
       }},
      {{"vorticity-2d", "Stretched-exponential decay of the vorticity in two dimensions"},
       [] {
         json c = base_config("vorticity-2d");
         c["n"] = 2;
         c["grid"]["N"] = 256;
         c["initial"]["velocity"] = "rotational";
         c["solver"]["t_final"] = 40.0;
         c["solver"]["snapshots"]["linear"] = 40;
         c["analysis"]["k_max"] = 1;
         c["analysis"]["fit_lo"] = 1.0;
         c["diagnostics"] = {"vorticity-rate", "vorticity-residual", "irrotational-vorticity"};
         return c;
       }},
      {{"vorticity-3d", "Vorticity decay on a small three-dimensional box"},
       [] {
         json c = base_config("vorticity-3d");
         c["n"] = 3;
         c["grid"]["N"] = 64;
         c["initial"]["R"] = 8.0;
         c["initial"]["velocity"] = "rotational";
         c["solver"]["t_final"] = 8.0;
         c["solver"]["snapshots"]["linear"] = 16;
         c["analysis"]["k_max"] = 1;
         c["analysis"]["energy_order"] = 1;
         c["analysis"]["fit_lo"] = 1.0;
         c["diagnostics"] = {"vorticity-rate", "vorticity-residual", "irrotational-vorticity"};
         return c;
       }},
      {{"convolution-lemma", "Boundedness of the time-convolution ratio by adaptive quadrature"},
       [] {
         json c = base_config("convolution-lemma");
         c["params"] = {{"pairs", {{2.0, 1.0}, {1.5, 1.5}, {3.0, 0.5}}},
                        {"t_short", {1.0, 10.0, 100.0, 1000.0}},
                        {"t_long", {1.0, 10.0, 100.0, 1000.0, 1e4}},
                        {"rel_tol", 0.1}};
         c["diagnostics"] = {"convolution-a2-b1", "convolution-a1.5-b1.5", "convolution-a3-b0.5"};
         return c;
       }},
      {{"blowup-scout", "Undamped moderate data; the monitor should flag gradient blow-up"},
       [] {
         json c = base_config("blowup-scout");
         c["damping"]["mu"] = 0.0;
         c["initial"]["eps"] = 0.5;
         c["initial"]["sobolev_order"] = 0;
         c["grid"]["N"] = 1024;
         c["solver"]["t_final"] = 40.0;
         c["solver"]["snapshots"]["linear"] = 40;
         c["solver"]["monitor_stride"] = 1;
         c["analysis"]["k_max"] = 1;
         c["params"] = {{"expect", "blowup"}};
         c["diagnostics"] = {"blowup"};
         return c;
       }},
  };
  return r;
}

}  // namespace

const std::vector<PresetInfo>& presets() {
  static const std::vector<PresetInfo> list = [] {
    std::vector<PresetInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
  }();
  return list;
}

nlohmann::json preset_config(std::string_view name) {
  for (const auto& e : registry())
    if (e.info.name == name) return e.make();
  throw ConfigError("scenario", "unknown preset '" + std::string(name) + "'");
}

}  // namespace tdeuler
