#include "tdeuler/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "tdeuler/euler.hpp"
#include "tdeuler/linear.hpp"
#include "tdeuler/snapshot_io.hpp"

namespace tdeuler {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

double pnum(const json& p, const std::string& key, double def) {
  if (!p.contains(key)) return def;
  if (!p[key].is_number()) throw ConfigError("params." + key, "expected a number");
  return p[key].get<double>();
}

int pint(const json& p, const std::string& key, int def) {
  if (!p.contains(key)) return def;
  if (!p[key].is_number_integer()) throw ConfigError("params." + key, "expected an integer");
  return p[key].get<int>();
}

std::vector<double> pvec(const json& p, const std::string& key, std::vector<double> def) {
  if (!p.contains(key)) return def;
  const json& a = p[key];
  if (!a.is_array() || a.empty()) throw ConfigError("params." + key, "expected a nonempty array of numbers");
  std::vector<double> out;
  for (const auto& x : a) {
    if (!x.is_number()) throw ConfigError("params." + key, "expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Kernel pkernel(const json& p) {
  const int k = pint(p, "kernel", 1);
  if (k != 1 && k != 2) throw ConfigError("params.kernel", "must be 1 or 2");
  return k == 1 ? Kernel::Phi1 : Kernel::Phi2;
}

int next_pow2(double x) {
  const auto n = static_cast<unsigned long>(std::max(16.0, std::ceil(x)));
  return static_cast<int>(std::bit_ceil(n));
}

json hashed_view(const json& cfg) {
  json h = cfg;
  if (h.contains("output") && h["output"].is_object()) h["output"].erase("dir");
  return h;
}

struct Ctx {
  ScenarioConfig c;
  Report rep;
  fs::path dir;
  bool write = true;

  bool wants(const std::string& id) const {
    return std::find(c.diagnostics.begin(), c.diagnostics.end(), id) != c.diagnostics.end();
  }

  void add(Verdict v) { rep.verdicts.push_back(std::move(v)); }

  void emit(const std::string& name, const std::string& content) {
    rep.files.push_back(name);
    if (!write) return;
    std::ofstream os(dir / name, std::ios::binary);
    os << content;
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  }

  double fit_lo() const { return c.analysis.fit_lo < 0.0 ? c.solver.t_final / 10.0 : c.analysis.fit_lo; }
  double fit_hi() const { return c.analysis.fit_hi < 0.0 ? c.solver.t_final : c.analysis.fit_hi; }

  std::optional<FitResult> fit(const std::string& name, const std::vector<double>& t,
                               const std::vector<double>& y, double lo, double hi,
                               Abscissa kind = Abscissa::LogOnePlusT) {
    try {
      FitResult f = decay_fit(t, y, lo, hi, kind, c.damping.lambda);
      rep.fits[name] = to_json(f);
      for (const auto& w : f.warnings) rep.warnings.push_back(name + ": " + w);
      return f;
    } catch (const FitError& e) {
      rep.warnings.push_back(name + ": " + e.what());
      return std::nullopt;
    }
  }
};

Verdict slope_verdict(const std::string& q, const std::optional<FitResult>& f, double predicted,
                      double tol, const std::string& relation = "abs") {
  if (!f) return make_verdict(q, kNaN, predicted, tol, relation, 0.0, 0.0, 0.0, "fit failed");
  return make_verdict(q, f->slope, predicted, tol, relation, f->rms, f->t_lo, f->t_hi);
}

// ---------------------------------------------------------------- linear

void run_linear_decay(Ctx& x) {
  const auto& c = x.c;
  const json& p = c.params;
  const double Rg = pnum(p, "g_radius", 2.0);
  const double t_min = pnum(p, "t_min", 100.0);
  const double t_max = pnum(p, "t_max", 1e4);
  const int samples = pint(p, "samples", 17);
  const double dx = pnum(p, "dx", 1.0);
  const double wf = pnum(p, "width_factor", 4.0);
  const double negligible = pnum(p, "negligible", 1e-12);
  if (!(c.damping.mu > 0.0)) throw ConfigError("damping.mu", "linear-decay needs mu > 0");
  if (!(t_min > 0.0 && t_max > t_min)) throw ConfigError("params.t_min", "need 0 < t_min < t_max");
  if (samples < 8) throw ConfigError("params.samples", "need at least 8 samples for a fit");
  if (!(Rg > 0.0 && dx > 0.0 && wf > 0.0)) throw ConfigError("params", "g_radius, dx, width_factor must be positive");

  // the low-frequency packet is close to a Gaussian of width w; periodic
  // images at distance 2L then contribute exp(-2 width_factor^2)
  const double lam = c.damping.lambda;
  const double w = std::sqrt(2.0 * std::pow(1.0 + t_max, 1.0 + lam) / (c.damping.mu * (1.0 + lam)));
  const double L_min = std::max(wf * w, 4.0 * Rg);
  double L = c.L > 0.0 ? c.L : L_min;
  int N = c.N;
  if (N == 0) {
    N = next_pow2(2.0 * L / dx);
    if (c.L == 0.0) L = N * dx / 2.0;
  }
  const Grid grid(c.n, L, N);

  ScalarField g = grid.zeros();
  for (std::size_t i = 0; i < grid.size(); ++i) g[i] = bump_profile(grid.radius(i) / Rg);

  std::vector<double> times(samples);
  for (int i = 0; i < samples; ++i) times[i] = t_min * std::pow(t_max / t_min, double(i) / (samples - 1));
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<KernelNorm> norms{{0, inf}, {1, inf}};
  KernelDecayOptions opt;
  opt.kernel = pkernel(p);
  opt.negligible = negligible;
  const KernelDecayResult res = kernel_decay_check(g, times, norms, grid, c.damping, opt);
  for (const auto& wmsg : res.warnings) x.rep.warnings.push_back(wmsg);

  std::ostringstream csv;
  csv.precision(17);
  csv << "t,k,p,observed,resolved,tail,envelope\n";
  std::vector<std::vector<double>> resolved(norms.size()), ratio(norms.size());
  for (std::size_t i = 0; i < res.samples.size(); ++i) {
    const auto& s = res.samples[i];
    csv << s.t << ',' << s.k << ",inf," << s.observed << ',' << s.resolved << ',' << s.tail << ','
        << s.envelope << '\n';
    resolved[i % norms.size()].push_back(s.resolved);
    ratio[i % norms.size()].push_back(s.observed / s.envelope);
  }
  x.emit("kernel.csv", csv.str());
  x.rep.extra["grid"] = {{"L", L}, {"N", N}};
  x.rep.extra["modes"] = {{"integrated", res.modes_integrated},
                          {"skipped", res.modes_skipped},
                          {"dropped", res.modes_dropped}};

  for (std::size_t j = 0; j < norms.size(); ++j) {
    const int k = norms[j].k;
    const std::string id = "kernel-slope-k" + std::to_string(k);
    const auto f = x.fit(id, times, resolved[j], t_min, t_max);
    if (x.wants(id))
      x.add(slope_verdict(id, f, -kernel_envelope_exponent(k, inf, c.n, c.damping), 0.05));
  }
  if (x.wants("kernel-upper-bound")) {
    const auto f = x.fit("kernel-upper-bound", times, ratio[0], t_min, t_max);
    x.add(slope_verdict("kernel-upper-bound", f, 0.0, 0.05, "le"));
  }
}

void run_zone_bounds(Ctx& x) {
  const auto& c = x.c;
  const auto& d = c.damping;
  const json& p = c.params;
  const double C0 = pnum(p, "C0", 0.5);
  const Kernel which = pkernel(p);
  const double t_max = pnum(p, "t_max", 100.0);
  const int nt = pint(p, "nt", 20);
  const int nr = pint(p, "nr", 20);
  const std::vector<double> z3_r = pvec(p, "z3_r", {2.0, 4.0});
  const int z3_samples = pint(p, "z3_samples", 40);
  if (!(C0 > 0.0)) throw ConfigError("params.C0", "must be positive");
  if (!(d.mu > 0.0 && d.lambda > 0.0)) throw ConfigError("damping", "zone bounds need lambda > 0 and mu > 0");
  if (nt < 2 || nr < 2) throw ConfigError("params.nt", "nt and nr must be >= 2");
  if (z3_samples < 8) throw ConfigError("params.z3_samples", "need at least 8 samples");

  std::vector<ModeTableRow> rows;
  auto record = [&](double t, double r, Zone expect, std::vector<ModeTableRow>* out) {
    const PropagatorSample ph = fundamental_pair(t, r, d);
    const ZoneBoundReport z = zone_bound_check(t, r, ph, C0, d, which);
    if (z.zone != expect) return 0.0;
    if (out) out->push_back({t, r, z.zone, ph.phi1, ph.phi2, z.bound_shape, z.ratio});
    return z.ratio;
  };

  auto z1_max = [&](int mt, int mr, std::vector<ModeTableRow>* out) {
    double worst = 0.0;
    for (int i = 0; i < mt; ++i) {
      const double t = std::pow(1.0 + t_max, double(i) / (mt - 1)) - 1.0;
      const double thr = zone_threshold(t, d);
      for (int j = 0; j < mr; ++j) worst = std::max(worst, record(t, thr * j / (mr - 1), Zone::Z1, out));
    }
    return worst;
  };
  auto z2_max = [&](int mt, int mr, std::vector<ModeTableRow>* out) {
    double worst = 0.0;
    const double r_top = std::min(d.mu / 4.0, 1.0);
    for (int j = 1; j <= mr; ++j) {
      const double r = r_top * j / mr;
      const double txi = t_xi(r, d);
      if (txi >= t_max) continue;
      const double span = (1.0 + t_max) / (1.0 + txi);
      for (int i = 1; i < mt; ++i)
        worst = std::max(worst, record((1.0 + txi) * std::pow(span, double(i) / (mt - 1)) - 1.0, r, Zone::Z2, out));
    }
    return worst;
  };

  // the sup sits on the zone edge, so the grid max creeps upward under
  // refinement; stability means the last refinement moved it by < 5%
  const int levels = pint(p, "levels", 3);
  if (levels < 2) throw ConfigError("params.levels", "need at least two refinement levels");
  auto refine = [&](auto&& zmax, const std::string& id) {
    std::vector<double> m;
    int mt = nt, mr = nr;
    for (int l = 0; l < levels; ++l) {
      m.push_back(zmax(mt, mr, l + 1 == levels ? &rows : nullptr));
      mt = 2 * mt - 1;
      mr = 2 * mr - 1;
    }
    const double prev = m[m.size() - 2], last = m.back();
    std::string seq;
    for (double v : m) seq += (seq.empty() ? "" : " -> ") + fmt(v);
    if (x.wants(id))
      x.add(make_verdict(id, std::abs(last - prev) / prev, 0.0, 0.05, "le", 0.0, 0.0, t_max,
                         "C0=" + fmt(C0) + "; max ratio per level " + seq + "; fitted = last relative change"));
  };
  refine(z1_max, "zone1-ratio");
  refine(z2_max, "zone2-ratio");

  // Z3: amplitude sqrt(E)/r against (1+t)^(1-lambda)
  double worst_rate = -std::numeric_limits<double>::infinity();
  std::string rates;
  for (double r : z3_r) {
    if (!(r > 1.0)) throw ConfigError("params.z3_r", "Z3 frequencies must exceed 1");
    ModePropagator prop(r, 0.0, d);
    std::vector<double> ts, amp;
    for (int i = 0; i < z3_samples; ++i) {
      const double t = 1.0 + (t_max - 1.0) * i / (z3_samples - 1);
      const PropagatorSample& ph = prop.advance_to(t);
      ts.push_back(t);
      amp.push_back(std::sqrt(prop.energy(which)) / r);
      const ZoneBoundReport z = zone_bound_check(t, r, ph, C0, d, which);
      rows.push_back({t, r, z.zone, ph.phi1, ph.phi2, z.bound_shape, z.ratio});
    }
    const auto f = x.fit("zone3-r" + fmt(r), ts, amp, 1.0, t_max, Abscissa::PowerOneMinusLambda);
    const double slope = f ? f->slope : kNaN;
    worst_rate = std::isnan(slope) ? slope : std::max(worst_rate, slope);
    rates += (rates.empty() ? "" : ", ") + ("r=" + fmt(r) + ": " + fmt(slope));
  }
  if (x.wants("zone3-rate"))
    x.add(make_verdict("zone3-rate", worst_rate, 0.0, 0.0, "lt", 0.0, 1.0, t_max,
                       "slowest exponential rate against (1+t)^(1-lambda); " + rates +
                           "; damping alone gives " + fmt(-d.mu / (2.0 * (1.0 - d.lambda)))));

  std::ostringstream csv;
  write_mode_table(csv, rows);
  x.emit("modes.csv", csv.str());
}

double three_point_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double a = std::log1p(t[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void run_zone_integrals(Ctx& x) {
  const auto& c = x.c;
  const json& p = c.params;
  const std::vector<double> times = pvec(p, "times", {10.0, 100.0, 1000.0});
  const std::vector<double> alphas_d = pvec(p, "alphas", {0.0, 2.0});
  const int pn = pint(p, "p", 1);
  const double bound = pnum(p, "ratio_bound", 3.0);
  const double gap_tol = pnum(p, "gap_rel_tol", 0.2);
  if (times.size() < 2) throw ConfigError("params.times", "need at least two times");
  ZoneIntegralOptions opt;
  opt.kernel = pkernel(p);

  std::ostringstream csv;
  csv.precision(17);
  csv << "alpha,t,value,error,envelope,ratio\n";
  std::vector<double> slopes;
  for (double ad : alphas_d) {
    const int alpha = static_cast<int>(ad);
    if (alpha != ad || alpha < 0) throw ConfigError("params.alphas", "orders must be nonnegative integers");
    const double e = zone_integral_exponent(alpha, pn, c.n, c.damping);
    std::vector<double> vals;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double t : times) {
      const ZoneIntegralResult z = zone_integral(t, alpha, Zone::Z1, pn, c.damping, c.n, opt);
      const double env = std::pow(1.0 + t, -e);
      const double ratio = z.value / env;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      vals.push_back(z.value);
      csv << alpha << ',' << t << ',' << z.value << ',' << z.error << ',' << env << ',' << ratio << '\n';
    }
    const double slope = three_point_slope(times, vals);
    slopes.push_back(slope);
    const std::string id = "zone-integral-ratio-a" + std::to_string(alpha);
    if (x.wants(id))
      x.add(make_verdict(id, hi / lo, bound, 0.0, "le", 0.0, times.front(), times.back(),
                         "max/min of value*(1+t)^" + fmt(e) + "; local slope " + fmt(slope) +
                             " against predicted " + fmt(-e)));
  }
  x.emit("zones.csv", csv.str());
  if (x.wants("zone-integral-alpha-gap")) {
    const int a0 = static_cast<int>(alphas_d.front()), a1 = static_cast<int>(alphas_d.back());
    const double predicted =
        zone_integral_exponent(a1, pn, c.n, c.damping) - zone_integral_exponent(a0, pn, c.n, c.damping);
    const double gap = slopes.front() - slopes.back();
    x.add(make_verdict("zone-integral-alpha-gap", gap, predicted, gap_tol * std::abs(predicted), "abs", 0.0,
                       times.front(), times.back(),
                       "slope(alpha=" + std::to_string(a0) + ") - slope(alpha=" + std::to_string(a1) + ")"));
  }
}

void run_convolution(Ctx& x) {
  const json& p = x.c.params;
  const std::vector<double> ts = pvec(p, "t_short", {1.0, 10.0, 100.0, 1000.0});
  const std::vector<double> tl = pvec(p, "t_long", {1.0, 10.0, 100.0, 1000.0, 1e4});
  const double tol = pnum(p, "rel_tol", 0.1);
  if (!p.contains("pairs") || !p["pairs"].is_array()) throw ConfigError("params.pairs", "expected [[a, b], ...]");
  json table = json::array();
  for (const auto& pr : p["pairs"]) {
    if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number() || !pr[1].is_number())
      throw ConfigError("params.pairs", "each pair must be [a, b]");
    const double a = pr[0].get<double>(), b = pr[1].get<double>();
    const std::string id = "convolution-a" + fmt(a) + "-b" + fmt(b);
    ConvolutionOracle s, l;
    try {
      s = convolution_oracle(a, b, ts);
      l = convolution_oracle(a, b, tl);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("params.pairs", e.what());
    }
    table.push_back({{"a", a}, {"b", b}, {"max_short", s.max_ratio}, {"max_long", l.max_ratio}, {"ratios", l.ratio}});
    if (x.wants(id))
      x.add(make_verdict(id, std::abs(l.max_ratio - s.max_ratio) / s.max_ratio, tol, 0.0, "lt", 0.0, ts.front(),
                         tl.back(), "max ratio " + fmt(s.max_ratio) + " -> " + fmt(l.max_ratio)));
  }
  x.rep.extra["convolution"] = table;
}

// ---------------------------------------------------------------- solver

struct Trajectory {
  std::vector<EnergyRow> rows;
  RunResult result;
  Grid grid;
  std::string breakdown;  // set when the state lost positivity
};

Grid solver_grid(const ScenarioConfig& c) {
  const double L = c.L > 0.0 ? c.L : c.initial.R + c.solver.t_final + 2.0;
  const int N = c.N > 0 ? c.N : next_pow2(2.0 * L);
  return Grid(c.n, L, N);
}

Trajectory simulate(Ctx& x, InitialDataSpec init, bool with_Q, const std::string& tag, bool allow_breakdown) {
  const auto& c = x.c;
  Trajectory tr;
  tr.grid = solver_grid(c);
  const int order = init.sobolev_order >= 0 ? init.sobolev_order : default_sobolev_order(c.weight);
  EulerState s0;
  try {
    s0 = initial_bump(init, tr.grid, c.gas, order);
  } catch (const ParameterError& e) {
    throw ConfigError("initial", e.what());
  }
  EulerSolver solver(tr.grid, c.damping, c.gas, c.solver);
  RowOptions ro;
  ro.k_max = c.analysis.k_max;
  ro.energy_order = c.analysis.energy_order;
  ro.ball_radius_base = c.initial.R + c.analysis.ball_margin;
  ro.with_Q = with_Q;

  const bool snaps = c.write_snapshots && tag.empty();
  if (snaps && x.write) fs::create_directories(x.dir / "snapshots");
  int count = 0;
  auto observer = [&](const EulerState& s) {
    tr.rows.push_back(energy_row(solver, s, c.gas, c.damping, c.weight, ro));
    if (snaps) {
      char name[64];
      std::snprintf(name, sizeof(name), "snapshots/snap_%05d.%s", count,
                    c.snapshot_format == SnapshotFormat::Binary ? "bin" : "csv");
      x.rep.files.push_back(name);
      if (x.write)
        write_snapshot(x.dir / name, s, tr.grid, c.gas, c.damping, c.snapshot_format, c.snapshot_rho);
    }
    ++count;
  };
  try {
    tr.result = solver.run(s0, observer);
  } catch (const VacuumError& e) {
    if (!allow_breakdown) throw;
    tr.breakdown = e.what();
    tr.result.blowup.smooth = false;
    tr.result.blowup.t_star = tr.rows.empty() ? 0.0 : tr.rows.back().t;
    tr.result.blowup.reason = std::string("vacuum: ") + e.what();
  }

  std::ostringstream csv;
  write_energy_csv(csv, tr.rows, c.analysis.k_max);
  x.emit(tag.empty() ? "energy.csv" : "energy_" + tag + ".csv", csv.str());
  const std::string key = tag.empty() ? "run" : "run_" + tag;
  x.rep.extra[key] = {{"L", tr.grid.half_length()},
                      {"N", tr.grid.points()},
                      {"steps", tr.result.steps},
                      {"snapshots", tr.rows.size()},
                      {"smooth", tr.result.blowup.smooth},
                      {"t_star", tr.result.blowup.t_star},
                      {"reason", tr.result.blowup.reason}};
  if (!tr.result.blowup.smooth && !allow_breakdown)
    x.rep.warnings.push_back(key + " stopped early at t=" + fmt(tr.result.blowup.t_star) + ": " +
                             tr.result.blowup.reason);
  return tr;
}

template <class F>
std::vector<double> column(const std::vector<EnergyRow>& rows, F f) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(f(r));
  return out;
}

double early_ratio(const std::vector<double>& t, const std::vector<double>& y) {
  double early = 0.0, all = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= 1.0) early = std::max(early, y[i]);
    all = std::max(all, y[i]);
  }
  return early > 0.0 ? all / early : kNaN;
}

void run_solver_family(Ctx& x) {
  const auto& c = x.c;
  const auto& d = c.damping;
  const double lam = d.lambda;
  const int n = c.n;
  const bool scout = c.scenario == "blowup-scout";
  const bool needs_Q = x.wants("q-l1-slope") || x.wants("q-eps-scaling");

  const Trajectory tr = simulate(x, c.initial, needs_Q, "", scout);
  const auto& rows = tr.rows;
  const auto t = column(rows, [](const EnergyRow& r) { return r.t; });
  const double lo = x.fit_lo(), hi = x.fit_hi();

  std::optional<FitResult> f_rho, f_u, f_drho;
  if (x.wants("rho-linf-slope") || x.wants("slope-difference"))
    f_rho = x.fit("rho-linf", t, column(rows, [](const EnergyRow& r) { return r.rho_linf[0]; }), lo, hi);
  if (x.wants("u-linf-slope") || x.wants("slope-difference") || x.wants("u-minus-drho-slope"))
    f_u = x.fit("u-linf", t, column(rows, [](const EnergyRow& r) { return r.u_linf[0]; }), lo, hi);
  if (x.wants("u-minus-drho-slope"))
    f_drho = x.fit("drho-linf", t, column(rows, [](const EnergyRow& r) { return r.rho_linf[1]; }), lo, hi);

  if (x.wants("rho-linf-slope")) x.add(slope_verdict("rho-linf-slope", f_rho, -(1.0 - lam) * n / 2.0, 0.08));
  if (x.wants("u-linf-slope"))
    x.add(slope_verdict("u-linf-slope", f_u, -(1.0 - lam) * (n + 1) / 2.0 + lam, 0.08));
  if (x.wants("slope-difference")) {
    const double diff = f_rho && f_u ? f_rho->slope - f_u->slope : kNaN;
    x.add(make_verdict("slope-difference", diff, (1.0 - lam) / 2.0 - lam, 0.05, "abs", 0.0, lo, hi,
                       "slope(rho-1) - slope(u)"));
  }
  if (x.wants("u-minus-drho-slope")) {
    const double diff = f_u && f_drho ? f_u->slope - f_drho->slope : kNaN;
    x.add(make_verdict("u-minus-drho-slope", diff, lam, 0.08, "abs", 0.0, lo, hi, "slope(u) - slope(d_x rho)"));
  }
  if (x.wants("energy-low-bounded"))
    x.add(make_verdict("energy-low-bounded", early_ratio(t, column(rows, [](const EnergyRow& r) { return r.energy_low; })),
                       10.0, 0.0, "le", 0.0, 0.0, c.solver.t_final, "max over the run / max over [0, 1]"));
  if (x.wants("energy-high-bounded"))
    x.add(make_verdict("energy-high-bounded",
                       early_ratio(t, column(rows, [](const EnergyRow& r) { return r.energy_high; })), 10.0, 0.0,
                       "le", 0.0, 0.0, c.solver.t_final, "max over the run / max over [0, 1]"));

  if (x.wants("q-l1-slope")) {
    const auto f = x.fit("q-l1", t, column(rows, [](const EnergyRow& r) { return r.Q_l1; }), lo, hi);
    x.add(slope_verdict("q-l1-slope", f, q_predicted_slope(c.weight, d), 0.15, "le"));
  }
  if (x.wants("q-eps-scaling")) {
    InitialDataSpec twice = c.initial;
    twice.eps *= 2.0;
    const Trajectory tr2 = simulate(x, twice, true, "eps2", false);
    double worst = kNaN, rmin = kNaN, rmax = kNaN;
    for (std::size_t i = 0; i < rows.size() && i < tr2.rows.size(); ++i) {
      if (rows[i].t < lo || rows[i].t > hi) continue;
      const double r = tr2.rows[i].Q_l1 / rows[i].Q_l1;
      if (std::isnan(worst) || std::abs(r - 4.0) > std::abs(worst - 4.0)) worst = r;
      rmin = std::isnan(rmin) ? r : std::min(rmin, r);
      rmax = std::isnan(rmax) ? r : std::max(rmax, r);
    }
    x.add(make_verdict("q-eps-scaling", worst, 4.0, 0.6, "abs", 0.0, lo, hi,
                       "|Q|_1(2 eps) / |Q|_1(eps), worst over the window; range [" + fmt(rmin) + ", " +
                           fmt(rmax) + "]"));
  }

  const double q0 = c.initial.q0.value_or(0.0);
  if (x.wants("mass-drift")) {
    const double M0 = rows.front().M;
    double drift = 0.0;
    for (const auto& r : rows) drift = std::max(drift, std::abs(r.M - M0));
    const bool rel = M0 != 0.0;
    x.add(make_verdict("mass-drift", rel ? drift / std::abs(M0) : drift, 1e-8, 0.0, "lt", 0.0, 0.0,
                       c.solver.t_final, (rel ? "relative" : "absolute") + std::string(" drift of M; M(0)=") + fmt(M0)));
  }
  if (x.wants("cauchy-schwarz")) {
    const double r = q0 > 0.0 ? cauchy_schwarz_ratio(t, column(rows, [](const EnergyRow& e) { return e.rho_l2[0]; }),
                                                     q0, c.initial.R, n)
                               : kNaN;
    x.add(make_verdict("cauchy-schwarz", r, 1.0, 0.0, "le", 0.0, 0.0, c.solver.t_final,
                       "worst q0 / (|rho-1|_2 |B(R+t)|^(1/2))"));
  }
  if (x.wants("f-inequality")) {
    const FInequality fi = f_inequality(t, column(rows, [](const EnergyRow& r) { return r.F; }), q0, n, d);
    x.add(make_verdict("f-inequality", fi.worst_ratio, 1.0, 0.05, "ge", 0.0, 0.0, c.solver.t_final,
                       "min over snapshots of (F' + b F) / (n q0)"));
  }
  if (x.wants("lower-bound-rho") || x.wants("lower-bound-u")) {
    const LowerBoundMargins m =
        lower_bound_margin(t, column(rows, [](const EnergyRow& r) { return r.rho_l2[0]; }),
                           column(rows, [](const EnergyRow& r) { return r.u_l2[0]; }), q0, c.initial.R, n,
                           c.analysis.t0);
    const double rho = m.declined ? kNaN : m.inf_rho;
    const double u = m.declined ? kNaN : m.inf_u;
    const std::string note = m.declined ? m.note : "infimum of the margin over [t0, T], L2 norms";
    if (x.wants("lower-bound-rho"))
      x.add(make_verdict("lower-bound-rho", rho, 0.0, 0.0, "gt", 0.0, c.analysis.t0, c.solver.t_final, note));
    if (x.wants("lower-bound-u"))
      x.add(make_verdict("lower-bound-u", u, 0.0, 0.0, "gt", 0.0, c.analysis.t0, c.solver.t_final, note));
  }

  if (x.wants("vorticity-rate") || x.wants("vorticity-residual")) {
    if (n == 1) throw ConfigError("n", "vorticity diagnostics need n >= 2");
    const auto f = x.fit("vorticity", t, column(rows, [](const EnergyRow& r) { return r.omega_l2; }), lo, hi,
                         Abscissa::PowerOneMinusLambda);
    const double pred = -d.mu / (1.0 - lam);
    if (x.wants("vorticity-rate")) x.add(slope_verdict("vorticity-rate", f, pred, 0.2 * std::abs(pred)));
    if (x.wants("vorticity-residual"))
      x.add(make_verdict("vorticity-residual", f ? f->rms : kNaN, 0.1, 0.0, "lt", 0.0, lo, hi,
                         "rms residual of log|omega|_2 against (1+t)^(1-lambda)"));
  }
  if (x.wants("irrotational-vorticity")) {
    InitialDataSpec irr = c.initial;
    irr.velocity = VelocityKind::Irrotational;
    const Trajectory tr2 = simulate(x, irr, false, "irrotational", false);
    double worst = 0.0;
    for (const auto& r : tr2.rows)
      if (r.grad_u_l2 > 0.0) worst = std::max(worst, r.omega_l2 / r.grad_u_l2);
    x.add(make_verdict("irrotational-vorticity", worst, 1e-10, 0.0, "lt", 0.0, 0.0, c.solver.t_final,
                       "max |omega|_2 / |grad u|_2 for irrotational data"));
  }

  if (x.wants("blowup")) {
    const std::string expect = c.params.value("expect", std::string("blowup"));
    if (expect != "blowup" && expect != "smooth") throw ConfigError("params.expect", "must be blowup or smooth");
    const bool flagged = !tr.result.blowup.smooth;
    x.add(make_verdict("blowup", flagged ? 1.0 : 0.0, expect == "blowup" ? 1.0 : 0.0, 0.0, "abs", 0.0,
                       flagged ? tr.result.blowup.t_star : c.solver.t_final, c.solver.t_final,
                       flagged ? "flagged at t=" + fmt(tr.result.blowup.t_star) + ": " + tr.result.blowup.reason
                               : std::string("smooth over the whole window")));
  }
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + '"';
}

std::string value_text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

// ---------------------------------------------------------------- Report

bool Report::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

json Report::to_json() const {
  json v = json::array();
  for (const auto& x : verdicts) v.push_back(tdeuler::to_json(x));
  return json{{"scenario", scenario}, {"hash", hash},         {"config", config},
              {"verdicts", v},        {"fits", fits},         {"warnings", warnings},
              {"files", files},       {"extra", extra},       {"status", all_pass() ? "pass" : "fail"}};
}

Report Report::from_json(const json& j) {
  Report r;
  r.scenario = j.at("scenario").get<std::string>();
  r.hash = j.at("hash").get<std::string>();
  r.config = j.at("config");
  auto num = [](const json& x) { return x.is_number() ? x.get<double>() : kNaN; };
  for (const auto& v : j.at("verdicts")) {
    Verdict x;
    x.quantity = v.at("quantity").get<std::string>();
    x.fitted = num(v.at("fitted"));
    x.predicted = num(v.at("predicted"));
    x.tolerance = num(v.at("tolerance"));
    x.relation = v.at("relation").get<std::string>();
    x.residual = num(v.at("residual"));
    x.t_lo = num(v.at("window")[0]);
    x.t_hi = num(v.at("window")[1]);
    x.note = v.at("note").get<std::string>();
    x.pass = v.at("verdict").get<std::string>() == "pass";
    r.verdicts.push_back(std::move(x));
  }
  r.fits = j.value("fits", json::object());
  r.warnings = j.value("warnings", std::vector<std::string>{});
  r.files = j.value("files", std::vector<std::string>{});
  r.extra = j.value("extra", json::object());
  return r;
}

fs::path run_directory(const json& cfg) {
  const std::string dir = cfg.contains("output") ? cfg["output"].value("dir", std::string("runs")) : "runs";
  return fs::path(dir) / (cfg.at("scenario").get<std::string>() + "-" + config_hash(hashed_view(cfg)));
}

Report run_scenario(const json& cfg, const RunOptions& opt) {
  Ctx x;
  x.c = parse_config(cfg);
  x.write = opt.write_files;
  x.rep.scenario = x.c.scenario;
  x.rep.hash = config_hash(hashed_view(cfg));
  x.rep.config = cfg;
  x.dir = run_directory(cfg);
  if (x.write) fs::create_directories(x.dir);

  x.emit("config.json", cfg.dump(2) + "\n");
  const std::string& s = x.c.scenario;
  if (s == "linear-decay") {
    run_linear_decay(x);
  } else if (s == "zone-bounds") {
    run_zone_bounds(x);
  } else if (s == "zone-integrals") {
    run_zone_integrals(x);
  } else if (s == "convolution-lemma") {
    run_convolution(x);
  } else {
    run_solver_family(x);
  }

  x.rep.files.push_back("fits.json");
  x.rep.files.push_back("report.json");
  x.rep.files.push_back("summary.txt");
  if (x.write) {
    json fits = json::array();
    for (const auto& v : x.rep.verdicts) {
      json rec = to_json(v);
      rec["slope"] = rec["fitted"];
      fits.push_back(rec);
    }
    std::ofstream(x.dir / "fits.json") << json{{"verdicts", fits}, {"fits", x.rep.fits}}.dump(2) << "\n";
    std::ofstream(x.dir / "report.json") << x.rep.to_json().dump(2) << "\n";
    std::ofstream(x.dir / "summary.txt") << render_summary(x.rep);
  }
  return x.rep;
}

std::string render_summary(const Report& r) {
  std::ostringstream os;
  const auto npass = std::count_if(r.verdicts.begin(), r.verdicts.end(), [](const Verdict& v) { return v.pass; });
  os << "scenario " << r.scenario << " (" << r.hash << ")\n";
  os << "verdicts: " << npass << " pass, " << r.verdicts.size() - npass << " fail\n";
  for (const auto& v : r.verdicts) {
    os << "  [" << (v.pass ? "PASS" : "FAIL") << "] " << v.quantity << ": fitted " << fmt(v.fitted);
    if (v.relation == "abs")
      os << ", predicted " << fmt(v.predicted) << " +/- " << fmt(v.tolerance);
    else if (v.relation == "le")
      os << ", needs <= " << fmt(v.predicted + v.tolerance);
    else if (v.relation == "ge")
      os << ", needs >= " << fmt(v.predicted - v.tolerance);
    else if (v.relation == "lt")
      os << ", needs < " << fmt(v.predicted);
    else
      os << ", needs > " << fmt(v.predicted);
    if (v.t_hi > 0.0) os << ", window [" << fmt(v.t_lo) << ", " << fmt(v.t_hi) << "]";
    if (v.residual != 0.0) os << ", rms " << fmt(v.residual);
    os << '\n';
    if (!v.note.empty()) os << "         " << v.note << '\n';
  }
  if (!r.warnings.empty()) {
    os << "warnings:\n";
    for (const auto& w : r.warnings) os << "  - " << w << '\n';
  }
  os << "files:";
  for (const auto& f : r.files)
    if (f.rfind("snapshots/", 0) != 0) os << ' ' << f;
  const auto nsnap = std::count_if(r.files.begin(), r.files.end(),
                                   [](const std::string& f) { return f.rfind("snapshots/", 0) == 0; });
  if (nsnap > 0) os << " (+" << nsnap << " snapshots)";
  os << '\n';
  return os.str();
}

Report rerender_report(const fs::path& dir) {
  std::ifstream is(dir / "report.json");
  if (!is) throw std::runtime_error("no report.json in " + dir.string());
  const Report r = Report::from_json(json::parse(is));
  std::ofstream(dir / "summary.txt") << render_summary(r);
  return r;
}

// ---------------------------------------------------------------- sweep

std::string axis_path(const std::string& key) {
  if (key == "lambda") return "damping.lambda";
  if (key == "mu") return "damping.mu";
  if (key == "eps") return "initial.eps";
  if (key == "N") return "grid.N";
  if (key == "delta") return "delta";
  throw ConfigError("axis", "unknown sweep axis '" + key + "' (use lambda, mu, eps, N or delta)");
}

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("axis", "expected key=v1,v2,... (got '" + spec + "')");
  SweepAxis a;
  a.key = spec.substr(0, eq);
  axis_path(a.key);
  std::stringstream ss(spec.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    json v = json::parse(item, nullptr, false);
    if (v.is_discarded() || !v.is_number()) throw ConfigError(a.key, "sweep values must be numbers (got '" + item + "')");
    // "mu=1" must hash like 1.0; only N stays integral
    if (a.key == "N") {
      if (!v.is_number_integer()) throw ConfigError(a.key, "grid size must be an integer (got '" + item + "')");
      a.values.push_back(v);
    } else {
      a.values.push_back(v.get<double>());
    }
  }
  if (a.values.empty()) throw ConfigError(a.key, "sweep axis has no values");
  return a;
}

bool SweepResult::all_pass() const {
  return std::all_of(runs.begin(), runs.end(), [](const SweepRun& r) { return r.ok && r.report.all_pass(); });
}

bool SweepResult::any_error() const {
  return std::any_of(runs.begin(), runs.end(), [](const SweepRun& r) { return !r.ok; });
}

SweepResult sweep(const json& base, const std::vector<SweepAxis>& axes, int workers, const RunOptions& opt) {
  SweepResult res;
  res.axes = axes;
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.values.size();
  for (std::size_t i = 0; i < total; ++i) {
    SweepRun run;
    run.config = base;
    std::size_t rest = i;
    std::vector<json> point(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      point[k] = axes[k].values[rest % axes[k].values.size()];
      rest /= axes[k].values.size();
    }
    for (std::size_t k = 0; k < axes.size(); ++k) set_path(run.config, axis_path(axes[k].key), point[k]);
    run.point = std::move(point);
    res.runs.push_back(std::move(run));
  }

  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, static_cast<int>(std::max<std::size_t>(1, total)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < res.runs.size(); i = next++) {
      SweepRun& r = res.runs[i];
      try {
        r.report = run_scenario(r.config, opt);
        r.ok = true;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return res;
}

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
  std::vector<std::string> quantities;
  for (const auto& run : r.runs)
    for (const auto& v : run.report.verdicts)
      if (std::find(quantities.begin(), quantities.end(), v.quantity) == quantities.end())
        quantities.push_back(v.quantity);

  for (const auto& a : r.axes) os << a.key << ',';
  os << "scenario,hash,status,error";
  for (const auto& q : quantities) os << ',' << q;
  os << '\n';
  os.precision(17);
  for (const auto& run : r.runs) {
    for (const auto& v : run.point) os << value_text(v) << ',';
    const std::string status = !run.ok ? "error" : run.report.all_pass() ? "pass" : "fail";
    os << run.config.value("scenario", std::string()) << ',' << config_hash(hashed_view(run.config)) << ','
       << status << ',' << csv_escape(run.error);
    for (const auto& q : quantities) {
      os << ',';
      for (const auto& v : run.report.verdicts)
        if (v.quantity == q) os << v.fitted;
    }
    os << '\n';
  }
}

}  // namespace tdeuler
