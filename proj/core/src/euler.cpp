#include "tdeuler/euler.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "tdeuler/spectral.hpp"

namespace tdeuler {

namespace {

using Spectrum = Spectral::Spectrum;

// d/dx_axis of a field given by its spectrum; Nyquist entries are dropped.
void deriv(Spectral& sp, const Spectrum& fh, int axis, Spectrum& scratch, ScalarField& out) {
  const int half = sp.grid().points() / 2;
  scratch.resize(fh.size());
  for (std::size_t k = 0; k < fh.size(); ++k) {
    const int m = sp.mode(k)[axis];
    scratch[k] = std::abs(m) == half ? 0.0 : fh[k] * std::complex<double>(0.0, sp.wavenumber(k, axis));
  }
  sp.inverse(scratch, out);
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const EulerState& s) {
  for (double x : s.v)
    if (!std::isfinite(x)) return false;
  for (const auto& c : s.u)
    for (double x : c)
      if (!std::isfinite(x)) return false;
  return true;
}

// deterministic uniform in [-1, 1) from a 64-bit generator state
double unit_draw(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return 2.0 * static_cast<double>(z >> 11) * 0x1.0p-53 - 1.0;
}

}  // namespace

void validate(const SolverConfig& c) {
  if (!(c.cfl > 0.0 && c.cfl <= 0.5)) {
    std::ostringstream os;
    os << "solver cfl must satisfy 0 < cfl <= 0.5 (got " << c.cfl << ")";
    throw ParameterError(os.str());
  }
  if (!(c.t_final >= 0.0)) throw ParameterError("solver t_final must be >= 0");
  if (c.hyperviscosity < 0.0) throw ParameterError("hyperviscosity must be >= 0");
  if (c.dt_fixed < 0.0) throw ParameterError("dt_fixed must be >= 0");
  if (c.monitor_stride < 1) throw ParameterError("monitor_stride must be >= 1");
  if (!(c.blowup_gradient_factor > 1.0)) throw ParameterError("blowup_gradient_factor must be > 1");
  if (!(c.blowup_tail_fraction > 0.0 && c.blowup_tail_fraction < 1.0))
    throw ParameterError("blowup_tail_fraction must lie in (0, 1)");
}

EulerState to_symmetric(const PhysicalState& p, const GasLaw& g) {
  validate(g);
  const double cg = c_gamma(g);
  EulerState s;
  s.t = p.t;
  s.u = p.u;
  s.v.resize(p.rho.size());
  for (std::size_t i = 0; i < p.rho.size(); ++i) {
    const double r = p.rho[i];
    if (!(r > 0.0)) {
      std::ostringstream os;
      os << "density must be positive (rho=" << r << " at index " << i << ")";
      throw VacuumError(os.str());
    }
    // (c - 1)/cg with c = rho^cg, written to keep accuracy near rho = 1
    s.v[i] = std::expm1(cg * std::log(r)) / cg;
  }
  return s;
}

PhysicalState from_symmetric(const EulerState& s, const GasLaw& g) {
  validate(g);
  const double cg = c_gamma(g);
  PhysicalState p;
  p.t = s.t;
  p.u = s.u;
  p.rho.resize(s.v.size());
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    const double c = 1.0 + cg * s.v[i];
    if (!(c > 0.0)) {
      std::ostringstream os;
      os << "sound speed 1 + (gamma-1)v/2 = " << c << " at index " << i << " (vacuum)";
      throw VacuumError(os.str());
    }
    p.rho[i] = std::exp(std::log1p(cg * s.v[i]) / cg);
  }
  return p;
}

double bump_profile(double s) {
  const double s2 = s * s;
  if (s2 >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s2));
}

int default_sobolev_order(const WeightSpec& spec) {
  const int s = spec.n / 2 + 1;
  const int m = std::max(2, static_cast<int>(std::ceil(spec.k_c)) + 2);
  return s + m;
}

double sobolev_norm_squared(Spectral& sp, const ScalarField& f, int order) {
  const Spectrum fh = sp.forward(f);
  double sum = 0.0;
  for (std::size_t k = 0; k < fh.size(); ++k)
    sum += sp.weight(k) * std::pow(1.0 + sp.k_squared(k), order) * std::norm(fh[k]);
  return sum * sp.grid().cell_volume() / static_cast<double>(sp.grid().size());
}

EulerState initial_bump(const InitialDataSpec& spec, const Grid& grid, const GasLaw& g,
                        int sobolev_order) {
  validate(g);
  const int n = grid.dim();
  if (!(spec.R > 0.0 && spec.R < grid.half_length() / 2.0)) {
    std::ostringstream os;
    os << "support radius must satisfy 0 < R < L/2 = " << grid.half_length() / 2.0 << " (got "
       << spec.R << ")";
    throw ParameterError(os.str());
  }
  if (!(spec.eps >= 0.0)) throw ParameterError("initial amplitude eps must be >= 0");
  if (spec.q0 && !std::isfinite(*spec.q0)) throw ParameterError("q0 must be finite");
  if (spec.velocity == VelocityKind::Rotational && n == 1)
    throw ParameterError("rotational velocity needs n >= 2");
  if (sobolev_order < 0) throw ParameterError("Sobolev order must be >= 0");

  // shape modulation 1 + c0 (|x|/R)^2 + sum_a c_a x_a / R, drawn from the seed
  std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};
  if (spec.seed != 0) {
    std::uint64_t state = spec.seed;
    for (auto& ci : c) ci = 0.3 * unit_draw(state);
  }

  ScalarField h = grid.zeros();
  ScalarField pot = grid.zeros();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = grid.radius(i) / spec.R;
    const double phi = bump_profile(s);
    if (phi == 0.0) continue;
    double mod = 1.0 + c[0] * s * s;
    for (int a = 0; a < n; ++a) mod += c[a + 1] * grid.coord(i, a) / spec.R;
    h[i] = phi * mod;
    pot[i] = spec.R * phi;
  }

  Spectral sp(grid);
  VectorField ushape = grid.zeros_vector();
  if (spec.velocity == VelocityKind::Irrotational) {
    ushape = sp.gradient(pot);
  } else if (spec.velocity == VelocityKind::Rotational) {
    const VectorField gp = sp.gradient(pot);
    // 2-D: perpendicular gradient; 3-D: curl of (0, 0, pot)
    ushape[0] = gp[1];
    ushape[1] = gp[0];
    for (double& x : ushape[n == 2 ? 0 : 1]) x = -x;
  }

  double norm2 = sobolev_norm_squared(sp, h, sobolev_order);
  for (const auto& comp : ushape) norm2 += sobolev_norm_squared(sp, comp, sobolev_order);
  const double A = norm2 > 0.0 ? spec.eps / std::sqrt(norm2) : 0.0;

  PhysicalState p;
  p.rho.resize(grid.size());
  if (spec.q0) {
    double mass = 0.0;
    for (double x : h) mass += x;
    mass *= grid.cell_volume();
    if (mass == 0.0) throw ParameterError("bump has zero mass; cannot prescribe q0");
    for (std::size_t i = 0; i < grid.size(); ++i) p.rho[i] = 1.0 + *spec.q0 * h[i] / mass;
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i) p.rho[i] = 1.0 + A * h[i];
  }
  p.u = std::move(ushape);
  for (auto& comp : p.u)
    for (double& x : comp) x *= A;
  return to_symmetric(p, g);
}

BlowupVerdict blowup_monitor(const std::vector<MonitorSample>& history, double gradient_factor,
                             double tail_fraction) {
  BlowupVerdict v;
  if (history.empty()) return v;
  const double g0 = history.front().grad_max;
  for (const auto& s : history) {
    if (!std::isfinite(s.grad_max) || !std::isfinite(s.tail_fraction)) {
      v.smooth = false;
      v.t_star = s.t;
      v.reason = "non-finite state";
      return v;
    }
    if (g0 > 0.0 && s.grad_max > gradient_factor * g0) {
      std::ostringstream os;
      os << "gradient grew to " << s.grad_max / g0 << "x its initial value";
      v.smooth = false;
      v.t_star = s.t;
      v.reason = os.str();
      return v;
    }
    if (s.tail_fraction > tail_fraction) {
      std::ostringstream os;
      os << "spectral tail fraction " << s.tail_fraction << " exceeds " << tail_fraction;
      v.smooth = false;
      v.t_star = s.t;
      v.reason = os.str();
      return v;
    }
  }
  return v;
}

EulerSolver::EulerSolver(const Grid& grid, const DampingLaw& d, const GasLaw& g,
                         const SolverConfig& cfg)
    : grid_(grid), d_(d), g_(g), cfg_(cfg), sp_(std::make_unique<Spectral>(grid)) {
  validate(d);
  validate(g);
  validate(cfg);
}

EulerSolver::~EulerSolver() = default;

void EulerSolver::nonlinear(const EulerState& s, ScalarField& dv, VectorField& du,
                            bool with_damping) {
  const int n = grid_.dim();
  const std::size_t size = grid_.size();
  const double cg = c_gamma(g_);
  Spectral& sp = *sp_;
  Spectrum scratch;

  const Spectrum vh = sp.forward(s.v);
  VectorField gv(n);
  for (int a = 0; a < n; ++a) deriv(sp, vh, a, scratch, gv[a]);

  std::vector<Spectrum> uh(n);
  std::vector<VectorField> J(n, VectorField(n));  // J[a][b] = d_b u_a
  for (int a = 0; a < n; ++a) {
    sp.forward(s.u[a], uh[a]);
    for (int b = 0; b < n; ++b) deriv(sp, uh[a], b, scratch, J[a][b]);
  }

  const double damp = with_damping ? damping_coeff(s.t, d_) : 0.0;
  dv.assign(size, 0.0);
  du.assign(n, ScalarField(size, 0.0));
  for (std::size_t i = 0; i < size; ++i) {
    double div = 0.0;
    double adv = 0.0;
    for (int a = 0; a < n; ++a) {
      div += J[a][a][i];
      adv += s.u[a][i] * gv[a][i];
    }
    const double v = s.v[i];
    dv[i] = -div - adv - cg * v * div;
    for (int a = 0; a < n; ++a) {
      double conv = 0.0;
      for (int b = 0; b < n; ++b) conv += s.u[b][i] * J[a][b][i];
      du[a][i] = -gv[a][i] - damp * s.u[a][i] - conv - cg * v * gv[a][i];
    }
  }

  if (!cfg_.dealias && cfg_.hyperviscosity == 0.0) return;
  const double nu = cfg_.hyperviscosity;
  auto finish = [&](ScalarField& out, const Spectrum& state_h) {
    sp.forward(out, scratch);
    for (std::size_t k = 0; k < scratch.size(); ++k) {
      if (cfg_.dealias && !sp.retained(k)) {
        scratch[k] = 0.0;
        continue;
      }
      if (nu > 0.0) {
        const double k2 = sp.k_squared(k);
        scratch[k] -= nu * k2 * k2 * state_h[k];
      }
    }
    sp.inverse(scratch, out);
  };
  finish(dv, vh);
  for (int a = 0; a < n; ++a) finish(du[a], uh[a]);
}

EulerState EulerSolver::rhs(const EulerState& s) {
  EulerState out;
  out.t = s.t;
  nonlinear(s, out.v, out.u, true);
  return out;
}

void EulerSolver::filter(EulerState& s) {
  if (!cfg_.dealias) return;
  sp_->dealias(s.v);
  for (auto& c : s.u) sp_->dealias(c);
}

double EulerSolver::stable_dt(const EulerState& s) const {
  double umax = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    double m2 = 0.0;
    for (const auto& c : s.u) m2 += c[i] * c[i];
    umax = std::max(umax, std::sqrt(m2));
  }
  const double speed = 1.0 + umax + c_gamma(g_) * max_abs(s.v);
  return cfg_.cfl * grid_.dx() / speed;
}

void EulerSolver::step(EulerState& s, double dt) {
  if (cfg_.integrating_factor) {
    step_lawson(s, dt);
  } else {
    step_rk4(s, dt);
  }
}

void EulerSolver::step_rk4(EulerState& s, double dt) {
  const int n = grid_.dim();
  const std::size_t size = grid_.size();
  auto axpy = [&](const EulerState& base, const EulerState& k, double h, double t) {
    EulerState y;
    y.t = t;
    y.v.resize(size);
    for (std::size_t i = 0; i < size; ++i) y.v[i] = base.v[i] + h * k.v[i];
    y.u.assign(n, ScalarField(size));
    for (int a = 0; a < n; ++a)
      for (std::size_t i = 0; i < size; ++i) y.u[a][i] = base.u[a][i] + h * k.u[a][i];
    return y;
  };
  const EulerState k1 = rhs(s);
  const EulerState k2 = rhs(axpy(s, k1, 0.5 * dt, s.t + 0.5 * dt));
  const EulerState k3 = rhs(axpy(s, k2, 0.5 * dt, s.t + 0.5 * dt));
  const EulerState k4 = rhs(axpy(s, k3, dt, s.t + dt));
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < size; ++i)
    s.v[i] += w * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
  for (int a = 0; a < n; ++a)
    for (std::size_t i = 0; i < size; ++i)
      s.u[a][i] += w * (k1.u[a][i] + 2.0 * k2.u[a][i] + 2.0 * k3.u[a][i] + k4.u[a][i]);
  s.t += dt;
}

// Lawson RK4 on w = IF(t0, t) u, so the damping factor is exact.
void EulerSolver::step_lawson(EulerState& s, double dt) {
  const int n = grid_.dim();
  const std::size_t size = grid_.size();
  const double t0 = s.t;
  const double fm = integrating_factor(t0, t0 + 0.5 * dt, d_);
  const double ff = integrating_factor(t0, t0 + dt, d_);

  auto eval = [&](const EulerState& y, double factor) {
    EulerState k;
    k.t = y.t;
    nonlinear(y, k.v, k.u, false);
    for (auto& c : k.u)
      for (double& x : c) x *= factor;
    return k;
  };
  auto stage = [&](const EulerState& k, double h, double t, double factor) {
    EulerState y;
    y.t = t;
    y.v.resize(size);
    for (std::size_t i = 0; i < size; ++i) y.v[i] = s.v[i] + h * k.v[i];
    y.u.assign(n, ScalarField(size));
    for (int a = 0; a < n; ++a)
      for (std::size_t i = 0; i < size; ++i) y.u[a][i] = (s.u[a][i] + h * k.u[a][i]) / factor;
    return y;
  };
  const EulerState k1 = eval(s, 1.0);
  const EulerState k2 = eval(stage(k1, 0.5 * dt, t0 + 0.5 * dt, fm), fm);
  const EulerState k3 = eval(stage(k2, 0.5 * dt, t0 + 0.5 * dt, fm), fm);
  const EulerState k4 = eval(stage(k3, dt, t0 + dt, ff), ff);
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < size; ++i)
    s.v[i] += w * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
  for (int a = 0; a < n; ++a)
    for (std::size_t i = 0; i < size; ++i)
      s.u[a][i] = (s.u[a][i] + w * (k1.u[a][i] + 2.0 * k2.u[a][i] + 2.0 * k3.u[a][i] + k4.u[a][i])) / ff;
  s.t = t0 + dt;
}

ScalarField EulerSolver::source_Q(const EulerState& s, const EulerState& s_t) {
  const int n = grid_.dim();
  const std::size_t size = grid_.size();
  const double cg = c_gamma(g_);
  Spectral& sp = *sp_;

  const VectorField gv = sp.gradient(s.v);
  const VectorField gvt = sp.gradient(s_t.v);
  const ScalarField div = sp.divergence(s.u);
  const ScalarField divt = sp.divergence(s_t.u);
  std::vector<VectorField> J(n);
  for (int a = 0; a < n; ++a) J[a] = sp.gradient(s.u[a]);

  const double b = damping_coeff(s.t, d_);
  ScalarField q(size, 0.0);
  VectorField N2(n, ScalarField(size, 0.0));
  for (std::size_t i = 0; i < size; ++i) {
    double ugv = 0.0, utgv = 0.0, ugvt = 0.0;
    for (int a = 0; a < n; ++a) {
      ugv += s.u[a][i] * gv[a][i];
      utgv += s_t.u[a][i] * gv[a][i];
      ugvt += s.u[a][i] * gvt[a][i];
    }
    const double N1 = -ugv - cg * s.v[i] * div[i];
    const double N1t = -(utgv + ugvt) - cg * (s_t.v[i] * div[i] + s.v[i] * divt[i]);
    q[i] = b * N1 + N1t;
    for (int a = 0; a < n; ++a) {
      double conv = 0.0;
      for (int c = 0; c < n; ++c) conv += s.u[c][i] * J[a][c][i];
      N2[a][i] = -conv - cg * s.v[i] * gv[a][i];
    }
  }
  const ScalarField divN2 = sp.divergence(N2);
  for (std::size_t i = 0; i < size; ++i) q[i] -= divN2[i];
  if (cfg_.dealias) sp.dealias(q);
  return q;
}

VectorField EulerSolver::vorticity(const EulerState& s) {
  const int n = grid_.dim();
  if (n == 1) throw ParameterError("vorticity needs n = 2 or 3");
  Spectral& sp = *sp_;
  if (n == 2) {
    const ScalarField d1u2 = sp.derivative(s.u[1], 0);
    const ScalarField d2u1 = sp.derivative(s.u[0], 1);
    ScalarField w(grid_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = d1u2[i] - d2u1[i];
    return {w};
  }
  VectorField w(3, ScalarField(grid_.size()));
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3;
    const int c = (a + 2) % 3;
    const ScalarField dbuc = sp.derivative(s.u[c], b);
    const ScalarField dcub = sp.derivative(s.u[b], c);
    for (std::size_t i = 0; i < grid_.size(); ++i) w[a][i] = dbuc[i] - dcub[i];
  }
  return w;
}

MonitorSample EulerSolver::monitor(const EulerState& s) {
  MonitorSample m;
  m.t = s.t;
  Spectral& sp = *sp_;
  for (const auto& c : sp.gradient(s.v)) m.grad_max = std::max(m.grad_max, max_abs(c));
  for (const auto& comp : s.u)
    for (const auto& c : sp.gradient(comp)) m.grad_max = std::max(m.grad_max, max_abs(c));
  std::vector<const ScalarField*> fields{&s.v};
  for (const auto& c : s.u) fields.push_back(&c);
  m.tail_fraction = sp.tail_energy_fraction(fields);
  return m;
}

void EulerSolver::check_positive(const EulerState& s) const {
  const double cg = c_gamma(g_);
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    if (!(1.0 + cg * s.v[i] > 0.0) && std::isfinite(s.v[i])) {
      std::ostringstream os;
      os << "density lost positivity at t=" << s.t << " (1 + (gamma-1)v/2 = " << 1.0 + cg * s.v[i]
         << ")";
      throw VacuumError(os.str());
    }
  }
}

RunResult EulerSolver::run(EulerState s0, const std::function<void(const EulerState&)>& observer) {
  RunResult res;
  EulerState s = std::move(s0);
  if (s.v.size() != grid_.size() || static_cast<int>(s.u.size()) != grid_.dim())
    throw ParameterError("initial state does not match the grid");
  filter(s);
  check_positive(s);

  std::vector<double> snaps;
  for (double t : cfg_.snapshot_times)
    if (t >= s.t && t <= cfg_.t_final) snaps.push_back(t);
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
  std::size_t next = 0;
  if (next < snaps.size() && snaps[next] == s.t) {
    if (observer) observer(s);
    ++next;
  }
  res.monitor.push_back(monitor(s));

  while (s.t < cfg_.t_final) {
    const double target = next < snaps.size() ? snaps[next] : cfg_.t_final;
    const double cfl_dt = stable_dt(s);
    double dt = cfl_dt;
    if (cfg_.dt_fixed > 0.0) {
      if (cfg_.dt_fixed > cfl_dt * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "fixed step " << cfg_.dt_fixed << " exceeds the CFL bound " << cfl_dt << " at t=" << s.t;
        throw CflError(os.str());
      }
      dt = cfg_.dt_fixed;
    }
    bool hit = false;
    if (s.t + dt >= target - 1e-9 * dt) {
      dt = target - s.t;
      hit = true;
    }
    step(s, dt);
    if (hit) s.t = target;
    ++res.steps;

    if (!all_finite(s)) {
      res.blowup.smooth = false;
      res.blowup.t_star = s.t;
      res.blowup.reason = "non-finite state";
      break;
    }
    check_positive(s);

    const bool at_snapshot = hit && next < snaps.size() && snaps[next] == target;
    if (at_snapshot || res.steps % cfg_.monitor_stride == 0 || s.t >= cfg_.t_final) {
      res.monitor.push_back(monitor(s));
      const BlowupVerdict v = blowup_monitor(res.monitor, cfg_.blowup_gradient_factor,
                                             cfg_.blowup_tail_fraction);
      if (!v.smooth) {
        res.blowup = v;
        break;
      }
    }
    if (at_snapshot) {
      if (observer) observer(s);
      ++next;
    }
  }
  res.final_state = std::move(s);
  return res;
}

}  // namespace tdeuler
