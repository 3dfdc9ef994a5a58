#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdeuler/grid.hpp"
#include "tdeuler/params.hpp"

namespace tdeuler {

class Spectral;

class VacuumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CflError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (v, u) with v = 2/(gamma-1) (c - 1), c = rho^((gamma-1)/2).
struct EulerState {
  double t = 0.0;
  ScalarField v;
  VectorField u;
};

struct PhysicalState {
  double t = 0.0;
  ScalarField rho;
  VectorField u;
};

struct SolverConfig {
  double cfl = 0.4;
  bool dealias = true;
  double t_final = 1.0;
  std::vector<double> snapshot_times;
  // coefficient of an optional -nu Laplace^2 stabilizer; 0 disables it
  double hyperviscosity = 0.0;
  // Lawson RK4 with the damping term integrated exactly
  bool integrating_factor = false;
  // fixed step instead of the CFL step (must still satisfy the CFL bound)
  double dt_fixed = 0.0;
  double blowup_gradient_factor = 100.0;
  double blowup_tail_fraction = 0.01;
  int monitor_stride = 10;
};

void validate(const SolverConfig& c);

/// (gamma-1)/2
inline double c_gamma(const GasLaw& g) { return 0.5 * (g.gamma - 1.0); }

EulerState to_symmetric(const PhysicalState& p, const GasLaw& g);
/// Throws VacuumError where 1 + (gamma-1)v/2 <= 0.
PhysicalState from_symmetric(const EulerState& s, const GasLaw& g);

enum class VelocityKind { None, Irrotational, Rotational };

struct InitialDataSpec {
  double R = 4.0;      // support radius
  double eps = 1e-3;   // H^(s+m) norm of (rho0, u0)
  std::uint64_t seed = 0;  // 0 keeps the plain radial bump
  std::optional<double> q0;  // prescribed mass of rho0 - 1 (overrides eps for rho)
  VelocityKind velocity = VelocityKind::Irrotational;
  int sobolev_order = -1;  // -1: s + m from the weight constants
};

/// phi(s) = exp(-1 / (1 - s^2)) for |s| < 1, else 0.
double bump_profile(double s);

/// floor(n/2) + 1 + max(2, ceil(k_c) + 2)
int default_sobolev_order(const WeightSpec& spec);

/// sum_m (1 + |xi|^2)^order |f_hat|^2, scaled to approximate the continuous norm squared.
double sobolev_norm_squared(Spectral& sp, const ScalarField& f, int order);

/// Compactly supported data in |x| < R. Velocity is built from spectral
/// derivatives of potentials, so an irrotational field has zero discrete curl.
EulerState initial_bump(const InitialDataSpec& spec, const Grid& grid, const GasLaw& g,
                        int sobolev_order);

struct MonitorSample {
  double t = 0.0;
  double grad_max = 0.0;  // max(|grad v|_inf, |grad u|_inf)
  double tail_fraction = 0.0;
};

struct BlowupVerdict {
  bool smooth = true;
  double t_star = 0.0;
  std::string reason;
};

/// Flags the first sample whose gradient exceeds factor times the initial
/// gradient, or whose spectral tail exceeds tail_fraction.
BlowupVerdict blowup_monitor(const std::vector<MonitorSample>& history, double gradient_factor,
                             double tail_fraction);

struct RunResult {
  EulerState final_state;
  BlowupVerdict blowup;
  std::vector<MonitorSample> monitor;
  long steps = 0;
};

class EulerSolver {
 public:
  EulerSolver(const Grid& grid, const DampingLaw& d, const GasLaw& g, const SolverConfig& cfg);
  ~EulerSolver();
  EulerSolver(const EulerSolver&) = delete;
  EulerSolver& operator=(const EulerSolver&) = delete;

  const Grid& grid() const { return grid_; }
  const SolverConfig& config() const { return cfg_; }
  Spectral& spectral() { return *sp_; }

  /// Time derivative of s; the returned state carries t = s.t.
  EulerState rhs(const EulerState& s);
  /// Projects s onto the 2/3-rule band when dealiasing is on.
  void filter(EulerState& s);

  double stable_dt(const EulerState& s) const;
  void step(EulerState& s, double dt);

  /// Q with v_tt - Laplace(v) + b v_t = Q; s_t must be rhs(s).
  ScalarField source_Q(const EulerState& s, const EulerState& s_t);
  /// n = 2: one component d1 u2 - d2 u1. n = 3: the curl.
  VectorField vorticity(const EulerState& s);

  MonitorSample monitor(const EulerState& s);

  /// Advances s0 to t_final, calling observer at each snapshot time (and at
  /// the start if 0 is a snapshot time). Stops early on a blow-up flag.
  RunResult run(EulerState s0, const std::function<void(const EulerState&)>& observer = {});

 private:
  void nonlinear(const EulerState& s, ScalarField& dv, VectorField& du, bool with_damping);
  void step_rk4(EulerState& s, double dt);
  void step_lawson(EulerState& s, double dt);
  void check_positive(const EulerState& s) const;

  Grid grid_;
  DampingLaw d_;
  GasLaw g_;
  SolverConfig cfg_;
  std::unique_ptr<Spectral> sp_;
};

}  // namespace tdeuler
