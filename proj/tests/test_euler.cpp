#include <doctest.h>

#include <cmath>

#include "tdeuler/diagnostics.hpp"
#include "tdeuler/euler.hpp"
#include "tdeuler/spectral.hpp"

using namespace tdeuler;

namespace {

SolverConfig plain(double t_final = 1.0) {
  SolverConfig c;
  c.dealias = false;
  c.t_final = t_final;
  return c;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const ScalarField& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

EulerState trig_state(const Grid& g, double t) {
  EulerState s;
  s.t = t;
  s.v.resize(g.size());
  s.u.assign(1, ScalarField(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(i, 0);
    s.v[i] = 0.1 * std::sin(x);
    s.u[0][i] = 0.2 * std::cos(2 * x);
  }
  return s;
}

}  // namespace

TEST_SUITE("euler") {

TEST_CASE("symmetric variables round trip") {
  for (double gamma : {1.4, 2.0, 3.0}) {
    const GasLaw g{gamma};
    PhysicalState p;
    p.rho = {0.5, 1.0, 1.7};
    p.u = {{0.1, -0.2, 0.3}};
    const EulerState s = to_symmetric(p, g);
    CHECK(s.v[1] == doctest::Approx(0.0));
    CHECK(s.v[2] == doctest::Approx(2.0 / (gamma - 1) * (std::pow(1.7, (gamma - 1) / 2) - 1)));
    const PhysicalState q = from_symmetric(s, g);
    for (int i = 0; i < 3; ++i) CHECK(q.rho[i] == doctest::Approx(p.rho[i]).epsilon(1e-14));
  }
  EulerState bad;
  bad.v = {-2.5};
  bad.u = {{0.0}};
  CHECK_THROWS_AS(from_symmetric(bad, GasLaw{2.0}), VacuumError);
}

TEST_CASE("rhs against hand-derived expressions (gamma = 3)") {
  const Grid g(1, M_PI, 64);
  const DampingLaw d{0.5, 1.0};
  EulerSolver solver(g, d, GasLaw{3.0}, plain());
  const EulerState s = trig_state(g, 0.5);
  const EulerState r = solver.rhs(s);
  const double b = 1.0 / std::sqrt(1.5);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(i, 0);
    const double v = 0.1 * std::sin(x), vx = 0.1 * std::cos(x);
    const double u = 0.2 * std::cos(2 * x), ux = -0.4 * std::sin(2 * x);
    CHECK(r.v[i] == doctest::Approx(-(1 + v) * ux - u * vx).scale(1.0).epsilon(1e-12));
    CHECK(r.u[0][i] == doctest::Approx(-(1 + v) * vx - b * u - u * ux).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("equilibrium is a fixed point") {
  const Grid g(2, 4.0, 16);
  EulerSolver solver(g, DampingLaw{0.5, 1.0}, GasLaw{2.0}, SolverConfig{});
  EulerState s{0.0, g.zeros(), g.zeros_vector()};
  const EulerState r = solver.rhs(s);
  CHECK(max_abs(r.v) == 0.0);
  solver.step(s, 0.1);
  CHECK(max_abs(s.v) == 0.0);
  CHECK(max_abs(s.u[1]) == 0.0);
}

TEST_CASE("source term against a finite difference in time") {
  const Grid g(1, M_PI, 64);
  const DampingLaw d{0.5, 1.0};
  EulerSolver solver(g, d, GasLaw{2.0}, plain());
  const double h = 1e-3;
  EulerState s0 = trig_state(g, 1.0);
  EulerState s1 = s0;
  solver.step(s1, h);
  s1.t = s0.t + h;
  EulerState s2 = s1;
  solver.step(s2, h);
  s2.t = s1.t + h;
  const EulerState r1 = solver.rhs(s1);
  const ScalarField Q = solver.source_Q(s1, r1);
  const ScalarField vtt_a = solver.rhs(s0).v, vtt_b = solver.rhs(s2).v;
  const ScalarField lap = solver.spectral().laplacian(s1.v);
  const double b = damping_coeff(s1.t, d);
  ScalarField ref(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    ref[i] = (vtt_b[i] - vtt_a[i]) / (2 * h) - lap[i] + b * r1.v[i];
  CHECK(max_abs(Q) > 1e-3);
  CHECK(max_abs_diff(Q, ref) / max_abs(Q) < 1e-3);
}

TEST_CASE("vorticity of a shear flow") {
  const Grid g(2, M_PI, 32);
  EulerSolver solver(g, DampingLaw{0.5, 1.0}, GasLaw{2.0}, SolverConfig{});
  EulerState s{0.0, g.zeros(), g.zeros_vector()};
  for (std::size_t i = 0; i < g.size(); ++i) s.u[0][i] = -std::sin(g.coord(i, 1));
  const VectorField w = solver.vorticity(s);
  REQUIRE(w.size() == 1);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(w[0][i] == doctest::Approx(std::cos(g.coord(i, 1))).scale(1.0));
}

TEST_CASE("initial data") {
  CHECK(bump_profile(0.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(bump_profile(1.0) == 0.0);
  CHECK(bump_profile(-1.5) == 0.0);
  CHECK(default_sobolev_order(derive_constants(DampingLaw{0.5, 1.0}, 1, 0.25)) == 7);

  const Grid g(1, 32.0, 512);
  InitialDataSpec spec;
  spec.q0 = 0.01;
  spec.velocity = VelocityKind::None;
  const GasLaw gas{2.0};
  const EulerState s = initial_bump(spec, g, gas, 3);
  CHECK(mass_M(from_symmetric(s, gas), g) == doctest::Approx(0.01).epsilon(1e-10));
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g.coord(i, 0)) >= spec.R) CHECK(s.v[i] == 0.0);
  InitialDataSpec wide;
  wide.R = 20.0;
  CHECK_THROWS_AS(initial_bump(wide, g, gas, 3), ParameterError);
}

TEST_CASE("irrotational data has no discrete curl, rotational data does") {
  const Grid g(2, 16.0, 64);
  const GasLaw gas{2.0};
  EulerSolver solver(g, DampingLaw{0.5, 1.0}, gas, SolverConfig{});
  InitialDataSpec spec;
  spec.eps = 1e-2;
  const EulerState irr = initial_bump(spec, g, gas, 2);
  CHECK(max_abs(solver.vorticity(irr)[0]) < 1e-14);
  spec.velocity = VelocityKind::Rotational;
  const EulerState rot = initial_bump(spec, g, gas, 2);
  CHECK(max_abs(solver.vorticity(rot)[0]) > 1e-6);
}

TEST_CASE("integrating-factor stepping agrees with RK4") {
  const Grid g(1, M_PI, 64);
  const DampingLaw d{0.5, 1.0};
  SolverConfig a = plain(1.0), b = plain(1.0);
  a.dt_fixed = b.dt_fixed = 0.005;
  a.snapshot_times = b.snapshot_times = {1.0};
  b.integrating_factor = true;
  EulerSolver sa(g, d, GasLaw{2.0}, a), sb(g, d, GasLaw{2.0}, b);
  const RunResult ra = sa.run(trig_state(g, 0.0));
  const RunResult rb = sb.run(trig_state(g, 0.0));
  CHECK(ra.final_state.t == 1.0);
  CHECK(max_abs_diff(ra.final_state.v, rb.final_state.v) / max_abs(ra.final_state.v) < 1e-8);
  CHECK(max_abs_diff(ra.final_state.u[0], rb.final_state.u[0]) / max_abs(ra.final_state.u[0]) < 1e-8);
}

TEST_CASE("fixed step above the CFL bound is refused") {
  const Grid g(1, M_PI, 64);
  SolverConfig c = plain(1.0);
  c.dt_fixed = 1.0;
  EulerSolver s(g, DampingLaw{0.5, 1.0}, GasLaw{2.0}, c);
  CHECK_THROWS_AS(s.run(trig_state(g, 0.0)), CflError);
}

TEST_CASE("blow-up monitor") {
  std::vector<MonitorSample> h{{0.0, 1.0, 0.0}, {1.0, 5.0, 0.0}};
  CHECK(blowup_monitor(h, 10.0, 0.01).smooth);
  h.push_back({2.0, 20.0, 0.0});
  const auto v = blowup_monitor(h, 10.0, 0.01);
  CHECK_FALSE(v.smooth);
  CHECK(v.t_star == 2.0);
  CHECK_FALSE(blowup_monitor({{0.0, 1.0, 0.0}, {0.5, 1.0, 0.2}}, 10.0, 0.01).smooth);
  SolverConfig bad_cfl;
  bad_cfl.cfl = 0.9;
  CHECK_THROWS_AS(validate(bad_cfl), ParameterError);
}

}  // TEST_SUITE
