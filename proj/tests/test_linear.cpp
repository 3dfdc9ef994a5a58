#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "tdeuler/euler.hpp"
#include "tdeuler/linear.hpp"

using namespace tdeuler;

namespace {

// w'' + b w' + r^2 w = c tau, by fixed-step RK4; returns w(t)
std::complex<double> forced_mode(double r, double t, std::complex<double> w0, std::complex<double> w1,
                                 std::complex<double> c, const DampingLaw& d, int steps) {
  using C = std::complex<double>;
  const double h = t / steps;
  auto f = [&](double s, C w, C wt) { return std::pair<C, C>{wt, c * s - r * r * w - damping_coeff(s, d) * wt}; };
  C w = w0, wt = w1;
  double s = 0.0;
  for (int i = 0; i < steps; ++i) {
    auto [a1, b1] = f(s, w, wt);
    auto [a2, b2] = f(s + h / 2, w + h / 2 * a1, wt + h / 2 * b1);
    auto [a3, b3] = f(s + h / 2, w + h / 2 * a2, wt + h / 2 * b2);
    auto [a4, b4] = f(s + h, w + h * a3, wt + h * b3);
    w += h / 6 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    wt += h / 6 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    s += h;
  }
  return w;
}

// method of lines: naive DFT, one RK4 mode solve per wavenumber
std::vector<double> mol_solution(const Grid& g, const ScalarField& w0, const ScalarField& w1, double forcing_scale,
                                 const ScalarField& shape, const DampingLaw& d, double t) {
  const auto a = oracle::dft(w0), b = oracle::dft(w1), c = oracle::dft(shape);
  const int N = g.points();
  std::vector<std::complex<double>> out(N);
  for (int k = 0; k < N; ++k) {
    const int m = k <= N / 2 ? k : k - N;
    const double r = g.wavenumber(std::abs(m));
    out[k] = forced_mode(r, t, a[k], b[k], forcing_scale * c[k], d, 20000);
  }
  return oracle::idft(out);
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE("linear") {

TEST_CASE("mode right-hand side") {
  ModeState s;
  s.xi = {3.0, 4.0};
  s.w_hat = {1.0, 2.0};
  s.w_hat_t = {0.5, -1.0};
  s.t = 3.0;
  const DampingLaw d{0.5, 2.0};
  const ModeRate r = mode_rhs(s, {1.0, 0.0}, d);
  CHECK(r.dw == s.w_hat_t);
  const std::complex<double> expect = std::complex<double>(1.0, 0.0) - 25.0 * s.w_hat - 1.0 * s.w_hat_t;
  CHECK(std::abs(r.dwt - expect) < 1e-14);
}

TEST_CASE("constant damping closed form (critical case)") {
  const DampingLaw d{0.0, 2.0};
  for (double t : {0.5, 3.0, 12.0}) {
    const auto p = fundamental_pair(t, 1.0, d);
    CHECK(p.phi1 == doctest::Approx((1 + t) * std::exp(-t)).epsilon(1e-9));
    CHECK(p.phi2 == doctest::Approx(t * std::exp(-t)).epsilon(1e-9));
    CHECK(p.dphi2 == doctest::Approx((1 - t) * std::exp(-t)).scale(1e-3).epsilon(1e-9));
  }
}

TEST_CASE("free wave") {
  const DampingLaw d{0.5, 0.0};
  for (double r : {0.3, 1.0, 2.5}) {
    const auto p = fundamental_pair(50.0, r, d);
    CHECK(p.phi1 == doctest::Approx(std::cos(50 * r)).scale(1.0).epsilon(1e-8));
    CHECK(p.phi2 == doctest::Approx(std::sin(50 * r) / r).scale(1.0).epsilon(1e-8));
  }
}

TEST_CASE("zero frequency") {
  const DampingLaw d{0.5, 1.0};
  const auto p = fundamental_pair(30.0, 0.0, d);
  CHECK(p.phi1 == 1.0);
  const double ref = oracle::simpson([&](double s) { return 1.0 / integrating_factor(0.0, s, d); }, 0.0, 30.0);
  CHECK(p.phi2 == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("propagator composes over an intermediate time") {
  const DampingLaw d{0.5, 1.0};
  const double r = 0.7, t0 = 0.5, t1 = 4.0, t = 11.0;
  const auto A = two_time_propagator(t, t1, r, d);
  const auto B = two_time_propagator(t1, t0, r, d);
  const auto C = two_time_propagator(t, t0, r, d);
  CHECK(C.phi1 == doctest::Approx(A.phi1 * B.phi1 + A.phi2 * B.dphi1).scale(1.0).epsilon(1e-8));
  CHECK(C.phi2 == doctest::Approx(A.phi1 * B.phi2 + A.phi2 * B.dphi2).scale(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(two_time_propagator(1.0, 2.0, r, d), ParameterError);
}

TEST_CASE("mode energy never grows") {
  ModePropagator p(1.3, 0.0, DampingLaw{0.5, 1.0});
  double last = p.energy(Kernel::Phi1);
  for (double t = 0.5; t <= 20.0; t += 0.5) {
    p.advance_to(t);
    const double e = p.energy(Kernel::Phi1);
    CHECK(e <= last * (1 + 1e-9));
    last = e;
  }
}

TEST_CASE("propagator agrees with a fixed-step RK4") {
  const DampingLaw d{0.3, 1.5};
  const auto ref = oracle::rk4_mode(2.0, 0.0, 15.0, {0.0, 1.0}, [&](double s) { return damping_coeff(s, d); }, 100000);
  const auto p = fundamental_pair(15.0, 2.0, d);
  CHECK(p.phi2 == doctest::Approx(ref[0]).scale(1e-3).epsilon(1e-8));
  CHECK(p.dphi2 == doctest::Approx(ref[1]).scale(1e-3).epsilon(1e-8));
}

TEST_CASE("linear solve matches method of lines (homogeneous)") {
  const Grid g(1, 8.0, 32);
  ScalarField w0(g.size()), w1(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.coord(i, 0);
    w0[i] = std::exp(-x * x / 2);
    w1[i] = x * std::exp(-x * x / 3);
  }
  const DampingLaw d{0.5, 1.0};
  const auto h = solve_linear_ivp(w0, w1, {}, g, d, {1.0, 3.0});
  REQUIRE(h.w.size() == 2);
  const auto ref = mol_solution(g, w0, w1, 0.0, g.zeros(), d, 3.0);
  CHECK(rel_l2(h.w[1], ref) < 1e-6);
}

TEST_CASE("linear solve with forcing converges to method of lines") {
  const Grid g(1, 8.0, 32);
  ScalarField shape(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) shape[i] = std::exp(-g.coord(i, 0) * g.coord(i, 0));
  const DampingLaw d{0.5, 1.0};
  const double T = 2.0;
  const auto ref = mol_solution(g, g.zeros(), g.zeros(), 1.0, shape, d, T);
  double prev = 0.0;
  for (int n : {50, 100}) {
    ForcingHistory f;
    for (int j = 0; j <= n; ++j) {
      const double tau = T * j / n;
      f.times.push_back(tau);
      ScalarField v = shape;
      for (auto& x : v) x *= tau;
      f.values.push_back(v);
    }
    const auto h = solve_linear_ivp(g.zeros(), g.zeros(), f, g, d, {T});
    const double err = rel_l2(h.w[0], ref);
    CHECK(err < 1e-3);
    // trapezoid in tau: halving the spacing quarters the error
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
    prev = err;
  }
}

TEST_CASE("zone integral matches a direct radial quadrature") {
  const DampingLaw d{0.5, 2.0};
  const double t = 10.0;
  const double edge = zone_threshold(t, d);
  const double ref = 2.0 * oracle::simpson([&](double r) { return std::abs(fundamental_pair(t, r, d).phi1); },
                                           0.0, edge, 1e-9);
  const auto z = zone_integral(t, 0, Zone::Z1, 1, d, 1);
  CHECK(z.value == doctest::Approx(ref).epsilon(1e-3));
  CHECK(sphere_area(1) == 2.0);
  CHECK(sphere_area(2) == doctest::Approx(2 * M_PI));
  CHECK(sphere_area(3) == doctest::Approx(4 * M_PI));
}

TEST_CASE("envelope exponents") {
  const DampingLaw d{0.5, 1.0};
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(kernel_envelope_exponent(0, inf, 1, d) == doctest::Approx(0.25));
  CHECK(kernel_envelope_exponent(1, inf, 1, d) == doctest::Approx(0.5));
  CHECK(kernel_envelope_exponent(1, 2.0, 2, d) == doctest::Approx(0.5));
  CHECK(zone_integral_exponent(2, 1, 1, d) == doctest::Approx(0.75));
  CHECK(zone_integral_exponent(2, 2, 1, d) == doctest::Approx(0.625));
}

TEST_CASE("kernel applied to a bump matches a DFT oracle") {
  const Grid g(1, 16.0, 64);
  ScalarField b(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) b[i] = bump_profile(std::abs(g.coord(i, 0)) / 4.0);
  const DampingLaw d{0.5, 1.0};
  const double inf = std::numeric_limits<double>::infinity();
  const auto res = kernel_decay_check(b, {5.0}, {{0, inf}}, g, d);
  REQUIRE(res.samples.size() == 1);
  auto bh = oracle::dft(b);
  for (int k = 0; k < 64; ++k) {
    const int m = k <= 32 ? k : k - 64;
    const double r = g.wavenumber(std::abs(m));
    bh[k] *= oracle::rk4_mode(r, 0.0, 5.0, {1.0, 0.0}, [&](double s) { return damping_coeff(s, d); }, 20000)[0];
  }
  const auto w = oracle::idft(bh);
  double mx = 0.0;
  for (double x : w) mx = std::max(mx, std::abs(x));
  CHECK(res.samples[0].observed == doctest::Approx(mx).epsilon(1e-7));
}

TEST_CASE("mode table layout") {
  std::ostringstream os;
  write_mode_table(os, {{1.0, 0.1, Zone::Z1, 0.9, 0.5, 1.0, 0.9}});
  CHECK(os.str().rfind("t,xi,zone,phi1_re,phi1_im,phi2_re,phi2_im,envelope,ratio\n", 0) == 0);
}

}  // TEST_SUITE
