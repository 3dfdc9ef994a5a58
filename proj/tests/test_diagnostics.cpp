#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "oracles.hpp"
#include "tdeuler/diagnostics.hpp"
#include "tdeuler/spectral.hpp"

using namespace tdeuler;

TEST_SUITE("diagnostics") {

TEST_CASE("multi-indices") {
  CHECK(multi_indices(1, 3).size() == 1);
  CHECK(multi_indices(2, 2).size() == 3);
  CHECK(multi_indices(3, 2).size() == 6);
  const auto m = multi_indices(2, 1);
  CHECK(m[0][0] + m[0][1] == 1);
}

TEST_CASE("norms of a sine") {
  const Grid g(1, M_PI, 64);
  ScalarField f(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(g.coord(i, 0));
  CHECK(l1_norm(f, g) == doctest::Approx(4.0).epsilon(2e-3));
  CHECK(l2_norm(f, g) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(linf_norm(f) == doctest::Approx(1.0));
  Spectral sp(g);
  CHECK(derivative_l2(sp, f, 1) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(derivative_linf(sp, f, 2) == doctest::Approx(1.0).epsilon(1e-12));
  const VectorField u{f, f};
  CHECK(linf_norm(u) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("weighted energy against adaptive Simpson") {
  const DampingLaw d{0.5, 1.0};
  const WeightSpec spec = derive_constants(d, 1, 0.25);
  const Grid g(1, 16.0, 256);
  ScalarField f(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-g.coord(i, 0) * g.coord(i, 0));
  const double t = 1.0;
  const double inf = std::numeric_limits<double>::infinity();
  const WeightedEnergy e = weighted_energy(f, t, g, spec, d, inf);
  const double c = spec.a / std::pow(1.0 + t, 1.5);
  const double J = oracle::simpson([&](double x) { return std::exp(2 * c * x * x - 2 * x * x); }, -16.0, 16.0, 1e-14);
  const double Jp = oracle::simpson(
      [&](double x) { return std::exp(2 * c * x * x - 2 * x * x) * 1.5 / (1.0 + t) * c * x * x; }, -16.0, 16.0, 1e-14);
  CHECK(e.J == doctest::Approx(J).epsilon(1e-10));
  CHECK(e.J_psi == doctest::Approx(Jp).epsilon(1e-10));

  // a ball restriction drops the outside
  const WeightedEnergy b = weighted_energy(f, t, g, spec, d, 0.5);
  CHECK(b.J < e.J);

  const Grid wide(1, 200.0, 64);
  CHECK_THROWS_AS(weighted_energy(wide.zeros(), 0.0, wide, spec, d, inf), DomainSizingError);
}

TEST_CASE("mass and moment") {
  const Grid g(1, 8.0, 16);
  PhysicalState p;
  p.rho.assign(16, 1.0);
  p.u.assign(1, ScalarField(16, 0.0));
  // x_i = -8 + i
  p.rho[9] = 2.0;
  p.rho[10] = 1.5;
  p.u[0][9] = 1.0;
  p.u[0][10] = 2.0;
  CHECK(mass_M(p, g) == doctest::Approx(1.5));
  CHECK(moment_F(p, g) == doctest::Approx(1.0 * 2.0 * 1.0 + 2.0 * 1.5 * 2.0));
}

TEST_CASE("decay fit recovers exact power laws") {
  std::vector<double> t, y, z;
  for (int i = 0; i < 40; ++i) {
    t.push_back(std::pow(10.0, 0.1 * i));
    y.push_back(3.0 * std::pow(1.0 + t.back(), -0.7));
    z.push_back(2.0 * std::exp(-1.5 * std::pow(1.0 + t.back(), 0.5)));
  }
  const FitResult f = decay_fit(t, y, 1.0, 1e3, Abscissa::LogOnePlusT);
  CHECK(f.slope == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.rms < 1e-12);
  const FitResult h = decay_fit(t, z, 1.0, 100.0, Abscissa::PowerOneMinusLambda, 0.5);
  CHECK(h.slope == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK_THROWS_AS(decay_fit(t, y, 1.0, 2.0, Abscissa::LogOnePlusT), FitError);
  y[20] = -1.0;
  CHECK_THROWS_AS(decay_fit(t, y, 1.0, 1e3, Abscissa::LogOnePlusT), FitError);
}

TEST_CASE("convolution oracle against Simpson") {
  const double a = 1.5, b = 1.5, t = 100.0;
  const auto o = convolution_oracle(a, b, {0.0, t});
  const auto f = [&](double s) { return std::pow(1.0 + t - s, -a) * std::pow(1.0 + s, -b); };
  const double ref = oracle::simpson(f, 0.0, t, 1e-13) / std::pow(1.0 + t, -b);
  CHECK(o.ratio[0] == 0.0);
  CHECK(o.ratio[1] == doctest::Approx(ref).epsilon(1e-8));
  CHECK(o.max_ratio == o.ratio[1]);
  CHECK_THROWS_AS(convolution_oracle(1.0, 0.5, {1.0}), ParameterError);
}

TEST_CASE("lower-bound helpers on synthetic series") {
  const int n = 1;
  const double q0 = 0.01, R = 4.0;
  std::vector<double> t, rho, u;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(i);
    rho.push_back(2.0 * q0 / std::sqrt(ball_volume(n, R + i)));
    u.push_back(q0 * std::pow(R + i, -1.5));
  }
  CHECK(cauchy_schwarz_ratio(t, rho, q0, R, n) == doctest::Approx(0.5));
  const auto m = lower_bound_margin(t, rho, u, q0, R, n, 20.0);
  CHECK_FALSE(m.declined);
  CHECK(m.t.front() == 20.0);
  CHECK(m.inf_u == doctest::Approx(1.0));
  CHECK(m.inf_rho == doctest::Approx(2.0 / std::sqrt(2.0)));
  CHECK(lower_bound_margin(t, rho, u, 0.0, R, n, 20.0).declined);
  CHECK(ball_volume(3, 1.0) == doctest::Approx(4.0 * M_PI / 3.0));
}

TEST_CASE("F-inequality is tight for the exact solution") {
  const DampingLaw d{0.0, 1.0};
  const double q0 = 0.02;
  std::vector<double> t, F;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(0.05 * i * (1 + 0.001 * i));
    F.push_back(q0 * (1 - std::exp(-t.back())));
  }
  const auto fi = f_inequality(t, F, q0, 1, d);
  CHECK(fi.worst_ratio == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("verdict relations") {
  CHECK(make_verdict("a", 1.04, 1.0, 0.05, "abs").pass);
  CHECK_FALSE(make_verdict("a", 1.06, 1.0, 0.05, "abs").pass);
  CHECK(make_verdict("b", 1.04, 1.0, 0.05, "le").pass);
  CHECK(make_verdict("c", 0.96, 1.0, 0.05, "ge").pass);
  CHECK_FALSE(make_verdict("d", 1.0, 1.0, 0.0, "lt").pass);
  CHECK(make_verdict("e", 1e-3, 0.0, 0.0, "gt").pass);
  CHECK_FALSE(make_verdict("f", std::nan(""), 0.0, 1.0, "abs").pass);
  CHECK_THROWS_AS(make_verdict("g", 0.0, 0.0, 0.0, "approx"), ParameterError);
  const auto j = to_json(make_verdict("h", 1.0, 1.0, 0.1, "abs"));
  CHECK(j["quantity"] == "h");
  CHECK(j["verdict"] == "pass");
}

TEST_CASE("energy table layout") {
  const auto cols = energy_csv_columns(1);
  CHECK(cols.size() == 28);
  CHECK(cols[0] == "t");
  CHECK(cols[3] == "rho_l2_k0");
  CHECK(cols.back() == "energy_high");
  CHECK(q_predicted_slope(derive_constants(DampingLaw{0.5, 1.0}, 1, 0.25), DampingLaw{0.5, 1.0}) ==
        doctest::Approx(-1.25));
}

}  // TEST_SUITE
