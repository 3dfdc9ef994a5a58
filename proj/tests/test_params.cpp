#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "tdeuler/params.hpp"

using namespace tdeuler;

TEST_SUITE("params") {

TEST_CASE("validation accepts the admitted range and rejects the rest") {
  CHECK_NOTHROW(validate(DampingLaw{0.0, 1.0}));
  CHECK_NOTHROW(validate(DampingLaw{0.5, 0.0}));
  CHECK_THROWS_AS(validate(DampingLaw{1.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(validate(DampingLaw{-0.1, 1.0}), ParameterError);
  CHECK_THROWS_AS(validate(DampingLaw{0.5, -1.0}), ParameterError);
  CHECK_THROWS_AS(validate(GasLaw{1.0}), ParameterError);
  CHECK(DampingLaw{0.0, 1.0}.validation_mode());
  CHECK(DampingLaw{0.3, 0.0}.validation_mode());
  CHECK_FALSE(DampingLaw{0.3, 1.0}.validation_mode());
}

TEST_CASE("weight constants") {
  const DampingLaw d{0.5, 2.0};
  const WeightSpec s = derive_constants(d, 3, 0.25);
  CHECK(s.a == doctest::Approx(1.5 * 2.0 / 8.0 * (1.0 - 0.25 / 4.5)));
  CHECK(s.B == doctest::Approx(1.5 * 3 / 2.0 - 0.25));
  CHECK(s.k_c == doctest::Approx(3.0 * 4 - 3 - 1.0));
  CHECK(default_delta(DampingLaw{0.0, 1.0}, 1) == doctest::Approx(0.25));
  CHECK_THROWS_AS(derive_constants(d, 1, 0.0), ParameterError);
  CHECK_THROWS_AS(derive_constants(d, 1, 0.76), ParameterError);
}

TEST_CASE("weight derivatives against finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3.0, 3.0), T(0.0, 50.0);
  const DampingLaw d{0.3, 1.7};
  const WeightSpec s = derive_constants(d, 2, 0.2);
  for (int it = 0; it < 50; ++it) {
    const double t = T(rng);
    std::vector<double> x{U(rng), U(rng)};
    const WeightEval w = weight_eval(t, x, s, d);
    const double h = 1e-4;
    auto psi = [&](double tt, std::vector<double> xx) { return weight_eval(tt, xx, s, d).psi; };
    const double dt = (psi(t + h, x) - psi(t - h, x)) / (2 * h);
    CHECK(w.psi_t == doctest::Approx(dt).epsilon(1e-7));
    double lap = 0.0;
    for (int i = 0; i < 2; ++i) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      CHECK(w.grad_psi[i] == doctest::Approx((psi(t, xp) - psi(t, xm)) / (2 * h)).epsilon(1e-6));
      lap += (psi(t, xp) - 2 * w.psi + psi(t, xm)) / (h * h);
    }
    CHECK(w.lap_psi == doctest::Approx(lap).epsilon(1e-4));
  }
}

TEST_CASE("integrating factor equals exp of the integrated friction") {
  for (double lam : {0.0, 0.3, 0.8}) {
    const DampingLaw d{lam, 1.3};
    for (auto [t0, t1] : {std::pair{0.0, 1.0}, {2.0, 7.5}, {10.0, 10.001}}) {
      const double ref = oracle::simpson([&](double s) { return 1.3 * std::pow(1.0 + s, -lam); }, t0, t1);
      CHECK(log_integrating_factor(t0, t1, d) == doctest::Approx(ref).epsilon(1e-10));
      CHECK(integrating_factor(t0, t1, d) == doctest::Approx(std::exp(ref)).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(log_integrating_factor(2.0, 1.0, DampingLaw{}), ParameterError);
}

TEST_CASE("zones and the exit time") {
  const DampingLaw d{0.5, 2.0};
  const double t = 3.0;
  const double thr = 2.0 / (4.0 * std::sqrt(4.0));
  CHECK(zone_threshold(t, d) == doctest::Approx(thr));
  CHECK(zone_classify(t, thr, d) == Zone::Z1);
  CHECK(zone_classify(t, thr * 1.01, d) == Zone::Z2);
  CHECK(zone_classify(t, 1.0, d) == Zone::Z2);
  CHECK(zone_classify(t, 1.0001, d) == Zone::Z3);
  CHECK(to_string(Zone::Z2) == "Z2");
  const double r = 0.1;
  const double tx = t_xi(r, d);
  CHECK(zone_threshold(tx, d) == doctest::Approx(r));
  CHECK_THROWS_AS(t_xi(0.6, d), ParameterError);
  CHECK_THROWS_AS(t_xi(0.1, DampingLaw{0.0, 2.0}), ParameterError);
}

}  // TEST_SUITE
