#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tdeuler {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RkScheme { DormandPrince45, CashKarp45 };

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-14;
  double h_max = std::numeric_limits<double>::infinity();
  double h_init = 0.0;  // 0 picks a small starting step
  long max_steps = 50'000'000;
  RkScheme scheme = RkScheme::DormandPrince45;
};

namespace detail {

struct Tableau {
  int stages;
  bool fsal;
  int order;  // order of the propagated solution
  double c[7];
  double a[7][7];
  double b[7];
  double e[7];  // b - bhat
};

inline constexpr Tableau kDormandPrince{
    7,
    true,
    5,
    {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0},
    {{0, 0, 0, 0, 0, 0, 0},
     {1.0 / 5, 0, 0, 0, 0, 0, 0},
     {3.0 / 40, 9.0 / 40, 0, 0, 0, 0, 0},
     {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0, 0},
     {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0, 0},
     {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0, 0},
     {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0}},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0},
    {71.0 / 57600, 0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200, 22.0 / 525, -1.0 / 40}};

inline constexpr Tableau kCashKarp{
    6,
    false,
    5,
    {0.0, 1.0 / 5, 3.0 / 10, 3.0 / 5, 1.0, 7.0 / 8, 0.0},
    {{0, 0, 0, 0, 0, 0, 0},
     {1.0 / 5, 0, 0, 0, 0, 0, 0},
     {3.0 / 40, 9.0 / 40, 0, 0, 0, 0, 0},
     {3.0 / 10, -9.0 / 10, 6.0 / 5, 0, 0, 0, 0},
     {-11.0 / 54, 5.0 / 2, -70.0 / 27, 35.0 / 27, 0, 0, 0},
     {1631.0 / 55296, 175.0 / 512, 575.0 / 13824, 44275.0 / 110592, 253.0 / 4096, 0, 0},
     {0, 0, 0, 0, 0, 0, 0}},
    {37.0 / 378, 0, 250.0 / 621, 125.0 / 594, 0, 512.0 / 1771, 0},
    {37.0 / 378 - 2825.0 / 27648, 0, 250.0 / 621 - 18575.0 / 48384, 125.0 / 594 - 13525.0 / 55296,
     -277.0 / 14336, 512.0 / 1771 - 0.25, 0}};

}  // namespace detail

/// Embedded Runge-Kutta 5(4) integrator with standard step-size control.
/// F is called as f(t, y, dy) with y, dy of type std::array<double, N>.
template <std::size_t N, class F>
class EmbeddedRk {
 public:
  using State = std::array<double, N>;

  EmbeddedRk(F f, double t0, const State& y0, const OdeOptions& opt = {})
      : f_(std::move(f)), opt_(opt), t_(t0), y_(y0) {
    tab_ = opt.scheme == RkScheme::CashKarp45 ? &detail::kCashKarp : &detail::kDormandPrince;
    h_ = opt.h_init > 0.0 ? opt.h_init : 1e-4;
    h_ = std::min(h_, opt.h_max);
  }

  double time() const { return t_; }
  const State& state() const { return y_; }
  long steps() const { return accepted_ + rejected_; }
  long accepted() const { return accepted_; }

  /// Integrate forward until time t1 exactly (t1 >= current time).
  void advance_to(double t1) {
    if (t1 < t_) throw IntegrationError("cannot integrate backwards");
    if (!have_k0_) {
      f_(t_, y_, k_[0]);
      have_k0_ = true;
    }
    while (t_ < t1) {
      const bool last = t_ + h_ >= t1;
      const double h = last ? t1 - t_ : h_;
      if (steps() >= opt_.max_steps) {
        std::ostringstream os;
        os << "step limit " << opt_.max_steps << " reached at t=" << t_;
        throw IntegrationError(os.str());
      }
      const double err = attempt(h);
      if (!std::isfinite(err)) {
        h_ = 0.2 * h;
        ++rejected_;
        check_step(h_);
        continue;
      }
      double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -1.0 / tab_->order);
      if (err <= 1.0) {
        t_ = last ? t1 : t_ + h;
        y_ = ynew_;
        if (tab_->fsal) {
          k_[0] = k_[tab_->stages - 1];
        } else {
          f_(t_, y_, k_[0]);
        }
        ++accepted_;
        fac = std::clamp(fac, 0.2, 5.0);
        // a truncated final step says nothing about the step the solution wants
        if (!last || h >= h_) h_ = std::min(h * fac, opt_.h_max);
      } else {
        ++rejected_;
        h_ = h * std::clamp(fac, 0.2, 1.0);
        check_step(h_);
      }
    }
  }

 private:
  void check_step(double h) const {
    if (h < 1e-14 * std::max(1.0, std::abs(t_))) {
      std::ostringstream os;
      os << "step size underflow at t=" << t_ << " (h=" << h << ")";
      throw IntegrationError(os.str());
    }
  }

  double attempt(double h) {
    const auto& T = *tab_;
    State tmp{};
    for (int s = 1; s < T.stages; ++s) {
      for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += T.a[s][j] * k_[j][i];
        tmp[i] = y_[i] + h * acc;
      }
      f_(t_ + T.c[s] * h, tmp, k_[s]);
    }
    if (T.fsal) {
      // last stage was evaluated at the new solution
      ynew_ = tmp;
    } else {
      for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (int j = 0; j < T.stages; ++j) acc += T.b[j] * k_[j][i];
        ynew_[i] = y_[i] + h * acc;
      }
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double e = 0.0;
      for (int j = 0; j < T.stages; ++j) e += T.e[j] * k_[j][i];
      e *= h;
      const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
      sum += (e / sc) * (e / sc);
    }
    return std::sqrt(sum / static_cast<double>(N));
  }

  F f_;
  OdeOptions opt_;
  const detail::Tableau* tab_;
  double t_;
  State y_;
  State ynew_{};
  std::array<State, 7> k_{};
  bool have_k0_ = false;
  double h_;
  long accepted_ = 0;
  long rejected_ = 0;
};

template <std::size_t N, class F>
EmbeddedRk<N, F> make_integrator(F f, double t0, const std::array<double, N>& y0,
                                 const OdeOptions& opt = {}) {
  return EmbeddedRk<N, F>(std::move(f), t0, y0, opt);
}

}  // namespace tdeuler
