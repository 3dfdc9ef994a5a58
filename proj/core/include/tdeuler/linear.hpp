#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "tdeuler/grid.hpp"
#include "tdeuler/ode.hpp"
#include "tdeuler/params.hpp"

namespace tdeuler {

/// One Fourier mode of w_tt - Laplace(w) + mu(1+t)^-lambda w_t = f.
struct ModeState {
  std::vector<double> xi;
  std::complex<double> w_hat{};
  std::complex<double> w_hat_t{};
  double t = 0.0;
};

struct ModeRate {
  std::complex<double> dw{};
  std::complex<double> dwt{};
};

ModeRate mode_rhs(const ModeState& s, std::complex<double> f_hat, const DampingLaw& d);

/// Entries of the two-time propagator E(t, tau; |xi|). phi1 starts from
/// (w, w_t) = (1, 0) at tau, phi2 from (0, 1). The mode equation has real
/// coefficients and sees xi only through r = |xi|, so the entries are real.
struct PropagatorSample {
  double t = 0.0;
  double tau = 0.0;
  double xi = 0.0;
  double phi1 = 1.0;
  double phi2 = 0.0;
  double dphi1 = 0.0;
  double dphi2 = 1.0;
};

enum class Kernel { Phi1 = 1, Phi2 = 2 };

/// base with h_max capped at 0.1/r (the mode is oscillatory for large r).
OdeOptions mode_options(double r, const OdeOptions& base);

/// Integrates both propagator columns from tau through increasing times.
class ModePropagator {
 public:
  ModePropagator(double r, double tau, const DampingLaw& d, const OdeOptions& opt = {});

  const PropagatorSample& advance_to(double t);
  const PropagatorSample& sample() const { return s_; }
  /// |w_t|^2 + r^2 |w|^2 of one column; non-increasing in t.
  double energy(Kernel k) const;

 private:
  struct Rhs {
    double r2;
    DampingLaw d;
    void operator()(double t, const std::array<double, 4>& y, std::array<double, 4>& dy) const {
      const double b = damping_coeff(t, d);
      dy[0] = y[1];
      dy[1] = -r2 * y[0] - b * y[1];
      dy[2] = y[3];
      dy[3] = -r2 * y[2] - b * y[3];
    }
  };
  EmbeddedRk<4, Rhs> rk_;
  PropagatorSample s_;
};

/// E(t, 0; r): the fundamental solutions Phi1, Phi2.
PropagatorSample fundamental_pair(double t, double r, const DampingLaw& d,
                                  const OdeOptions& opt = {});

/// E(t, tau; r) with data posed at tau. Throws ParameterError if tau > t.
PropagatorSample two_time_propagator(double t, double tau, double r, const DampingLaw& d,
                                     const OdeOptions& opt = {});

/// Sampled forcing f(tau_j, x). Times must start at 0 and increase.
struct ForcingHistory {
  std::vector<double> times;
  std::vector<ScalarField> values;
  bool empty() const { return times.empty(); }
};

struct LinearOptions {
  OdeOptions ode{};
  // aliasing warning when the spectral tail holds more than this fraction
  double alias_tail_fraction = 1e-8;
};

struct LinearHistory {
  std::vector<double> times;
  std::vector<ScalarField> w;
  std::vector<std::string> warnings;
};

/// Mode-by-mode solution w = Phi1 w0 + Phi2 w1 + int_0^t E2(t,tau) f(tau) dtau
/// on the periodic grid, with the tau integral done by the trapezoid rule on
/// the forcing samples.
LinearHistory solve_linear_ivp(const ScalarField& w0, const ScalarField& w1,
                               const ForcingHistory& f, const Grid& grid, const DampingLaw& d,
                               const std::vector<double>& output_times,
                               const LinearOptions& opt = {});

struct ZoneBoundReport {
  Zone zone = Zone::Z1;
  double observed = 0.0;
  double bound_shape = 0.0;
  double ratio = 0.0;
};

/// Compares |Phi_i(t, r)| with the zone envelope built from C0:
///   Z1  C0 exp(-C0 r^2 (1+t)^(1-lambda))
///   Z2  C0 exp(-C0 (1+t)^(1-lambda)) exp(C0 (1-r^2)(1+t_xi)^(1-lambda))
///   Z3  C0 exp(-C0 (1+t)^(1-lambda))
/// The Z2 envelope needs t_xi, so r must not exceed mu/4 there.
ZoneBoundReport zone_bound_check(double t, double r, const PropagatorSample& phi, double C0,
                                 const DampingLaw& d, Kernel which = Kernel::Phi1);

/// |S^(n-1)|
double sphere_area(int n);

struct ZoneIntegralOptions {
  OdeOptions ode{};
  Kernel kernel = Kernel::Phi1;
  double rtol = 1e-4;
  int max_levels = 18;
};

struct ZoneIntegralResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// (int_zone |xi|^(alpha p) |Phi_i(t, xi)|^p dxi)^(1/p) for zone Z1 or Z2,
/// p in {1, 2}, by radial composite Simpson with node doubling.
ZoneIntegralResult zone_integral(double t, int alpha, Zone zone, int p, const DampingLaw& d, int n,
                                 const ZoneIntegralOptions& opt = {});

/// Lemma exponents of the zone integrals: L1 (1-lambda)(n/2+|alpha|/2),
/// L2 (1-lambda)(n/4+|alpha|/2).
double zone_integral_exponent(int alpha, int p, int n, const DampingLaw& d);

struct KernelNorm {
  int k = 0;        // derivative order
  double p = 2.0;   // 2 or infinity
};

struct KernelDecaySample {
  double t = 0.0;
  int k = 0;
  double p = 2.0;
  double observed = 0.0;  // all modes
  double resolved = 0.0;  // modes with |xi| <= 1 (Z1 and Z2)
  double tail = 0.0;      // Z3 modes alone
  double envelope = 0.0;  // (1+t)^(-exponent) ||g||_1
};

struct KernelDecayOptions {
  OdeOptions ode{};
  Kernel kernel = Kernel::Phi1;
  // modes whose contribution is provably below this fraction of max|g_hat|
  // are skipped or dropped
  double negligible = 1e-16;
  double alias_tail_fraction = 1e-8;
};

struct KernelDecayResult {
  std::vector<KernelDecaySample> samples;  // time-major, norms in request order
  std::vector<std::string> warnings;
  long modes_integrated = 0;
  long modes_skipped = 0;
  long modes_dropped = 0;
  double g_l1 = 0.0;
};

/// Exponent of the kernel envelope: (1-lambda)(n+k)/2 for p = infinity,
/// (1-lambda)(n/4+k/2) for p = 2.
double kernel_envelope_exponent(int k, double p, int n, const DampingLaw& d);

/// ||d_x^k (K_i(t) * g)||_p at each time, by spectral multiplication with
/// Phi_i. Times must increase.
KernelDecayResult kernel_decay_check(const ScalarField& g, const std::vector<double>& times,
                                     const std::vector<KernelNorm>& norms, const Grid& grid,
                                     const DampingLaw& d, const KernelDecayOptions& opt = {});

struct ModeTableRow {
  double t = 0.0;
  double r = 0.0;
  Zone zone = Zone::Z1;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double envelope = 0.0;
  double ratio = 0.0;
};

/// CSV: t,xi,zone,phi1_re,phi1_im,phi2_re,phi2_im,envelope,ratio
void write_mode_table(std::ostream& os, const std::vector<ModeTableRow>& rows);

}  // namespace tdeuler
