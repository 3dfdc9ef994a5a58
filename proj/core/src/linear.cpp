#include "tdeuler/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "tdeuler/quadrature.hpp"
#include "tdeuler/spectral.hpp"

namespace tdeuler {

namespace {

void require_increasing(const std::vector<double>& times, const char* what) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
      std::ostringstream os;
      os << what << " must be nonnegative and strictly increasing (entry " << i << " = "
         << times[i] << ")";
      throw ParameterError(os.str());
    }
  }
}

double column(const PropagatorSample& s, Kernel k) { return k == Kernel::Phi1 ? s.phi1 : s.phi2; }

std::string alias_warning(double fraction, double limit) {
  std::ostringstream os;
  os << "spectral tail holds " << fraction << " of the data energy (limit " << limit
     << "); refine the grid";
  return os.str();
}

// Unique |m|^2 values with the half-spectrum entries that share them.
std::map<long, std::vector<std::size_t>> group_modes(const Spectral& sp) {
  std::map<long, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < sp.spectrum_size(); ++k) groups[sp.mode_norm2(k)].push_back(k);
  return groups;
}

}  // namespace

ModeRate mode_rhs(const ModeState& s, std::complex<double> f_hat, const DampingLaw& d) {
  double r2 = 0.0;
  for (double x : s.xi) r2 += x * x;
  return {s.w_hat_t, f_hat - r2 * s.w_hat - damping_coeff(s.t, d) * s.w_hat_t};
}

OdeOptions mode_options(double r, const OdeOptions& base) {
  OdeOptions o = base;
  if (r > 0.0) o.h_max = std::min(o.h_max, 0.1 / r);
  return o;
}

ModePropagator::ModePropagator(double r, double tau, const DampingLaw& d, const OdeOptions& opt)
    : rk_(Rhs{r * r, d}, tau, {1.0, 0.0, 0.0, 1.0}, mode_options(r, opt)) {
  validate(d);
  s_.t = tau;
  s_.tau = tau;
  s_.xi = r;
}

const PropagatorSample& ModePropagator::advance_to(double t) {
  if (t < s_.t) {
    std::ostringstream os;
    os << "propagator cannot move backwards (at t=" << s_.t << ", asked " << t << ")";
    throw ParameterError(os.str());
  }
  rk_.advance_to(t);
  const auto& y = rk_.state();
  s_.t = t;
  s_.phi1 = y[0];
  s_.dphi1 = y[1];
  s_.phi2 = y[2];
  s_.dphi2 = y[3];
  return s_;
}

double ModePropagator::energy(Kernel k) const {
  const double r2 = s_.xi * s_.xi;
  return k == Kernel::Phi1 ? s_.dphi1 * s_.dphi1 + r2 * s_.phi1 * s_.phi1
                           : s_.dphi2 * s_.dphi2 + r2 * s_.phi2 * s_.phi2;
}

PropagatorSample fundamental_pair(double t, double r, const DampingLaw& d, const OdeOptions& opt) {
  return two_time_propagator(t, 0.0, r, d, opt);
}

PropagatorSample two_time_propagator(double t, double tau, double r, const DampingLaw& d,
                                     const OdeOptions& opt) {
  if (tau > t) {
    std::ostringstream os;
    os << "two-time propagator needs tau <= t (got tau=" << tau << ", t=" << t << ")";
    throw ParameterError(os.str());
  }
  if (tau < 0.0) throw ParameterError("two-time propagator needs tau >= 0");
  ModePropagator p(r, tau, d, opt);
  return p.advance_to(t);
}

LinearHistory solve_linear_ivp(const ScalarField& w0, const ScalarField& w1,
                               const ForcingHistory& f, const Grid& grid, const DampingLaw& d,
                               const std::vector<double>& output_times, const LinearOptions& opt) {
  validate(d);
  require_increasing(output_times, "output times");
  if (!f.empty()) {
    require_increasing(f.times, "forcing times");
    if (f.times.front() != 0.0) throw ParameterError("forcing history must start at t = 0");
    if (f.values.size() != f.times.size())
      throw ParameterError("forcing history has mismatched times and values");
  }

  Spectral sp(grid);
  LinearHistory out;
  out.times = output_times;

  for (const ScalarField* data : {&w0, &w1}) {
    const double tail = sp.tail_energy_fraction(*data);
    if (tail > opt.alias_tail_fraction) out.warnings.push_back(alias_warning(tail, opt.alias_tail_fraction));
  }

  const auto w0h = sp.forward(w0);
  const auto w1h = sp.forward(w1);
  std::vector<Spectral::Spectrum> fh;
  for (const auto& v : f.values) fh.push_back(sp.forward(v));

  const std::size_t nt = output_times.size();
  std::vector<Spectral::Spectrum> outh(nt, Spectral::Spectrum(sp.spectrum_size(), 0.0));
  const double base = grid.wavenumber(1);

  // trapezoid weights of the Duhamel integral on nodes {tau_j <= t} U {t};
  // the integrand vanishes at tau = t because E2(t, t) = 0
  std::vector<std::vector<double>> weights(nt);
  for (std::size_t o = 0; o < nt; ++o) {
    const double t = output_times[o];
    std::vector<double> nodes;
    for (double tau : f.times)
      if (tau <= t) nodes.push_back(tau);
    std::vector<double> w(nodes.size(), 0.0);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const double next = j + 1 < nodes.size() ? nodes[j + 1] : t;
      const double h = next - nodes[j];
      w[j] += 0.5 * h;
      if (j + 1 < nodes.size()) w[j + 1] += 0.5 * h;
    }
    weights[o] = std::move(w);
  }

  for (const auto& [norm2, entries] : group_modes(sp)) {
    const double r = base * std::sqrt(static_cast<double>(norm2));
    ModePropagator p(r, 0.0, d, opt.ode);
    for (std::size_t o = 0; o < nt; ++o) {
      const auto& s = p.advance_to(output_times[o]);
      for (std::size_t k : entries) outh[o][k] += s.phi1 * w0h[k] + s.phi2 * w1h[k];
    }
    for (std::size_t j = 0; j < f.times.size(); ++j) {
      ModePropagator q(r, f.times[j], d, opt.ode);
      for (std::size_t o = 0; o < nt; ++o) {
        if (output_times[o] < f.times[j]) continue;
        const auto& s = q.advance_to(output_times[o]);
        const double wj = weights[o][j];
        for (std::size_t k : entries) outh[o][k] += wj * s.phi2 * fh[j][k];
      }
    }
  }

  out.w.reserve(nt);
  for (auto& h : outh) out.w.push_back(sp.inverse(h));
  return out;
}

ZoneBoundReport zone_bound_check(double t, double r, const PropagatorSample& phi, double C0,
                                 const DampingLaw& d, Kernel which) {
  ZoneBoundReport rep;
  rep.zone = zone_classify(t, r, d);
  rep.observed = std::abs(column(phi, which));
  const double e = 1.0 - d.lambda;
  const double Te = std::pow(1.0 + t, e);
  switch (rep.zone) {
    case Zone::Z1:
      rep.bound_shape = C0 * std::exp(-C0 * r * r * Te);
      break;
    case Zone::Z2: {
      const double txi = t_xi(r, d);
      rep.bound_shape = C0 * std::exp(-C0 * Te + C0 * (1.0 - r * r) * std::pow(1.0 + txi, e));
      break;
    }
    case Zone::Z3:
      rep.bound_shape = C0 * std::exp(-C0 * Te);
      break;
  }
  rep.ratio = rep.bound_shape > 0.0 ? rep.observed / rep.bound_shape
                                    : std::numeric_limits<double>::infinity();
  return rep;
}

double sphere_area(int n) {
  switch (n) {
    case 1:
      return 2.0;
    case 2:
      return 2.0 * std::numbers::pi;
    case 3:
      return 4.0 * std::numbers::pi;
    default:
      throw ParameterError("dimension must be 1, 2 or 3");
  }
}

ZoneIntegralResult zone_integral(double t, int alpha, Zone zone, int p, const DampingLaw& d, int n,
                                 const ZoneIntegralOptions& opt) {
  validate(d);
  if (zone == Zone::Z3) throw ParameterError("zone integrals are defined on Z1 and Z2 only");
  if (p != 1 && p != 2) throw ParameterError("zone integral norm index must be 1 or 2");
  if (alpha < 0) throw ParameterError("multi-index order must be nonnegative");
  const double thr = zone_threshold(t, d);
  double lo = 0.0;
  double hi = thr;
  if (zone == Zone::Z2) {
    lo = thr;
    hi = 1.0;
  }
  ZoneIntegralResult res;
  if (!(hi > lo)) return res;

  const double area = sphere_area(n);
  auto integrand = [&](double r) {
    const double phi = column(fundamental_pair(t, r, d, opt.ode), opt.kernel);
    const double radial = std::pow(r, n - 1) * std::pow(r, alpha * p);
    return area * radial * std::pow(std::abs(phi), p);
  };
  const QuadResult q = integrate_simpson_doubling(integrand, lo, hi, opt.rtol, 3, opt.max_levels);
  res.evaluations = q.evaluations;
  if (p == 1) {
    res.value = q.value;
    res.error = q.error;
  } else {
    res.value = std::sqrt(q.value);
    res.error = res.value > 0.0 ? 0.5 * q.error / res.value : std::sqrt(q.error);
  }
  return res;
}

double zone_integral_exponent(int alpha, int p, int n, const DampingLaw& d) {
  const double e = 1.0 - d.lambda;
  return p == 1 ? e * (n / 2.0 + alpha / 2.0) : e * (n / 4.0 + alpha / 2.0);
}

double kernel_envelope_exponent(int k, double p, int n, const DampingLaw& d) {
  const double e = 1.0 - d.lambda;
  if (std::isinf(p)) return e * (n + k) / 2.0;
  if (p == 2.0) return e * (n / 4.0 + k / 2.0);
  throw ParameterError("kernel norm must be p = 2 or p = infinity");
}

KernelDecayResult kernel_decay_check(const ScalarField& g, const std::vector<double>& times,
                                     const std::vector<KernelNorm>& norms, const Grid& grid,
                                     const DampingLaw& d, const KernelDecayOptions& opt) {
  validate(d);
  require_increasing(times, "kernel times");
  int kmax = 0;
  for (const auto& kn : norms) {
    kernel_envelope_exponent(kn.k, kn.p, grid.dim(), d);
    if (kn.k < 0) throw ParameterError("derivative order must be nonnegative");
    kmax = std::max(kmax, kn.k);
  }

  Spectral sp(grid);
  KernelDecayResult res;
  const double tail = sp.tail_energy_fraction(g);
  if (tail > opt.alias_tail_fraction) res.warnings.push_back(alias_warning(tail, opt.alias_tail_fraction));

  for (double x : g) res.g_l1 += std::abs(x);
  res.g_l1 *= grid.cell_volume();

  const auto gh = sp.forward(g);
  double gmax = 0.0;
  for (const auto& c : gh) gmax = std::max(gmax, std::abs(c));

  const std::size_t nt = times.size();
  const double base = grid.wavenumber(1);
  const auto groups = group_modes(sp);
  // phi[o][k]: kernel value at time o for spectral entry k
  std::vector<std::vector<double>> phi(nt, std::vector<double>(sp.spectrum_size(), 0.0));

  for (const auto& [norm2, entries] : groups) {
    const double r = base * std::sqrt(static_cast<double>(norm2));
    double gloc = 0.0;
    for (std::size_t k : entries) gloc = std::max(gloc, std::abs(gh[k]));
    const double amp = gloc * std::pow(std::max(1.0, r), kmax);
    const double bound0 = opt.kernel == Kernel::Phi1 ? 1.0 : (r > 0.0 ? 1.0 / r : 1e300);
    if (gmax == 0.0 || amp * bound0 < opt.negligible * gmax) {
      ++res.modes_skipped;
      continue;
    }
    ++res.modes_integrated;
    ModePropagator prop(r, 0.0, d, opt.ode);
    // |phi| <= sqrt(E)/r from here on, since the mode energy cannot grow
    auto negligible = [&] {
      return r > 0.0 && amp * std::sqrt(prop.energy(opt.kernel)) / r < opt.negligible * gmax;
    };
    bool dropped = false;
    for (std::size_t o = 0; o < nt && !dropped; ++o) {
      // intermediate checkpoints let decayed modes stop before the next sample
      while (r > 0.0 && prop.sample().t < times[o] && !dropped) {
        const double t0 = prop.sample().t;
        prop.advance_to(std::min(times[o], std::max(1.25 * t0, t0 + 2.0)));
        dropped = negligible();
      }
      if (dropped) break;
      const double v = column(prop.advance_to(times[o]), opt.kernel);
      for (std::size_t k : entries) phi[o][k] = v;
      dropped = negligible();
    }
    if (dropped) ++res.modes_dropped;
  }

  Spectral::Spectrum low(sp.spectrum_size());
  Spectral::Spectrum high(sp.spectrum_size());
  ScalarField fl, fh;
  for (std::size_t o = 0; o < nt; ++o) {
    const double t = times[o];
    for (const auto& kn : norms) {
      for (std::size_t k = 0; k < sp.spectrum_size(); ++k) {
        const std::complex<double> v = phi[o][k] * gh[k] * sp.derivative_sum_symbol(k, kn.k);
        const bool z3 = zone_classify(t, std::sqrt(sp.k_squared(k)), d) == Zone::Z3;
        low[k] = z3 ? 0.0 : v;
        high[k] = z3 ? v : 0.0;
      }
      sp.inverse(low, fl);
      sp.inverse(high, fh);
      KernelDecaySample s;
      s.t = t;
      s.k = kn.k;
      s.p = kn.p;
      if (std::isinf(kn.p)) {
        for (std::size_t i = 0; i < fl.size(); ++i) {
          s.observed = std::max(s.observed, std::abs(fl[i] + fh[i]));
          s.resolved = std::max(s.resolved, std::abs(fl[i]));
          s.tail = std::max(s.tail, std::abs(fh[i]));
        }
      } else {
        for (std::size_t i = 0; i < fl.size(); ++i) {
          s.observed += (fl[i] + fh[i]) * (fl[i] + fh[i]);
          s.resolved += fl[i] * fl[i];
          s.tail += fh[i] * fh[i];
        }
        const double dv = grid.cell_volume();
        s.observed = std::sqrt(s.observed * dv);
        s.resolved = std::sqrt(s.resolved * dv);
        s.tail = std::sqrt(s.tail * dv);
      }
      s.envelope = std::pow(1.0 + t, -kernel_envelope_exponent(kn.k, kn.p, grid.dim(), d)) * res.g_l1;
      res.samples.push_back(s);
    }
  }
  return res;
}

void write_mode_table(std::ostream& os, const std::vector<ModeTableRow>& rows) {
  os << "t,xi,zone,phi1_re,phi1_im,phi2_re,phi2_im,envelope,ratio\n";
  os.precision(17);
  for (const auto& r : rows) {
    os << r.t << ',' << r.r << ',' << to_string(r.zone) << ',' << r.phi1 << ",0," << r.phi2
       << ",0," << r.envelope << ',' << r.ratio << '\n';
  }
}

}  // namespace tdeuler
