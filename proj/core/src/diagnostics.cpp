#include "tdeuler/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "tdeuler/quadrature.hpp"
#include "tdeuler/spectral.hpp"

namespace tdeuler {

namespace {

using Spectrum = Spectral::Spectrum;

ScalarField partial_from(Spectral& sp, const Spectrum& fh, const std::array<int, 3>& alpha) {
  const int n = sp.grid().dim();
  const int half = sp.grid().points() / 2;
  Spectrum out(fh.size());
  for (std::size_t k = 0; k < fh.size(); ++k) {
    std::complex<double> sym = 1.0;
    for (int a = 0; a < n; ++a) {
      if (alpha[a] == 0) continue;
      const int m = sp.mode(k)[a];
      if (std::abs(m) == half && alpha[a] % 2 == 1) {
        sym = 0.0;
        break;
      }
      sym *= std::pow(std::complex<double>(0.0, sp.wavenumber(k, a)), alpha[a]);
    }
    out[k] = fh[k] * sym;
  }
  return sp.inverse(out);
}

// sum over |alpha| = k of J(d^alpha g) on the ball
double weighted_derivative_sum(Spectral& sp, const ScalarField& g, int k, double t,
                               const WeightSpec& spec, const DampingLaw& d, double ball) {
  const Spectrum gh = sp.forward(g);
  double sum = 0.0;
  for (const auto& alpha : multi_indices(sp.grid().dim(), k))
    sum += weighted_energy(partial_from(sp, gh, alpha), t, sp.grid(), spec, d, ball).J;
  return sum;
}

double sq(double x) { return x * x; }

}  // namespace

std::vector<std::array<int, 3>> multi_indices(int n, int k) {
  std::vector<std::array<int, 3>> out;
  if (n == 1) {
    out.push_back({k, 0, 0});
  } else if (n == 2) {
    for (int a = k; a >= 0; --a) out.push_back({a, k - a, 0});
  } else {
    for (int a = k; a >= 0; --a)
      for (int b = k - a; b >= 0; --b) out.push_back({a, b, k - a - b});
  }
  return out;
}

ScalarField partial(Spectral& sp, const ScalarField& f, const std::array<int, 3>& alpha) {
  return partial_from(sp, sp.forward(f), alpha);
}

double l1_norm(const ScalarField& f, const Grid& grid) {
  double s = 0.0;
  for (double x : f) s += std::abs(x);
  return s * grid.cell_volume();
}

double l2_norm(const ScalarField& f, const Grid& grid) {
  double s = 0.0;
  for (double x : f) s += x * x;
  return std::sqrt(s * grid.cell_volume());
}

double linf_norm(const ScalarField& f) {
  double m = 0.0;
  for (double x : f) m = std::max(m, std::abs(x));
  return m;
}

double l2_norm(const VectorField& f, const Grid& grid) {
  double s = 0.0;
  for (const auto& c : f)
    for (double x : c) s += x * x;
  return std::sqrt(s * grid.cell_volume());
}

double linf_norm(const VectorField& f) {
  if (f.empty()) return 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < f[0].size(); ++i) {
    double s = 0.0;
    for (const auto& c : f) s += c[i] * c[i];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

double derivative_l2(Spectral& sp, const ScalarField& f, int k) {
  if (k == 0) return l2_norm(f, sp.grid());
  const Spectrum fh = sp.forward(f);
  double s = 0.0;
  for (const auto& alpha : multi_indices(sp.grid().dim(), k))
    s += sq(l2_norm(partial_from(sp, fh, alpha), sp.grid()));
  return std::sqrt(s);
}

double derivative_linf(Spectral& sp, const ScalarField& f, int k) {
  if (k == 0) return linf_norm(f);
  const Spectrum fh = sp.forward(f);
  double m = 0.0;
  for (const auto& alpha : multi_indices(sp.grid().dim(), k))
    m = std::max(m, linf_norm(partial_from(sp, fh, alpha)));
  return m;
}

WeightedEnergy weighted_energy(const ScalarField& g, double t, const Grid& grid,
                               const WeightSpec& spec, const DampingLaw& d, double ball_radius) {
  if (g.size() != grid.size()) throw ParameterError("field size does not match grid");
  WeightedEnergy w;
  const double scale = std::pow(1.0 + t, 1.0 + d.lambda);
  const double rate = (1.0 + d.lambda) / (1.0 + t);  // -psi_t / psi
  const double ball2 = ball_radius * ball_radius;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) r2 += sq(grid.coord(i, a));
    if (r2 > ball2) continue;
    const double psi = spec.a * r2 / scale;
    if (2.0 * psi > 700.0) {
      std::ostringstream os;
      os << "weight e^{2 psi} overflows at |x|=" << std::sqrt(r2) << ", t=" << t
         << "; shrink the integration ball or the box";
      throw DomainSizingError(os.str());
    }
    const double e = std::exp(2.0 * psi) * g[i] * g[i];
    w.J += e;
    w.J_psi += e * rate * psi;
  }
  w.J *= grid.cell_volume();
  w.J_psi *= grid.cell_volume();
  return w;
}

double weighted_energy_functional(Spectral& sp, const EulerState& s, const EulerState& s_t,
                                  const WeightSpec& spec, const DampingLaw& d, int order,
                                  double ball_radius) {
  const Grid& grid = sp.grid();
  const double t = s.t;
  double high = 0.0;
  for (int j = 0; j < order; ++j) {
    high += weighted_derivative_sum(sp, s_t.v, j, t, spec, d, ball_radius);
    high += weighted_derivative_sum(sp, s.v, j + 1, t, spec, d, ball_radius);
    for (const auto& c : s.u) high += weighted_derivative_sum(sp, c, j + 1, t, spec, d, ball_radius);
  }
  double low = weighted_energy(s.v, t, grid, spec, d, ball_radius).J;
  for (const auto& c : s.u) low += weighted_energy(c, t, grid, spec, d, ball_radius).J;
  return std::sqrt(std::pow(1.0 + t, spec.B + 1.0 + d.lambda) * high + std::pow(1.0 + t, spec.B) * low);
}

double mass_M(const PhysicalState& p, const Grid& grid) {
  double s = 0.0;
  for (double r : p.rho) s += r - 1.0;
  return s * grid.cell_volume();
}

double moment_F(const PhysicalState& p, const Grid& grid) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (int a = 0; a < grid.dim(); ++a) s += grid.coord(i, a) * p.rho[i] * p.u[a][i];
  return s * grid.cell_volume();
}

EnergyRow energy_row(EulerSolver& solver, const EulerState& s, const GasLaw& g,
                     const DampingLaw& d, const WeightSpec& spec, const RowOptions& opt) {
  Spectral& sp = solver.spectral();
  const Grid& grid = solver.grid();
  const int n = grid.dim();
  EnergyRow row;
  row.t = s.t;
  const PhysicalState p = from_symmetric(s, g);
  row.M = mass_M(p, grid);
  row.F = moment_F(p, grid);

  ScalarField drho(p.rho.size());
  for (std::size_t i = 0; i < drho.size(); ++i) drho[i] = p.rho[i] - 1.0;

  for (int k = 0; k <= opt.k_max; ++k) {
    row.rho_l2.push_back(derivative_l2(sp, drho, k));
    row.rho_linf.push_back(derivative_linf(sp, drho, k));
    row.v_l2.push_back(derivative_l2(sp, s.v, k));
    row.v_linf.push_back(derivative_linf(sp, s.v, k));
    if (k == 0) {
      row.u_l2.push_back(l2_norm(s.u, grid));
      row.u_linf.push_back(linf_norm(s.u));
    } else {
      double l2 = 0.0, li = 0.0;
      for (const auto& c : s.u) {
        l2 += sq(derivative_l2(sp, c, k));
        li = std::max(li, derivative_linf(sp, c, k));
      }
      row.u_l2.push_back(std::sqrt(l2));
      row.u_linf.push_back(li);
    }
  }

  const EulerState s_t = solver.rhs(s);
  row.vt_l2 = l2_norm(s_t.v, grid);

  const double ball = opt.ball_radius_base + s.t;
  const WeightedEnergy wv = weighted_energy(s.v, s.t, grid, spec, d, ball);
  row.J_v = wv.J;
  row.Jpsi_v = wv.J_psi;
  for (const auto& c : s.u) {
    const WeightedEnergy wu = weighted_energy(c, s.t, grid, spec, d, ball);
    row.J_u += wu.J;
    row.Jpsi_u += wu.J_psi;
  }
  row.E_psi = weighted_energy_functional(sp, s, s_t, spec, d, opt.energy_order, ball);

  double gu = 0.0;
  for (const auto& c : s.u) gu += sq(derivative_l2(sp, c, 1));
  row.grad_u_l2 = std::sqrt(gu);
  row.omega_l2 = n == 1 ? std::numeric_limits<double>::quiet_NaN()
                        : l2_norm(solver.vorticity(s), grid);

  if (opt.with_Q) {
    const ScalarField q = solver.source_Q(s, s_t);
    row.Q_l1 = l1_norm(q, grid);
    for (int k = 0; k <= opt.k_max; ++k) row.Q_l2_k.push_back(derivative_l2(sp, q, k));
  } else {
    row.Q_l2_k.assign(opt.k_max + 1, std::numeric_limits<double>::quiet_NaN());
    row.Q_l1 = std::numeric_limits<double>::quiet_NaN();
  }

  const double T = 1.0 + s.t;
  row.energy_low = std::pow(T, spec.B) * (sq(row.v_l2[0]) + sq(row.u_l2[0]));
  const double dv1 = opt.k_max >= 1 ? row.v_l2[1] : derivative_l2(sp, s.v, 1);
  const double du1 = opt.k_max >= 1 ? row.u_l2[1] : row.grad_u_l2;
  row.energy_high = std::pow(T, spec.B + 1.0 + d.lambda) * (sq(row.vt_l2) + sq(dv1) + sq(du1));
  return row;
}

std::vector<std::string> energy_csv_columns(int k_max) {
  std::vector<std::string> c{"t", "M", "F"};
  for (int k = 0; k <= k_max; ++k) {
    const std::string s = "_k" + std::to_string(k);
    for (const char* base : {"rho_l2", "rho_linf", "v_l2", "v_linf", "u_l2", "u_linf"})
      c.push_back(base + s);
  }
  for (const char* name : {"vt_l2", "J_v", "J_u", "Jpsi_v", "Jpsi_u", "E_psi", "omega_l2",
                           "grad_u_l2", "Q_l1"})
    c.push_back(name);
  for (int k = 0; k <= k_max; ++k) c.push_back("Q_l2_k" + std::to_string(k));
  c.push_back("energy_low");
  c.push_back("energy_high");
  return c;
}

void write_energy_csv(std::ostream& os, const std::vector<EnergyRow>& rows, int k_max) {
  const auto cols = energy_csv_columns(k_max);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  os.precision(17);
  for (const auto& r : rows) {
    os << r.t << ',' << r.M << ',' << r.F;
    for (int k = 0; k <= k_max; ++k)
      os << ',' << r.rho_l2[k] << ',' << r.rho_linf[k] << ',' << r.v_l2[k] << ',' << r.v_linf[k]
         << ',' << r.u_l2[k] << ',' << r.u_linf[k];
    os << ',' << r.vt_l2 << ',' << r.J_v << ',' << r.J_u << ',' << r.Jpsi_v << ',' << r.Jpsi_u
       << ',' << r.E_psi << ',' << r.omega_l2 << ',' << r.grad_u_l2 << ',' << r.Q_l1;
    for (int k = 0; k <= k_max; ++k) os << ',' << r.Q_l2_k[k];
    os << ',' << r.energy_low << ',' << r.energy_high << '\n';
  }
}

FitResult decay_fit(const std::vector<double>& t, const std::vector<double>& value, double t_lo,
                    double t_hi, Abscissa kind, double lambda) {
  if (t.size() != value.size()) throw FitError("decay fit needs equal-length series");
  if (!(t_hi >= t_lo)) throw FitError("decay fit window is empty");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(value[i] > 0.0) || !std::isfinite(value[i])) {
      std::ostringstream os;
      os << "decay fit needs positive values (got " << value[i] << " at t=" << t[i] << ")";
      throw FitError(os.str());
    }
    xs.push_back(kind == Abscissa::LogOnePlusT ? std::log1p(t[i]) : std::pow(1.0 + t[i], 1.0 - lambda));
    ys.push_back(std::log(value[i]));
  }
  if (xs.size() < 8) {
    std::ostringstream os;
    os << "decay fit needs at least 8 samples in [" << t_lo << ", " << t_hi << "] (got "
       << xs.size() << ")";
    throw FitError(os.str());
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw FitError("decay fit abscissa is degenerate");
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) ss += sq(ys[i] - f.intercept - f.slope * xs[i]);
  f.rms = std::sqrt(ss / m);
  f.t_lo = t_lo;
  f.t_hi = t_hi;
  f.kind = kind;
  f.samples = xs.size();
  if (f.rms > 0.1) {
    std::ostringstream os;
    os << "poor fit: rms residual " << f.rms << " > 0.1";
    f.warnings.push_back(os.str());
  }
  return f;
}

ConvolutionOracle convolution_oracle(double a, double b, const std::vector<double>& t_samples) {
  if (!(a > 1.0) || !(b > 0.0 && b <= a)) {
    std::ostringstream os;
    os << "convolution oracle needs a > 1 and 0 < b <= a (got a=" << a << ", b=" << b << ")";
    throw ParameterError(os.str());
  }
  ConvolutionOracle out;
  for (double t : t_samples) {
    if (!(t >= 0.0)) throw ParameterError("convolution oracle times must be >= 0");
    double ratio = 0.0;
    if (t > 0.0) {
      auto f = [&](double tau) { return std::pow(1.0 + t - tau, -a) * std::pow(1.0 + tau, -b); };
      // split at the midpoint; each half has one endpoint peak
      const double I = integrate_gk15(f, 0.0, 0.5 * t, 1e-11).value +
                       integrate_gk15(f, 0.5 * t, t, 1e-11).value;
      ratio = I / std::pow(1.0 + t, -b);
    }
    out.t.push_back(t);
    out.ratio.push_back(ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

LowerBoundMargins lower_bound_margin(const std::vector<double>& t,
                                     const std::vector<double>& rho_norm,
                                     const std::vector<double>& u_norm, double q0, double R,
                                     int n, double t0) {
  LowerBoundMargins m;
  if (!(q0 > 0.0)) {
    m.declined = true;
    m.note = "lower bounds need positive excess mass q0 > 0";
    return m;
  }
  m.inf_rho = std::numeric_limits<double>::infinity();
  m.inf_u = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0) continue;
    const double mr = rho_norm[i] * std::pow(R + t[i], n / 2.0) / q0;
    const double mu = u_norm[i] * std::pow(R + t[i], (n + 2) / 2.0) / q0;
    m.t.push_back(t[i]);
    m.m_rho.push_back(mr);
    m.m_u.push_back(mu);
    m.inf_rho = std::min(m.inf_rho, mr);
    m.inf_u = std::min(m.inf_u, mu);
  }
  if (m.t.empty()) {
    m.inf_rho = 0.0;
    m.inf_u = 0.0;
    m.note = "no samples at or after t0";
  }
  return m;
}

double ball_volume(int n, double r) {
  switch (n) {
    case 1:
      return 2.0 * r;
    case 2:
      return std::numbers::pi * r * r;
    case 3:
      return 4.0 / 3.0 * std::numbers::pi * r * r * r;
    default:
      throw ParameterError("dimension must be 1, 2 or 3");
  }
}

double cauchy_schwarz_ratio(const std::vector<double>& t, const std::vector<double>& rho_l2,
                            double q0, double R, int n) {
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    worst = std::max(worst, q0 / (rho_l2[i] * std::sqrt(ball_volume(n, R + t[i]))));
  return worst;
}

FInequality f_inequality(const std::vector<double>& t, const std::vector<double>& F, double q0,
                         int n, const DampingLaw& d) {
  FInequality out;
  out.worst_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    // second-order centered difference on a possibly uneven grid
    const double h0 = t[i] - t[i - 1];
    const double h1 = t[i + 1] - t[i];
    const double dF = (F[i + 1] * h0 * h0 - F[i - 1] * h1 * h1 + F[i] * (h1 * h1 - h0 * h0)) /
                      (h0 * h1 * (h0 + h1));
    const double lhs = dF + damping_coeff(t[i], d) * F[i];
    out.t.push_back(t[i]);
    out.lhs.push_back(lhs);
    out.worst_ratio = std::min(out.worst_ratio, lhs / (n * q0));
  }
  if (out.t.empty()) out.worst_ratio = 0.0;
  return out;
}

double q_predicted_slope(const WeightSpec& spec, const DampingLaw& d) {
  return -spec.B - (1.0 + d.lambda) / 2.0;
}

Verdict make_verdict(std::string quantity, double fitted, double predicted, double tolerance,
                     std::string relation, double residual, double t_lo, double t_hi,
                     std::string note) {
  Verdict v;
  v.quantity = std::move(quantity);
  v.fitted = fitted;
  v.predicted = predicted;
  v.tolerance = tolerance;
  v.relation = std::move(relation);
  v.residual = residual;
  v.t_lo = t_lo;
  v.t_hi = t_hi;
  v.note = std::move(note);
  if (!std::isfinite(fitted)) {
    v.pass = false;
  } else if (v.relation == "abs") {
    v.pass = std::abs(fitted - predicted) <= tolerance;
  } else if (v.relation == "le") {
    v.pass = fitted <= predicted + tolerance;
  } else if (v.relation == "ge") {
    v.pass = fitted >= predicted - tolerance;
  } else if (v.relation == "lt") {
    v.pass = fitted < predicted;
  } else if (v.relation == "gt") {
    v.pass = fitted > predicted;
  } else {
    throw ParameterError("unknown verdict relation \"" + v.relation + "\"");
  }
  return v;
}

nlohmann::json to_json(const Verdict& v) {
  return nlohmann::json{{"quantity", v.quantity},   {"fitted", v.fitted},
                        {"predicted", v.predicted}, {"tolerance", v.tolerance},
                        {"relation", v.relation},   {"residual", v.residual},
                        {"window", {v.t_lo, v.t_hi}}, {"note", v.note},
                        {"verdict", v.pass ? "pass" : "fail"}};
}

nlohmann::json to_json(const FitResult& f) {
  return nlohmann::json{{"slope", f.slope},
                        {"intercept", f.intercept},
                        {"rms", f.rms},
                        {"window", {f.t_lo, f.t_hi}},
                        {"abscissa", f.kind == Abscissa::LogOnePlusT ? "log(1+t)" : "(1+t)^(1-lambda)"},
                        {"samples", f.samples},
                        {"warnings", f.warnings}};
}

}  // namespace tdeuler
