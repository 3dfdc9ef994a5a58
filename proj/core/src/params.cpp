#include "tdeuler/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tdeuler {

namespace {

std::string fmt_value(const char* what, double v) {
  std::ostringstream os;
  os << what << " (got " << v << ")";
  return os.str();
}

}  // namespace

std::string_view to_string(Zone z) {
  switch (z) {
    case Zone::Z1:
      return "Z1";
    case Zone::Z2:
      return "Z2";
    case Zone::Z3:
      return "Z3";
  }
  return "?";
}

void validate(const DampingLaw& d) {
  if (!(d.lambda >= 0.0 && d.lambda < 1.0)) {
    throw ParameterError(fmt_value("damping lambda must satisfy 0 <= lambda < 1", d.lambda));
  }
  if (!(d.mu >= 0.0) || !std::isfinite(d.mu)) {
    throw ParameterError(fmt_value("damping mu must be >= 0", d.mu));
  }
}

void validate(const GasLaw& g) {
  if (!(g.gamma > 1.0) || !std::isfinite(g.gamma)) {
    throw ParameterError(fmt_value("gas gamma must be > 1", g.gamma));
  }
}

double default_delta(const DampingLaw& d, int n) {
  return std::min(0.25, (1.0 + d.lambda) * n / 4.0);
}

WeightSpec derive_constants(const DampingLaw& d, int n, double delta) {
  if (d.lambda >= 1.0) {
    throw ParameterError(fmt_value("k_c is undefined for lambda >= 1", d.lambda));
  }
  validate(d);
  if (n < 1) throw ParameterError(fmt_value("dimension must be positive", n));
  const double cap = (1.0 + d.lambda) * n / 2.0;
  if (!(delta > 0.0 && delta <= cap)) {
    std::ostringstream os;
    os << "delta must lie in (0, (1+lambda)n/2] = (0, " << cap << "] (got " << delta << ")";
    throw ParameterError(os.str());
  }
  WeightSpec s;
  s.n = n;
  s.delta = delta;
  s.B = cap - delta;
  s.a = ((1.0 + d.lambda) * d.mu / 8.0) * (1.0 - delta / ((1.0 + d.lambda) * n));
  s.k_c = ((1.0 + d.lambda) / (1.0 - d.lambda)) * (n + 1) - n - 2.0 * delta / (1.0 - d.lambda);
  return s;
}

WeightEval weight_eval(double t, std::span<const double> x, const WeightSpec& spec,
                       const DampingLaw& d) {
  const double T = 1.0 + t;
  const double scale = std::pow(T, 1.0 + d.lambda);
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;

  WeightEval w;
  w.psi = spec.a * r2 / scale;
  w.psi_t = -(1.0 + d.lambda) / T * w.psi;
  w.grad_psi.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) w.grad_psi[i] = 2.0 * spec.a * x[i] / scale;
  w.lap_psi = 2.0 * spec.a * static_cast<double>(x.size()) / scale;
  return w;
}

double damping_coeff(double t, const DampingLaw& d) {
  if (d.lambda == 0.0) return d.mu;
  return d.mu * std::pow(1.0 + t, -d.lambda);
}

double log_integrating_factor(double t0, double t1, const DampingLaw& d) {
  if (t1 < t0) {
    std::ostringstream os;
    os << "integrating factor needs t0 <= t1 (got t0=" << t0 << ", t1=" << t1 << ")";
    throw ParameterError(os.str());
  }
  if (d.lambda == 0.0) return d.mu * (t1 - t0);
  const double e = 1.0 - d.lambda;
  // (1+t1)^e - (1+t0)^e without cancellation for nearby times
  const double diff = std::pow(1.0 + t0, e) * std::expm1(e * std::log1p((t1 - t0) / (1.0 + t0)));
  return d.mu / e * diff;
}

double integrating_factor(double t0, double t1, const DampingLaw& d) {
  return std::exp(log_integrating_factor(t0, t1, d));
}

double zone_threshold(double t, const DampingLaw& d) {
  return damping_coeff(t, d) / 4.0;
}

Zone zone_classify(double t, double r, const DampingLaw& d) {
  if (r <= zone_threshold(t, d)) return Zone::Z1;
  if (r <= 1.0) return Zone::Z2;
  return Zone::Z3;
}

double t_xi(double r, const DampingLaw& d) {
  if (!(d.lambda > 0.0)) {
    throw ParameterError("t_xi needs lambda > 0; the Z1 boundary is time independent otherwise");
  }
  if (!(r > 0.0 && r <= d.mu / 4.0)) {
    std::ostringstream os;
    os << "t_xi needs 0 < r <= mu/4 = " << d.mu / 4.0 << " (got " << r << ")";
    throw ParameterError(os.str());
  }
  return std::pow(4.0 * r / d.mu, -1.0 / d.lambda) - 1.0;
}

}  // namespace tdeuler
