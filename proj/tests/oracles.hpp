#pragma once

// Reference computations written independently of the library: plain
// textbook methods, slow but easy to trust.

#include <array>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

// adaptive Simpson with Richardson correction
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// starts from 16 panels so a symmetric or sparse integrand cannot fool the
// first estimate
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  constexpr int panels = 16;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + (b - a) * i / panels, hi = a + (b - a) * (i + 1) / panels;
    const double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    sum += simpson_rec(f, lo, hi, fa, fm, fb, whole, tol / panels, 50);
  }
  return sum;
}

// classical RK4 on w'' + b(t) w' + r^2 w = 0 with a fixed step
inline std::array<double, 2> rk4_mode(double r, double t0, double t1, std::array<double, 2> y,
                                      const std::function<double(double)>& b, int steps) {
  const double h = (t1 - t0) / steps;
  auto f = [&](double t, const std::array<double, 2>& z) {
    return std::array<double, 2>{z[1], -r * r * z[0] - b(t) * z[1]};
  };
  double t = t0;
  for (int i = 0; i < steps; ++i) {
    const auto k1 = f(t, y);
    const auto k2 = f(t + h / 2, {y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
    const auto k3 = f(t + h / 2, {y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
    const auto k4 = f(t + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
    for (int j = 0; j < 2; ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    t += h;
  }
  return y;
}

// naive DFT pair, forward unnormalized
inline std::vector<std::complex<double>> dft(const std::vector<double>& f) {
  const std::size_t N = f.size();
  std::vector<std::complex<double>> out(N);
  for (std::size_t k = 0; k < N; ++k) {
    std::complex<double> s = 0.0;
    for (std::size_t j = 0; j < N; ++j) s += f[j] * std::polar(1.0, -2.0 * M_PI * double(k * j) / N);
    out[k] = s;
  }
  return out;
}

inline std::vector<double> idft(const std::vector<std::complex<double>>& F) {
  const std::size_t N = F.size();
  std::vector<double> out(N);
  for (std::size_t j = 0; j < N; ++j) {
    std::complex<double> s = 0.0;
    for (std::size_t k = 0; k < N; ++k) s += F[k] * std::polar(1.0, 2.0 * M_PI * double(k * j) / N);
    out[j] = s.real() / N;
  }
  return out;
}

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
  std::size_t count = 0;
};

inline Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  Line l;
  l.count = x.size();
  l.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  l.intercept = (sy - l.slope * sx) / m;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (l.intercept + l.slope * x[i]);
    ss += e * e;
  }
  l.rms = std::sqrt(ss / m);
  return l;
}

// log y against log(1+t) over [lo, hi]
inline Line loglog_slope(const std::vector<double>& t, const std::vector<double>& y, double lo, double hi) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= lo && t[i] <= hi) {
      xs.push_back(std::log1p(t[i]));
      ys.push_back(std::log(y[i]));
    }
  return least_squares(xs, ys);
}

// header-keyed numeric CSV
struct Table {
  std::map<std::string, std::vector<double>> col;
  const std::vector<double>& operator[](const std::string& k) const {
    auto it = col.find(k);
    if (it == col.end()) throw std::runtime_error("no column " + k);
    return it->second;
  }
};

inline Table read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(is, line);
  std::vector<std::string> names;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) names.push_back(cell);
  }
  Table t;
  while (std::getline(is, line)) {
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t i = 0; std::getline(ss, cell, ','); ++i)
      if (i < names.size()) t.col[names[i]].push_back(std::strtod(cell.c_str(), nullptr));
  }
  return t;
}

inline std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace oracle
