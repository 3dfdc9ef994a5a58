#include "tdeuler/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

namespace tdeuler {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights at kXgk[1], kXgk[3], kXgk[5], kXgk[7]
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace

QuadResult integrate_gk15(const std::function<double(double)>& f, double a, double b, double rtol,
                          double atol, int max_panels) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<Panel> heap;
  Panel first = gk15(f, a, b);
  heap.push(first);
  double value = first.value;
  double error = first.error;
  int panels = 1;
  out.evaluations = 15;
  while (error > std::max(atol, rtol * std::abs(value))) {
    if (panels >= max_panels) {
      std::ostringstream os;
      os << "Gauss-Kronrod did not converge on [" << a << ", " << b << "]: estimate " << value
         << ", error " << error;
      throw QuadratureError(os.str());
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = gk15(f, worst.a, mid);
    Panel right = gk15(f, mid, worst.b);
    out.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // re-add from the panels to limit drift from incremental updates
  double sum = 0.0;
  double err = 0.0;
  std::vector<Panel> all;
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& p, const Panel& q) { return p.a < q.a; });
  for (const Panel& p : all) {
    sum += p.value;
    err += p.error;
  }
  out.value = sum;
  out.error = err;
  return out;
}

QuadResult integrate_simpson_doubling(const std::function<double(double)>& f, double a, double b,
                                      double rtol, int min_levels, int max_levels) {
  QuadResult out;
  if (a == b) return out;
  // sums of f at endpoints, odd nodes and even interior nodes
  const double ends = f(a) + f(b);
  long intervals = 2;
  double even = 0.0;
  double odd = f(0.5 * (a + b));
  out.evaluations = 3;
  double prev = (b - a) / 6.0 * (ends + 4.0 * odd);
  for (int level = 1; level <= max_levels; ++level) {
    even += odd;
    intervals *= 2;
    const double h = (b - a) / static_cast<double>(intervals);
    odd = 0.0;
    for (long i = 1; i < intervals; i += 2) odd += f(a + h * static_cast<double>(i));
    out.evaluations += static_cast<int>(intervals / 2);
    const double cur = h / 3.0 * (ends + 4.0 * odd + 2.0 * even);
    const double diff = std::abs(cur - prev);
    if (level >= min_levels && diff <= rtol * std::abs(cur)) {
      out.value = cur;
      out.error = diff;
      return out;
    }
    prev = cur;
  }
  std::ostringstream os;
  os << "composite Simpson did not reach relative agreement " << rtol << " on [" << a << ", " << b
     << "] after " << max_levels << " doublings";
  throw QuadratureError(os.str());
}

}  // namespace tdeuler
