#pragma once

#include <functional>
#include <stdexcept>

namespace tdeuler {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod 7/15 on [a, b]. Bisects the panel with
/// the largest error estimate until the total estimate meets
/// max(atol, rtol |value|). Throws QuadratureError past max_panels.
QuadResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                          double rtol = 1e-10, double atol = 0.0, int max_panels = 4000);

/// Composite Simpson rule on [a, b], doubling the node count until two
/// successive values agree to rtol. Throws QuadratureError after max_levels
/// doublings. Previously evaluated nodes are reused.
QuadResult integrate_simpson_doubling(const std::function<double(double)>& f, double a, double b,
                                      double rtol = 1e-4, int min_levels = 3, int max_levels = 20);

}  // namespace tdeuler
