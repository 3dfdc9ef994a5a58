#pragma once

#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace tdeuler {

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Friction law mu / (1+t)^lambda.
///
/// The decay theory needs 0 < lambda < 1 and mu > 0. lambda = 0 (constant
/// damping) and mu = 0 (free wave) are accepted as validation regimes because
/// both have closed-form solutions; `validation_mode()` reports them.
struct DampingLaw {
  double lambda = 0.5;
  double mu = 1.0;

  bool validation_mode() const { return lambda == 0.0 || mu == 0.0; }
};

/// Polytropic pressure p(rho) = rho^gamma / gamma.
struct GasLaw {
  double gamma = 2.0;
};

struct WeightSpec {
  int n = 1;
  double delta = 0.25;
  double a = 0.0;    // weight amplitude
  double B = 0.0;    // decay index (1+lambda)n/2 - delta
  double k_c = 0.0;  // critical derivative order
};

/// psi(t,x) = a|x|^2 / (1+t)^(1+lambda) and its derivatives at one point.
struct WeightEval {
  double psi = 0.0;
  double psi_t = 0.0;
  std::vector<double> grad_psi;
  double lap_psi = 0.0;
};

enum class Zone { Z1 = 1, Z2 = 2, Z3 = 3 };

std::string_view to_string(Zone z);

// Throw ParameterError on laws outside the admitted range
// (0 <= lambda < 1, mu >= 0, gamma > 1).
void validate(const DampingLaw& d);
void validate(const GasLaw& g);

/// min(0.25, (1+lambda)n/4).
double default_delta(const DampingLaw& d, int n);

WeightSpec derive_constants(const DampingLaw& d, int n, double delta);

WeightEval weight_eval(double t, std::span<const double> x, const WeightSpec& spec,
                       const DampingLaw& d);

/// mu (1+t)^-lambda
double damping_coeff(double t, const DampingLaw& d);

/// (mu/(1-lambda)) ((1+t1)^(1-lambda) - (1+t0)^(1-lambda)), the log of the
/// integrating factor. Finite where the factor itself would overflow.
double log_integrating_factor(double t0, double t1, const DampingLaw& d);

/// exp(log_integrating_factor). y' + mu(1+t)^-lambda y = 0 has
/// y(t1) = y(t0) / integrating_factor(t0, t1).
double integrating_factor(double t0, double t1, const DampingLaw& d);

/// Upper edge of the low-frequency zone: mu / (4 (1+t)^lambda).
double zone_threshold(double t, const DampingLaw& d);

/// Boundary ties resolve to the lower-index zone.
Zone zone_classify(double t, double r, const DampingLaw& d);

/// Time at which frequency r leaves Z1: r = mu / (4 (1+t_xi)^lambda).
/// Defined for lambda > 0 and 0 < r <= mu/4.
double t_xi(double r, const DampingLaw& d);

}  // namespace tdeuler
