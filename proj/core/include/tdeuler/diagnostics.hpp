#pragma once

#include <array>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdeuler/euler.hpp"
#include "tdeuler/grid.hpp"
#include "tdeuler/params.hpp"

namespace tdeuler {

class Spectral;

class DomainSizingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Multi-indices alpha with |alpha| = k in n dimensions, lexicographic.
std::vector<std::array<int, 3>> multi_indices(int n, int k);

/// d^alpha f by spectral multiplication; Nyquist entries dropped on odd axes.
ScalarField partial(Spectral& sp, const ScalarField& f, const std::array<int, 3>& alpha);

double l1_norm(const ScalarField& f, const Grid& grid);
double l2_norm(const ScalarField& f, const Grid& grid);
double linf_norm(const ScalarField& f);
/// L2 of the pointwise Euclidean magnitude.
double l2_norm(const VectorField& f, const Grid& grid);
double linf_norm(const VectorField& f);

/// (sum_{|alpha|=k} ||d^alpha f||_2^2)^(1/2) and max_alpha ||d^alpha f||_inf.
double derivative_l2(Spectral& sp, const ScalarField& f, int k);
double derivative_linf(Spectral& sp, const ScalarField& f, int k);

struct WeightedEnergy {
  double J = 0.0;      // int e^{2 psi} g^2
  double J_psi = 0.0;  // int e^{2 psi} (-psi_t) g^2
};

/// Grid quadrature over |x| <= ball_radius (pass infinity for the whole
/// box). Throws DomainSizingError if 2 psi > 700 at a sampled point of the
/// ball.
WeightedEnergy weighted_energy(const ScalarField& g, double t, const Grid& grid,
                               const WeightSpec& spec, const DampingLaw& d, double ball_radius);

/// sqrt{ (1+t)^(B+1+lambda) sum_{j<order} [J(d^j v_t) + J(d^(j+1) v) + J(d^(j+1) u)]
///       + (1+t)^B [J(v) + J(u)] } at one time.
double weighted_energy_functional(Spectral& sp, const EulerState& s, const EulerState& s_t,
                                  const WeightSpec& spec, const DampingLaw& d, int order,
                                  double ball_radius);

/// M = int (rho - 1) dx
double mass_M(const PhysicalState& p, const Grid& grid);
/// F = int x . (rho u) dx
double moment_F(const PhysicalState& p, const Grid& grid);

/// Fixed column order of energy.csv; k runs over 0..k_max.
///   t, M, F,
///   rho_l2_k<k>, rho_linf_k<k>, v_l2_k<k>, v_linf_k<k>, u_l2_k<k>, u_linf_k<k>  (per k),
///   vt_l2, J_v, J_u, Jpsi_v, Jpsi_u, E_psi, omega_l2, grad_u_l2, Q_l1,
///   Q_l2_k<k> (per k), energy_low, energy_high
struct EnergyRow {
  double t = 0.0;
  double M = 0.0;
  double F = 0.0;
  std::vector<double> rho_l2, rho_linf, v_l2, v_linf, u_l2, u_linf;
  double vt_l2 = 0.0;
  double J_v = 0.0, J_u = 0.0, Jpsi_v = 0.0, Jpsi_u = 0.0;
  double E_psi = 0.0;
  double omega_l2 = 0.0;  // NaN for n = 1
  double grad_u_l2 = 0.0;
  double Q_l1 = 0.0;
  std::vector<double> Q_l2_k;
  double energy_low = 0.0;   // (1+t)^B (|v|^2 + |u|^2)
  double energy_high = 0.0;  // (1+t)^(B+1+lambda) (|v_t|^2 + |dv|^2 + |du|^2)
};

struct RowOptions {
  int k_max = 2;
  int energy_order = 2;
  double ball_radius_base = 0.0;  // R + margin; the ball grows as base + t
  bool with_Q = true;
};

EnergyRow energy_row(EulerSolver& solver, const EulerState& s, const GasLaw& g,
                     const DampingLaw& d, const WeightSpec& spec, const RowOptions& opt);

std::vector<std::string> energy_csv_columns(int k_max);
void write_energy_csv(std::ostream& os, const std::vector<EnergyRow>& rows, int k_max);

enum class Abscissa { LogOnePlusT, PowerOneMinusLambda };

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  Abscissa kind = Abscissa::LogOnePlusT;
  std::size_t samples = 0;
  std::vector<std::string> warnings;
};

/// Least squares of log(value) against log(1+t) or (1+t)^(1-lambda), using
/// samples with t_lo <= t <= t_hi. Needs at least 8 samples, all positive.
FitResult decay_fit(const std::vector<double>& t, const std::vector<double>& value, double t_lo,
                    double t_hi, Abscissa kind, double lambda = 0.0);

struct ConvolutionOracle {
  std::vector<double> t;
  std::vector<double> ratio;
  double max_ratio = 0.0;
};

/// ratio(t) = int_0^t (1+t-tau)^-a (1+tau)^-b dtau / (1+t)^-b; needs a > 1, 0 < b <= a.
ConvolutionOracle convolution_oracle(double a, double b, const std::vector<double>& t_samples);

struct LowerBoundMargins {
  bool declined = false;
  std::string note;
  std::vector<double> t, m_rho, m_u;
  double inf_rho = 0.0;
  double inf_u = 0.0;
};

/// m_rho = |rho-1| (R+t)^(n/2) / q0 and m_u = |u| (R+t)^((n+2)/2) / q0 for t >= t0.
LowerBoundMargins lower_bound_margin(const std::vector<double>& t,
                                     const std::vector<double>& rho_norm,
                                     const std::vector<double>& u_norm, double q0, double R,
                                     int n, double t0);

/// Volume of the n-ball of radius r.
double ball_volume(int n, double r);

/// Worst value over snapshots of q0 / (|rho-1|_2 |B(R+t)|^(1/2)); <= 1 means
/// the Cauchy-Schwarz bound holds everywhere.
double cauchy_schwarz_ratio(const std::vector<double>& t, const std::vector<double>& rho_l2,
                            double q0, double R, int n);

struct FInequality {
  std::vector<double> t;
  std::vector<double> lhs;  // F' + b F with centered differences
  double worst_ratio = 0.0;  // min lhs / (n q0)
};

FInequality f_inequality(const std::vector<double>& t, const std::vector<double>& F, double q0,
                         int n, const DampingLaw& d);

/// Decay fits of |Q|_1 and |d^k Q|_2 series, predicted slope -B-(1+lambda)/2.
double q_predicted_slope(const WeightSpec& spec, const DampingLaw& d);

/// One pass/fail line of a report.
struct Verdict {
  std::string quantity;
  double fitted = 0.0;
  double predicted = 0.0;
  double tolerance = 0.0;
  // "abs": |fitted - predicted| <= tol; "le": fitted <= predicted + tol;
  // "ge": fitted >= predicted - tol; "lt": fitted < predicted; "gt": fitted > predicted
  std::string relation = "abs";
  double residual = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::string note;
  bool pass = false;
};

Verdict make_verdict(std::string quantity, double fitted, double predicted, double tolerance,
                     std::string relation, double residual = 0.0, double t_lo = 0.0,
                     double t_hi = 0.0, std::string note = {});

nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const FitResult& f);

}  // namespace tdeuler
