#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "tdeuler/grid.hpp"

namespace tdeuler {

/// Real-to-complex FFT pair on a Grid plus the spectral operators built on it.
///
/// Spectra use the FFTW r2c layout (last axis halved to N/2+1 entries). The
/// instance owns its plans and work buffers, so it is not safe to share one
/// instance between threads; create one per worker.
class Spectral {
 public:
  using Spectrum = std::vector<std::complex<double>>;

  explicit Spectral(const Grid& grid);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const Grid& grid() const { return grid_; }
  std::size_t spectrum_size() const { return spec_size_; }

  void forward(const ScalarField& f, Spectrum& out);
  void inverse(const Spectrum& fh, ScalarField& out);
  Spectrum forward(const ScalarField& f);
  ScalarField inverse(const Spectrum& fh);

  /// Signed integer mode index per axis of spectral entry k.
  const std::array<int, 3>& mode(std::size_t k) const { return modes_[k]; }
  /// Sum of squared integer modes; |xi|^2 = (pi/L)^2 * mode_norm2.
  long mode_norm2(std::size_t k) const { return norm2_[k]; }
  double wavenumber(std::size_t k, int axis) const;
  double k_squared(std::size_t k) const;
  /// Multiplicity of entry k in Parseval sums over the half spectrum.
  double weight(std::size_t k) const { return weight_[k]; }
  /// True for entries kept by the 2/3 rule (3|m| < N on every axis).
  bool retained(std::size_t k) const { return retained_[k]; }
  bool has_nyquist(std::size_t k) const { return nyquist_[k]; }

  ScalarField derivative(const ScalarField& f, int axis, int order = 1);
  VectorField gradient(const ScalarField& f);
  ScalarField divergence(const VectorField& u);
  ScalarField laplacian(const ScalarField& f);
  /// Sum over all multi-indices |alpha| = order of d^alpha f.
  ScalarField derivative_sum(const ScalarField& f, int order);
  /// Multiplier of derivative_sum at entry k.
  std::complex<double> derivative_sum_symbol(std::size_t k, int order) const;

  void dealias(ScalarField& f);
  void dealias(Spectrum& fh) const;

  /// Fraction of spectral energy held by entries beyond half the Nyquist
  /// index on some axis.
  double tail_energy_fraction(const ScalarField& f);
  /// Same, summed over several fields.
  double tail_energy_fraction(const std::vector<const ScalarField*>& fields);

  /// Parseval: sum_x f^2 dV computed from a spectrum.
  double spectral_l2_squared(const Spectrum& fh) const;

 private:
  Grid grid_;
  std::size_t spec_size_ = 0;
  std::vector<std::array<int, 3>> modes_;
  std::vector<long> norm2_;
  std::vector<double> weight_;
  std::vector<bool> retained_;
  std::vector<bool> nyquist_;

  double* real_buf_ = nullptr;
  void* spec_buf_ = nullptr;
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
  Spectrum scratch_;
};

}  // namespace tdeuler
