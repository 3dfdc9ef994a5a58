#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace tdeuler {

using ScalarField = std::vector<double>;
using VectorField = std::vector<ScalarField>;

/// Periodic box [-L, L)^n sampled with N points per axis (row-major, last
/// axis fastest). The whole-space problem is embedded in this torus.
class Grid {
 public:
  Grid() = default;
  Grid(int n, double L, int N);

  int dim() const { return n_; }
  double half_length() const { return L_; }
  int points() const { return N_; }
  double dx() const { return 2.0 * L_ / N_; }
  double cell_volume() const;
  std::size_t size() const { return size_; }

  std::array<int, 3> index(std::size_t flat) const;
  double coord(std::size_t flat, int axis) const;
  double radius(std::size_t flat) const;

  /// pi m / L, the angular wavenumber of integer mode m.
  double wavenumber(int m) const;

  ScalarField zeros() const { return ScalarField(size_, 0.0); }
  VectorField zeros_vector() const { return VectorField(n_, ScalarField(size_, 0.0)); }

  bool operator==(const Grid&) const = default;

 private:
  int n_ = 1;
  double L_ = 1.0;
  int N_ = 16;
  std::size_t size_ = 16;
};

}  // namespace tdeuler
