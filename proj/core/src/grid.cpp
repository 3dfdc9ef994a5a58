#include "tdeuler/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tdeuler/params.hpp"

namespace tdeuler {

Grid::Grid(int n, double L, int N) : n_(n), L_(L), N_(N) {
  if (n < 1 || n > 3) {
    std::ostringstream os;
    os << "grid dimension must be 1, 2 or 3 (got " << n << ")";
    throw ParameterError(os.str());
  }
  if (N < 16 || (N & (N - 1)) != 0) {
    std::ostringstream os;
    os << "grid points per axis must be a power of two >= 16 (got " << N << ")";
    throw ParameterError(os.str());
  }
  if (!(L > 0.0) || !std::isfinite(L)) {
    std::ostringstream os;
    os << "grid half-length must be positive (got " << L << ")";
    throw ParameterError(os.str());
  }
  size_ = 1;
  for (int i = 0; i < n; ++i) size_ *= static_cast<std::size_t>(N);
}

double Grid::cell_volume() const { return std::pow(dx(), n_); }

std::array<int, 3> Grid::index(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = n_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % N_);
    flat /= N_;
  }
  return idx;
}

double Grid::coord(std::size_t flat, int axis) const {
  return -L_ + index(flat)[axis] * dx();
}

double Grid::radius(std::size_t flat) const {
  const auto idx = index(flat);
  double r2 = 0.0;
  for (int a = 0; a < n_; ++a) {
    const double x = -L_ + idx[a] * dx();
    r2 += x * x;
  }
  return std::sqrt(r2);
}

double Grid::wavenumber(int m) const { return std::numbers::pi * m / L_; }

}  // namespace tdeuler
