#include "tdeuler/spectral.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace tdeuler {

namespace {

// FFTW planning is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Spectral::Spectral(const Grid& grid) : grid_(grid) {
  const int n = grid.dim();
  const int N = grid.points();
  const int half = N / 2 + 1;
  spec_size_ = static_cast<std::size_t>(half);
  for (int a = 0; a < n - 1; ++a) spec_size_ *= static_cast<std::size_t>(N);

  modes_.resize(spec_size_);
  norm2_.resize(spec_size_);
  weight_.resize(spec_size_);
  retained_.resize(spec_size_);
  nyquist_.resize(spec_size_);
  for (std::size_t k = 0; k < spec_size_; ++k) {
    std::size_t rem = k;
    std::array<int, 3> m{0, 0, 0};
    const int last = rem % half;
    rem /= half;
    m[n - 1] = last;
    for (int a = n - 2; a >= 0; --a) {
      const int j = static_cast<int>(rem % N);
      rem /= N;
      m[a] = j < N / 2 ? j : j - N;
    }
    modes_[k] = m;
    long s = 0;
    bool keep = true;
    bool nyq = false;
    for (int a = 0; a < n; ++a) {
      s += static_cast<long>(m[a]) * m[a];
      if (3 * std::abs(m[a]) >= N) keep = false;
      if (std::abs(m[a]) == N / 2) nyq = true;
    }
    norm2_[k] = s;
    retained_[k] = keep;
    nyquist_[k] = nyq;
    weight_[k] = (last == 0 || last == N / 2) ? 1.0 : 2.0;
  }

  real_buf_ = fftw_alloc_real(grid.size());
  spec_buf_ = fftw_alloc_complex(spec_size_);
  if (!real_buf_ || !spec_buf_) throw std::bad_alloc();
  int dims[3] = {N, N, N};
  {
    std::lock_guard lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft_r2c(n, dims, real_buf_, static_cast<fftw_complex*>(spec_buf_),
                                  FFTW_ESTIMATE);
    plan_inv_ = fftw_plan_dft_c2r(n, dims, static_cast<fftw_complex*>(spec_buf_), real_buf_,
                                  FFTW_ESTIMATE);
  }
  if (!plan_fwd_ || !plan_inv_) throw std::runtime_error("FFTW plan creation failed");
}

Spectral::~Spectral() {
  std::lock_guard lock(planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_inv_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_free(real_buf_);
  fftw_free(spec_buf_);
}

void Spectral::forward(const ScalarField& f, Spectrum& out) {
  if (f.size() != grid_.size()) throw std::invalid_argument("field size does not match grid");
  std::memcpy(real_buf_, f.data(), f.size() * sizeof(double));
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  out.resize(spec_size_);
  std::memcpy(static_cast<void*>(out.data()), spec_buf_, spec_size_ * sizeof(fftw_complex));
}

void Spectral::inverse(const Spectrum& fh, ScalarField& out) {
  if (fh.size() != spec_size_) throw std::invalid_argument("spectrum size does not match grid");
  std::memcpy(spec_buf_, static_cast<const void*>(fh.data()), spec_size_ * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  out.resize(grid_.size());
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = real_buf_[i] * scale;
}

Spectral::Spectrum Spectral::forward(const ScalarField& f) {
  Spectrum out;
  forward(f, out);
  return out;
}

ScalarField Spectral::inverse(const Spectrum& fh) {
  ScalarField out;
  inverse(fh, out);
  return out;
}

double Spectral::wavenumber(std::size_t k, int axis) const {
  return grid_.wavenumber(modes_[k][axis]);
}

double Spectral::k_squared(std::size_t k) const {
  const double base = grid_.wavenumber(1);
  return base * base * static_cast<double>(norm2_[k]);
}

ScalarField Spectral::derivative(const ScalarField& f, int axis, int order) {
  forward(f, scratch_);
  const std::complex<double> I(0.0, 1.0);
  for (std::size_t k = 0; k < spec_size_; ++k) {
    const int m = modes_[k][axis];
    if ((order % 2 == 1) && std::abs(m) == grid_.points() / 2) {
      scratch_[k] = 0.0;
      continue;
    }
    scratch_[k] *= std::pow(I * grid_.wavenumber(m), order);
  }
  return inverse(scratch_);
}

VectorField Spectral::gradient(const ScalarField& f) {
  forward(f, scratch_);
  const Spectrum fh = scratch_;
  VectorField g(grid_.dim());
  const std::complex<double> I(0.0, 1.0);
  for (int a = 0; a < grid_.dim(); ++a) {
    for (std::size_t k = 0; k < spec_size_; ++k) {
      const int m = modes_[k][a];
      scratch_[k] = std::abs(m) == grid_.points() / 2 ? 0.0 : fh[k] * I * grid_.wavenumber(m);
    }
    inverse(scratch_, g[a]);
  }
  return g;
}

ScalarField Spectral::divergence(const VectorField& u) {
  Spectrum acc(spec_size_, 0.0);
  const std::complex<double> I(0.0, 1.0);
  for (int a = 0; a < grid_.dim(); ++a) {
    forward(u[a], scratch_);
    for (std::size_t k = 0; k < spec_size_; ++k) {
      const int m = modes_[k][a];
      if (std::abs(m) == grid_.points() / 2) continue;
      acc[k] += scratch_[k] * I * grid_.wavenumber(m);
    }
  }
  return inverse(acc);
}

ScalarField Spectral::laplacian(const ScalarField& f) {
  forward(f, scratch_);
  for (std::size_t k = 0; k < spec_size_; ++k) scratch_[k] *= -k_squared(k);
  return inverse(scratch_);
}

std::complex<double> Spectral::derivative_sum_symbol(std::size_t k, int order) const {
  if (order == 0) return 1.0;
  if (nyquist_[k]) return 0.0;
  // complete homogeneous symmetric polynomial h_order(i xi_1, ..., i xi_n)
  const std::complex<double> I(0.0, 1.0);
  std::vector<std::complex<double>> h(order + 1, 0.0);
  h[0] = 1.0;
  for (int a = 0; a < grid_.dim(); ++a) {
    const std::complex<double> z = I * grid_.wavenumber(modes_[k][a]);
    for (int j = 1; j <= order; ++j) h[j] += z * h[j - 1];
  }
  return h[order];
}

ScalarField Spectral::derivative_sum(const ScalarField& f, int order) {
  if (order == 0) return f;
  forward(f, scratch_);
  for (std::size_t k = 0; k < spec_size_; ++k) scratch_[k] *= derivative_sum_symbol(k, order);
  return inverse(scratch_);
}

void Spectral::dealias(Spectrum& fh) const {
  for (std::size_t k = 0; k < spec_size_; ++k)
    if (!retained_[k]) fh[k] = 0.0;
}

void Spectral::dealias(ScalarField& f) {
  forward(f, scratch_);
  dealias(scratch_);
  inverse(scratch_, f);
}

double Spectral::tail_energy_fraction(const ScalarField& f) {
  return tail_energy_fraction(std::vector<const ScalarField*>{&f});
}

double Spectral::tail_energy_fraction(const std::vector<const ScalarField*>& fields) {
  const int quarter = grid_.points() / 4;
  double tail = 0.0;
  double total = 0.0;
  for (const ScalarField* f : fields) {
    forward(*f, scratch_);
    for (std::size_t k = 0; k < spec_size_; ++k) {
      const double e = weight_[k] * std::norm(scratch_[k]);
      total += e;
      bool high = false;
      for (int a = 0; a < grid_.dim(); ++a)
        if (std::abs(modes_[k][a]) > quarter) high = true;
      if (high) tail += e;
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

double Spectral::spectral_l2_squared(const Spectrum& fh) const {
  double s = 0.0;
  for (std::size_t k = 0; k < spec_size_; ++k) s += weight_[k] * std::norm(fh[k]);
  return s * grid_.cell_volume() / static_cast<double>(grid_.size());
}

}  // namespace tdeuler
