#include "nitns/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <string>

#include "nitns/errors.hpp"

namespace nitns {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (ptr == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::shared_ptr<const Grid> Grid::create(int dim, int n) {
  if (dim != 2 && dim != 3) {
    throw ConfigError("grid dimension must be 2 or 3, got " + std::to_string(dim));
  }
  if (n < 8 || !is_power_of_two(n)) {
    throw ConfigError("n must be even power of two (>= 8), got " + std::to_string(n));
  }
  return std::shared_ptr<const Grid>(new Grid(dim, n));
}

Grid::Grid(int dim, int n) : dim_(dim), n_(n) {
  physical_size_ = 1;
  for (int d = 0; d < dim; ++d) physical_size_ *= static_cast<std::size_t>(n);
  const int nh = n / 2 + 1;
  spectral_size_ = physical_size_ / static_cast<std::size_t>(n) * nh;
  volume_ = std::pow(2.0 * std::numbers::pi, dim);

  kvec_.resize(spectral_size_);
  kderiv_.assign(spectral_size_ * 3, 0.0);
  k2_.resize(spectral_size_);
  kmag_.resize(spectral_size_);
  kd2_.resize(spectral_size_);
  weight_.resize(spectral_size_);
  mask_.resize(spectral_size_);

  auto wrap = [n](int j) { return j <= n / 2 ? j : j - n; };
  const int nfull = dim == 3 ? n : 1;
  std::size_t s = 0;
  for (int j0 = 0; j0 < n; ++j0) {
    for (int j1 = 0; j1 < nfull; ++j1) {
      for (int jh = 0; jh < nh; ++jh, ++s) {
        std::array<int, 3> k{0, 0, 0};
        k[0] = wrap(j0);
        if (dim == 3) {
          k[1] = wrap(j1);
          k[2] = jh;
        } else {
          k[1] = jh;
        }
        kvec_[s] = k;
        double k2 = 0.0;
        double kd2 = 0.0;
        int kmax = 0;
        for (int d = 0; d < dim; ++d) {
          const double kd = (std::abs(k[d]) == n / 2) ? 0.0 : static_cast<double>(k[d]);
          kderiv_[s * 3 + d] = kd;
          k2 += static_cast<double>(k[d]) * k[d];
          kd2 += kd * kd;
          kmax = std::max(kmax, std::abs(k[d]));
        }
        k2_[s] = k2;
        kmag_[s] = std::sqrt(k2);
        kd2_[s] = kd2;
        weight_[s] = (jh == 0 || jh == n / 2) ? 1.0 : 2.0;
        mask_[s] = (3 * kmax <= n) ? 1 : 0;
        if (mask_[s] != 0) max_masked_k_ = std::max(max_masked_k_, kmag_[s]);
      }
    }
  }

  std::array<int, 3> dims{n, n, n};
  FftwBuffer in(sizeof(double) * physical_size_);
  FftwBuffer out(sizeof(fftw_complex) * spectral_size_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_r2c(dim, dims.data(), static_cast<double*>(in.ptr),
                                    static_cast<fftw_complex*>(out.ptr), FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r(dim, dims.data(), static_cast<fftw_complex*>(out.ptr),
                                    static_cast<double*>(in.ptr), FFTW_ESTIMATE);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    throw ConfigError("FFTW planning failed");
  }
}

Grid::~Grid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (forward_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

std::array<double, 3> Grid::point(std::size_t flat) const {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const auto nn = static_cast<std::size_t>(n_);
  for (int d = dim_ - 1; d >= 0; --d) {
    x[d] = coordinate(static_cast<int>(flat % nn));
    flat /= nn;
  }
  return x;
}

void Grid::forward(std::span<const double> phys, std::span<Complex> spec) const {
  if (phys.size() != physical_size_ || spec.size() != spectral_size_) {
    throw ConfigError("forward transform: array size does not match grid");
  }
  FftwBuffer in(sizeof(double) * physical_size_);
  FftwBuffer out(sizeof(fftw_complex) * spectral_size_);
  std::memcpy(in.ptr, phys.data(), sizeof(double) * physical_size_);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), static_cast<double*>(in.ptr),
                       static_cast<fftw_complex*>(out.ptr));
  const double scale = 1.0 / static_cast<double>(physical_size_);
  const auto* o = static_cast<const Complex*>(out.ptr);
  for (std::size_t s = 0; s < spectral_size_; ++s) spec[s] = o[s] * scale;
}

void Grid::inverse(std::span<const Complex> spec, std::span<double> phys) const {
  if (phys.size() != physical_size_ || spec.size() != spectral_size_) {
    throw ConfigError("inverse transform: array size does not match grid");
  }
  // c2r overwrites its input.
  FftwBuffer in(sizeof(fftw_complex) * spectral_size_);
  FftwBuffer out(sizeof(double) * physical_size_);
  std::memcpy(in.ptr, spec.data(), sizeof(fftw_complex) * spectral_size_);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       static_cast<fftw_complex*>(in.ptr), static_cast<double*>(out.ptr));
  std::memcpy(phys.data(), out.ptr, sizeof(double) * physical_size_);
}

}  // namespace nitns
