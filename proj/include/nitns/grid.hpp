#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace nitns {

using Complex = std::complex<double>;

/// Periodic box [0, 2pi)^dim sampled with n points per axis.
///
/// Physical arrays are row-major with axis 0 (x) slowest. Spectral arrays use
/// the real-to-complex half layout: the last axis keeps wavenumbers 0..n/2,
/// the others run over 0..n-1 with the usual wrap to negative wavenumbers.
/// Coefficients follow u(x) = sum_k u_k exp(i k.x), so the forward transform
/// carries the 1/N factor and the inverse is a plain sum.
class Grid {
 public:
  static std::shared_ptr<const Grid> create(int dim, int n);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t physical_size() const { return physical_size_; }
  std::size_t spectral_size() const { return spectral_size_; }

  /// (2 pi)^dim.
  double volume() const { return volume_; }
  /// Grid spacing 2 pi / n.
  double spacing() const { return 2.0 * std::numbers::pi / n_; }
  double coordinate(int i) const { return spacing() * i; }
  /// Coordinates of a flat physical index (unused axes are zero).
  std::array<double, 3> point(std::size_t flat) const;

  /// Integer lattice vector of a spectral index (unused axes are zero).
  const std::array<int, 3>& wavevector(std::size_t s) const { return kvec_[s]; }
  /// Wavenumber used for odd derivatives: Nyquist components are zeroed.
  double deriv_k(std::size_t s, int axis) const { return kderiv_[s * 3 + axis]; }
  double k_squared(std::size_t s) const { return k2_[s]; }
  double k_magnitude(std::size_t s) const { return kmag_[s]; }
  /// |deriv_k|^2, the symbol of minus the Laplacian seen by odd operators.
  double deriv_k_squared(std::size_t s) const { return kd2_[s]; }
  /// Two-thirds rule: max_i |k_i| <= n/3.
  bool in_dealias_mask(std::size_t s) const { return mask_[s] != 0; }
  /// Number of lattice points a half-layout entry stands for (1 or 2).
  double multiplicity(std::size_t s) const { return weight_[s]; }
  /// Largest |k| present in the dealias mask.
  double max_masked_k() const { return max_masked_k_; }

  void forward(std::span<const double> phys, std::span<Complex> spec) const;
  void inverse(std::span<const Complex> spec, std::span<double> phys) const;

  bool same_shape(const Grid& other) const {
    return dim_ == other.dim_ && n_ == other.n_;
  }

 private:
  Grid(int dim, int n);

  int dim_;
  int n_;
  std::size_t physical_size_;
  std::size_t spectral_size_;
  double volume_;
  double max_masked_k_ = 0.0;
  std::vector<std::array<int, 3>> kvec_;
  std::vector<double> kderiv_;
  std::vector<double> k2_;
  std::vector<double> kmag_;
  std::vector<double> kd2_;
  std::vector<double> weight_;
  std::vector<unsigned char> mask_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace nitns
