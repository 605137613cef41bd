#pragma once

#include <span>
#include <vector>

#include "nitns/grid.hpp"

namespace nitns {

enum class Rank { scalar, vector, tensor };

/// Number of components of a rank on a grid of the given dimension.
int components(Rank rank, int dim);

/// Spectral coefficients of a multi-component periodic field.
/// Component c occupies the contiguous block [c * spectral_size, (c+1) * spectral_size).
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(GridPtr grid, int ncomp);
  SpectralField(GridPtr grid, Rank rank) : SpectralField(grid, components(rank, grid->dim())) {}

  const GridPtr& grid() const { return grid_; }
  int ncomp() const { return ncomp_; }
  bool empty() const { return grid_ == nullptr; }

  std::span<Complex> comp(int c);
  std::span<const Complex> comp(int c) const;
  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double a);
  /// this += a * x
  void axpy(double a, const SpectralField& x);
  void set_zero();
  bool all_finite() const;

 private:
  GridPtr grid_;
  int ncomp_ = 0;
  std::vector<Complex> data_;
};

/// Grid-point values of a multi-component periodic field, same block layout.
class PhysicalField {
 public:
  PhysicalField() = default;
  PhysicalField(GridPtr grid, int ncomp);

  const GridPtr& grid() const { return grid_; }
  int ncomp() const { return ncomp_; }

  std::span<double> comp(int c);
  std::span<const double> comp(int c) const;
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  double& at(int c, std::size_t i) { return data_[c * stride_ + i]; }
  double at(int c, std::size_t i) const { return data_[c * stride_ + i]; }

 private:
  GridPtr grid_;
  int ncomp_ = 0;
  std::size_t stride_ = 0;
  std::vector<double> data_;
};

SpectralField to_spectral(const PhysicalField& f);
PhysicalField to_physical(const SpectralField& f);

/// Throws ConfigError when the two grids differ in shape.
void require_same_grid(const GridPtr& a, const GridPtr& b, const char* op);
/// Throws ConfigError when ncomp does not match.
void require_components(int have, int want, const char* op);

}  // namespace nitns
