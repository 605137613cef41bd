#include "nitns/field.hpp"

#include <cmath>
#include <string>

#include "nitns/errors.hpp"

namespace nitns {

int components(Rank rank, int dim) {
  switch (rank) {
    case Rank::scalar:
      return 1;
    case Rank::vector:
      return dim;
    case Rank::tensor:
      return dim * dim;
  }
  return 1;
}

SpectralField::SpectralField(GridPtr grid, int ncomp)
    : grid_(std::move(grid)), ncomp_(ncomp), data_(grid_->spectral_size() * ncomp) {}

std::span<Complex> SpectralField::comp(int c) {
  const auto n = grid_->spectral_size();
  return std::span<Complex>(data_).subspan(c * n, n);
}

std::span<const Complex> SpectralField::comp(int c) const {
  const auto n = grid_->spectral_size();
  return std::span<const Complex>(data_).subspan(c * n, n);
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  axpy(1.0, other);
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  axpy(-1.0, other);
  return *this;
}

SpectralField& SpectralField::operator*=(double a) {
  for (auto& z : data_) z *= a;
  return *this;
}

void SpectralField::axpy(double a, const SpectralField& x) {
  require_same_grid(grid_, x.grid_, "axpy");
  require_components(x.ncomp_, ncomp_, "axpy");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
}

void SpectralField::set_zero() {
  for (auto& z : data_) z = 0.0;
}

bool SpectralField::all_finite() const {
  for (const auto& z : data_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

PhysicalField::PhysicalField(GridPtr grid, int ncomp)
    : grid_(std::move(grid)),
      ncomp_(ncomp),
      stride_(grid_->physical_size()),
      data_(grid_->physical_size() * ncomp, 0.0) {}

std::span<double> PhysicalField::comp(int c) {
  return std::span<double>(data_).subspan(c * stride_, stride_);
}

std::span<const double> PhysicalField::comp(int c) const {
  return std::span<const double>(data_).subspan(c * stride_, stride_);
}

SpectralField to_spectral(const PhysicalField& f) {
  SpectralField out(f.grid(), f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c) f.grid()->forward(f.comp(c), out.comp(c));
  return out;
}

PhysicalField to_physical(const SpectralField& f) {
  PhysicalField out(f.grid(), f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c) f.grid()->inverse(f.comp(c), out.comp(c));
  return out;
}

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* op) {
  if (a == b) return;
  if (!a || !b || !a->same_shape(*b)) {
    throw ConfigError(std::string(op) + ": grid size mismatch");
  }
}

void require_components(int have, int want, const char* op) {
  if (have != want) {
    throw ConfigError(std::string(op) + ": rank mismatch (expected " + std::to_string(want) +
                      " components, got " + std::to_string(have) + ")");
  }
}

}  // namespace nitns
