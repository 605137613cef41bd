#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "nitns/field.hpp"

namespace nitns::test {

using PointFn = std::function<std::vector<double>(double, double, double)>;

inline PhysicalField sample_physical(const GridPtr& grid, int ncomp, const PointFn& fn) {
  PhysicalField f(grid, ncomp);
  for (std::size_t p = 0; p < grid->physical_size(); ++p) {
    const auto x = grid->point(p);
    const auto v = fn(x[0], x[1], x[2]);
    for (int c = 0; c < ncomp; ++c) f.at(c, p) = v[c];
  }
  return f;
}

inline SpectralField sample(const GridPtr& grid, int ncomp, const PointFn& fn) {
  return to_spectral(sample_physical(grid, ncomp, fn));
}

inline double max_abs(const PhysicalField& f) {
  double m = 0.0;
  for (double x : f.data()) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const PhysicalField& a, const PhysicalField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

inline double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  return max_abs_diff(to_physical(a), to_physical(b));
}

inline double max_abs_diff(const SpectralField& a, const PhysicalField& b) {
  return max_abs_diff(to_physical(a), b);
}

inline double max_abs_diff(const PhysicalField& a, const SpectralField& b) {
  return max_abs_diff(a, to_physical(b));
}

inline double max_abs(const SpectralField& f) { return max_abs(to_physical(f)); }

/// Spectral coefficient of lattice vector k in component c, read from the
/// half layout (conjugated when only -k is stored).
inline Complex coefficient(const SpectralField& f, int c, std::array<int, 3> k) {
  const auto& g = *f.grid();
  for (std::size_t s = 0; s < g.spectral_size(); ++s) {
    const auto& w = g.wavevector(s);
    if (w == k) return f.comp(c)[s];
    if (w[0] == -k[0] && w[1] == -k[1] && w[2] == -k[2]) return std::conj(f.comp(c)[s]);
  }
  return Complex(0.0, 0.0);
}

}  // namespace nitns::test
