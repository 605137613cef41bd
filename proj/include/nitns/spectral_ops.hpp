#pragma once

#include "nitns/field.hpp"

namespace nitns {

// Exact spectral differentiation. Multi-component inputs are differentiated
// componentwise; the gradient of an m-component field has m * dim
// components laid out as index c * dim + j for d f_c / d x_j.
SpectralField gradient(const SpectralField& f);
SpectralField divergence(const SpectralField& v);
/// 3D: vector curl. 2D: the scalar d1 v2 - d2 v1.
SpectralField curl(const SpectralField& v);
SpectralField laplacian(const SpectralField& f);

/// Projection onto divergence-free fields, P(k) = I - k k^T / |k|^2 per mode.
/// The k = 0 mean is passed through unchanged.
SpectralField leray_project(const SpectralField& v);

/// Velocity from vorticity via -Lap psi = omega, u = curl psi.
/// 3D: vector omega; 2D: scalar omega, u = (d2 psi, -d1 psi).
/// Throws ConfigError for a vorticity with non-zero mean.
SpectralField biot_savart(const SpectralField& omega);

/// Zero every mode outside the two-thirds mask.
SpectralField dealias(const SpectralField& f);
void dealias_in_place(SpectralField& f);

void remove_mean(SpectralField& f);

/// Multiply every mode by exp(-nu_t |k|^2) (heat semigroup over nu * t).
void apply_heat(SpectralField& f, double nu_t);

/// sum over the full lattice of |f_k|^2, all components.
double lattice_sum_sq(const SpectralField& f);
/// sum over the full lattice of Re(f_k conj(g_k)), all components.
double lattice_inner(const SpectralField& f, const SpectralField& g);
/// Lattice sum with a per-mode weight that depends on the mode index.
template <class Weight>
double weighted_lattice_sum_sq(const SpectralField& f, Weight&& w) {
  const auto& g = *f.grid();
  double total = 0.0;
  for (int c = 0; c < f.ncomp(); ++c) {
    auto fc = f.comp(c);
    for (std::size_t s = 0; s < g.spectral_size(); ++s) {
      total += g.multiplicity(s) * w(s) * std::norm(fc[s]);
    }
  }
  return total;
}

/// Physical-space grid quadrature of the dot product of two fields,
/// (2 pi)^d / N * sum_x f(x).g(x).
double quadrature_inner(const PhysicalField& f, const PhysicalField& g);

}  // namespace nitns
