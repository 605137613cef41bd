#pragma once

#include <string>

#include "nitns/field.hpp"

namespace nitns {

enum class MollifierKind { poisson, gaussian, sharp };

/// Smoothing filter [f]_delta realised through its Fourier multiplier
/// J(delta |k|):
///   poisson   exp(-|xi|)
///   gaussian  exp(-|xi|^2 / 2)
///   sharp     indicator of |xi| <= 1 (Galerkin truncation at |k| <= 1/delta)
struct Mollifier {
  MollifierKind kind = MollifierKind::poisson;
  double delta = 0.0;

  /// J(delta * kmag). Throws ConfigError for negative delta.
  double multiplier(double kmag) const;
  void validate() const;
};

std::string to_string(MollifierKind kind);
MollifierKind parse_mollifier_kind(const std::string& name);

/// Componentwise multiplication by J(delta |k|).
SpectralField apply(const Mollifier& m, const SpectralField& f);

/// Componentwise multiplication by J(delta |k|)^(-1/2).
/// Only Poisson and Gaussian kernels are accepted. The exponent of the
/// weight is capped at 30 (delta |k| <= 60 for Poisson); modes carrying data
/// beyond that raise OverflowGuardError.
SpectralField apply_inverse_sqrt(const Mollifier& m, const SpectralField& f);

}  // namespace nitns
