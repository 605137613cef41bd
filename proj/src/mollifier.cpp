#include "nitns/mollifier.hpp"

#include <cmath>
#include <vector>

#include "nitns/errors.hpp"

namespace nitns {

namespace {

// Largest admissible exponent of J^(-1/2).
constexpr double kMaxInverseExponent = 30.0;

}  // namespace

void Mollifier::validate() const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw ConfigError("mollifier.delta must be a finite value >= 0");
  }
}

double Mollifier::multiplier(double kmag) const {
  validate();
  const double xi = delta * kmag;
  switch (kind) {
    case MollifierKind::poisson:
      return std::exp(-xi);
    case MollifierKind::gaussian:
      return std::exp(-0.5 * xi * xi);
    case MollifierKind::sharp:
      return xi <= 1.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

std::string to_string(MollifierKind kind) {
  switch (kind) {
    case MollifierKind::poisson:
      return "poisson";
    case MollifierKind::gaussian:
      return "gaussian";
    case MollifierKind::sharp:
      return "sharp";
  }
  return "poisson";
}

MollifierKind parse_mollifier_kind(const std::string& name) {
  if (name == "poisson") return MollifierKind::poisson;
  if (name == "gaussian") return MollifierKind::gaussian;
  if (name == "sharp" || name == "sharp_truncation" || name == "galerkin") {
    return MollifierKind::sharp;
  }
  throw ConfigError("unknown mollifier kind '" + name + "'");
}

SpectralField apply(const Mollifier& m, const SpectralField& f) {
  m.validate();
  SpectralField out = f;
  if (m.delta == 0.0) return out;
  const auto& g = *f.grid();
  std::vector<double> factor(g.spectral_size());
  for (std::size_t s = 0; s < g.spectral_size(); ++s) factor[s] = m.multiplier(g.k_magnitude(s));
  for (int c = 0; c < out.ncomp(); ++c) {
    auto oc = out.comp(c);
    for (std::size_t s = 0; s < g.spectral_size(); ++s) oc[s] *= factor[s];
  }
  return out;
}

SpectralField apply_inverse_sqrt(const Mollifier& m, const SpectralField& f) {
  m.validate();
  if (m.kind == MollifierKind::sharp) {
    throw ConfigError("apply_inverse_sqrt: sharp truncation has no inverse outside its band");
  }
  SpectralField out = f;
  if (m.delta == 0.0) return out;
  const auto& g = *f.grid();
  // Exponent of J^(-1/2) at xi = delta |k|.
  auto exponent = [&](double xi) {
    return m.kind == MollifierKind::poisson ? 0.5 * xi : 0.25 * xi * xi;
  };
  const double xi_max = m.kind == MollifierKind::poisson ? 2.0 * kMaxInverseExponent
                                                         : std::sqrt(4.0 * kMaxInverseExponent);
  for (std::size_t s = 0; s < g.spectral_size(); ++s) {
    const double xi = m.delta * g.k_magnitude(s);
    bool carries_data = false;
    for (int c = 0; c < out.ncomp(); ++c) carries_data = carries_data || out.comp(c)[s] != 0.0;
    if (!carries_data) continue;
    if (xi > xi_max) {
      throw OverflowGuardError("apply_inverse_sqrt: delta*|k| = " + std::to_string(xi) +
                                   " exceeds the overflow guard " + std::to_string(xi_max),
                               xi_max / g.k_magnitude(s));
    }
    const double factor = std::exp(exponent(xi));
    for (int c = 0; c < out.ncomp(); ++c) out.comp(c)[s] *= factor;
  }
  return out;
}

}  // namespace nitns
