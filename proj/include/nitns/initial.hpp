#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "nitns/field.hpp"

namespace nitns {

enum class InitialKind { taylor_green, abc, random_band };

std::string to_string(InitialKind kind);
InitialKind parse_initial_kind(const std::string& name);

struct InitialCondition {
  InitialKind kind = InitialKind::taylor_green;
  std::uint64_t seed = 0;
  /// Velocity scale for taylor_green and abc; target kinetic energy for
  /// random_band.
  double amplitude = 1.0;
  /// Shell |k| in [kmin, kmax] of random_band and of the perturbation.
  double kmin = 1.0;
  double kmax = 2.0;
  /// random_band only: rescale to this initial Reynolds number instead.
  std::optional<double> r0;
  /// Seeded random-band perturbation added to taylor_green or abc, with
  /// kinetic energy equal to this fraction of the base field's energy.
  double perturbation = 0.0;
};

/// Zero-mean, divergence-free, dealiased initial velocity. nu is needed only
/// when r0 is set. Throws ConfigError for an empty shell or a kind that does
/// not exist in the grid dimension.
SpectralField make_initial_velocity(const InitialCondition& ic, const GridPtr& grid,
                                    double nu = 0.0);

/// Seeded zero-mean real field with independent Gaussian coefficients on
/// 0 < |k| <= kmax, scaled so the largest grid value has magnitude amplitude.
/// Not divergence-free; used for property checks.
SpectralField random_field(const GridPtr& grid, int ncomp, std::uint64_t seed, double kmax,
                           double amplitude = 1.0);

/// R0 = nu^-1 (int |u|^2)^1/4 (int |grad u|^2)^1/4.
double initial_reynolds(const SpectralField& u, double nu);

}  // namespace nitns
