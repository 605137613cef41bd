#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nitns/field.hpp"

namespace nitns {

enum class Scheme { rk2, rk4 };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

/// A system state: every entry diffuses with the same viscosity.
using State = std::vector<SpectralField>;
/// Nonlinear (non-diffusive) part of the right-hand side.
using RhsFn = std::function<State(const State&)>;

/// One integrating-factor Runge-Kutta step of dy/dt = nu Lap y + N(y).
/// Diffusion is applied exactly as exp(-nu |k|^2 h); RK2 is the Heun
/// variant and RK4 the classical Lawson scheme.
State integrating_factor_step(const State& y, const RhsFn& rhs, double nu, double dt,
                              Scheme scheme);

}  // namespace nitns
