#pragma once

#include <optional>
#include <string>

#include "nitns/field.hpp"
#include "nitns/mollifier.hpp"
#include "nitns/stepper.hpp"

namespace nitns {

enum class Formulation { direct, mollified, vortex, cotangent, eulerian_lagrangian };

std::string to_string(Formulation f);
Formulation parse_formulation(const std::string& name);

struct SolverConfig {
  double nu = 0.0;
  /// Fixed step; when empty the step follows the CFL target.
  std::optional<double> dt;
  double cfl = 0.5;
  double t_end = 0.0;
  Formulation formulation = Formulation::direct;
  std::optional<Mollifier> mollifier;
  Scheme scheme = Scheme::rk4;

  // Eulerian-Lagrangian options.
  double g = 0.1;
  bool evolve_logdet = false;
  bool evolve_zeta = false;

  /// Diagnostics cadence in steps.
  int output_every = 1;
  /// Analytic norm parameters reported in every record.
  double analytic_lambda = 0.1;
  int analytic_p = 2;
  /// Transience fraction s0 of the lambda-tilde formula.
  double s0 = 0.25;
  /// Horizon T for Gevrey and non-dimensional numbers; defaults to t_end.
  std::optional<double> horizon;

  void validate() const;
  double horizon_or_t_end() const { return horizon.value_or(t_end); }
};

/// The evolved field of the single-field formulations:
/// velocity u (direct, mollified), vorticity (vortex), cotangent w.
struct FlowState {
  Formulation formulation = Formulation::direct;
  SpectralField field;
  double t = 0.0;
};

// Nonlinear right-hand sides; viscosity enters only through the integrating
// factor of the stepper. All outputs are dealiased and raise BlowUpError on
// non-finite values.

/// P(-u . grad u), zero mean.
SpectralField nse_rhs(const SpectralField& u);
/// P(-[u] . grad u), zero mean.
SpectralField mollified_rhs(const SpectralField& u, const Mollifier& m);
/// -[u] . grad omega + omega . grad [u] with u from Biot-Savart;
/// the stretching term is absent in 2D.
SpectralField vortex_rhs(const SpectralField& omega, const Mollifier& m);
/// -[u] . grad w - (grad [u])^T w with [u] = J_delta P w.
SpectralField cotangent_rhs(const SpectralField& w, const Mollifier& m);

/// Velocity carried by a single-field state (u, Biot-Savart of omega, or P w).
SpectralField velocity_of(const FlowState& state);
/// Vorticity of a single-field state (curl u, omega, or curl w).
SpectralField vorticity_of(const FlowState& state);

/// Right-hand side matching the configured formulation.
RhsFn formulation_rhs(const SolverConfig& config);

/// Largest step allowed by the CFL target for velocity u.
double cfl_limit(const SpectralField& u, double cfl);

/// Advance one step of size dt.
FlowState step(const FlowState& state, const SolverConfig& config, double dt);

// Pointwise helpers shared with the Eulerian-Lagrangian module.

/// (a . grad) f for every component of f, given the physical gradient of f
/// laid out as in gradient().
PhysicalField advect(const PhysicalField& a, const PhysicalField& grad_f);
/// Forward transform, dealias, and non-finite check.
SpectralField finish_rhs(const PhysicalField& f, const char* op);

}  // namespace nitns
