#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nitns/diagnostics.hpp"
#include "nitns/eulerian_lagrangian.hpp"
#include "nitns/solvers.hpp"

namespace nitns {

/// Either a single-field flow state or an Eulerian-Lagrangian state.
struct SimState {
  Formulation formulation = Formulation::direct;
  std::optional<FlowState> flow;
  std::optional<ELState> el;

  double t() const { return el ? el->t : flow->t; }
  SpectralField velocity() const;
  SpectralField vorticity() const;
};

/// Builds the evolved variables from an initial velocity: u (direct,
/// mollified), curl u (vortex), w = u (cotangent), or ell = 0, v = u.
SimState make_state(const SolverConfig& config, const SpectralField& u0, double t0 = 0.0);

SimState advance(const SimState& state, const SolverConfig& config, double dt);

struct RunHooks {
  /// Called for every emitted record (step 0, every output_every steps, last).
  std::function<void(const DiagnosticsRecord&, const SimState&)> on_record;
  /// Called every step after the state is accepted.
  std::function<void(const SimState&)> on_step;
  std::function<void(const std::string&)> on_warning;
  /// Receives the last finite state before a blow-up is reported.
  std::function<void(const SimState&)> on_blowup;
};

struct RunResult {
  SimState final_state;
  std::vector<DiagnosticsRecord> records;
  NondimNumbers numbers;
  long steps = 0;
  std::vector<std::string> warnings;
};

/// Enstrophy growth factor treated as a blow-up.
inline constexpr double kBlowUpEnstrophyFactor = 1e12;

/// Advances to config.t_end. A fixed dt above the CFL limit is reduced for
/// that step with a warning. Throws BlowUpError after handing the last good
/// state to on_blowup.
RunResult run(const SolverConfig& config, const SimState& initial, const RunHooks& hooks = {});

}  // namespace nitns
