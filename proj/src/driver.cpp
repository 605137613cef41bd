#include "nitns/driver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nitns/errors.hpp"
#include "nitns/spectral_ops.hpp"

namespace nitns {

SpectralField SimState::velocity() const {
  if (el) return weber_velocity(el->ell, el->v);
  return velocity_of(*flow);
}

SpectralField SimState::vorticity() const {
  if (el) return curl(velocity());
  return vorticity_of(*flow);
}

SimState make_state(const SolverConfig& config, const SpectralField& u0, double t0) {
  config.validate();
  require_components(u0.ncomp(), u0.grid()->dim(), "make_state");
  SimState s;
  s.formulation = config.formulation;
  switch (config.formulation) {
    case Formulation::direct:
    case Formulation::mollified:
    case Formulation::cotangent:
      s.flow = FlowState{config.formulation, u0, t0};
      break;
    case Formulation::vortex:
      s.flow = FlowState{config.formulation, curl(u0), t0};
      break;
    case Formulation::eulerian_lagrangian:
      s.el = make_el_state(u0, config.g, config.evolve_logdet, config.evolve_zeta, t0);
      break;
  }
  return s;
}

SimState advance(const SimState& state, const SolverConfig& config, double dt) {
  SimState out = state;
  if (state.el) {
    out.el = el_step(*state.el, config.nu, dt, config.scheme);
  } else {
    out.flow = step(*state.flow, config, dt);
  }
  return out;
}

namespace {

bool state_finite(const SimState& s) {
  if (s.el) {
    if (!s.el->ell.all_finite() || !s.el->v.all_finite()) return false;
    if (s.el->logdet && !s.el->logdet->all_finite()) return false;
    if (s.el->zeta && !s.el->zeta->all_finite()) return false;
    return true;
  }
  return s.flow->field.all_finite();
}

MonitorOptions monitor_options(const SolverConfig& config) {
  MonitorOptions opt;
  opt.nu = config.nu;
  opt.horizon = config.horizon_or_t_end();
  opt.g = config.g;
  opt.s0 = config.s0;
  opt.analytic_lambda = config.analytic_lambda;
  opt.analytic_p = config.analytic_p;
  if (config.formulation == Formulation::vortex || config.formulation == Formulation::cotangent) {
    opt.paired = config.mollifier;
  }
  return opt;
}

}  // namespace

RunResult run(const SolverConfig& config, const SimState& initial, const RunHooks& hooks) {
  config.validate();
  RunResult result{initial, {}, {}, 0, {}};
  Monitor monitor(monitor_options(config));
  const ELState* el = nullptr;

  auto warn = [&](const std::string& msg) {
    result.warnings.push_back(msg);
    if (hooks.on_warning) hooks.on_warning(msg);
  };

  SimState state = initial;
  SpectralField u = state.velocity();
  SpectralField omega = curl(u);
  el = state.el ? &*state.el : nullptr;
  monitor.accumulate(state.t(), u, omega, el);
  const double enstrophy0 = enstrophy(omega);

  auto emit = [&]() {
    DiagnosticsRecord r = monitor.record(u, omega, el);
    if (el) r.max_grad_ell = std::max(r.max_grad_ell, el->peak_grad_ell);
    result.records.push_back(r);
    if (hooks.on_record) hooks.on_record(r, state);
  };
  emit();

  // With a fixed dt the clock follows the grid t0 + k dt. Steps cut short by a
  // restart or by the CFL limit are completed before the grid count advances.
  const double grid_base = state.t();
  long grid_count = 0;
  long completed = 0;
  const double t_end = config.t_end;
  long step_index = 0;
  bool last_emitted = true;
  while (state.t() < t_end * (1.0 - 1e-12) && t_end - state.t() > 1e-14) {
    const double remaining = t_end - state.t();
    const double target =
        config.dt ? grid_base + static_cast<double>(grid_count + 1) * *config.dt : t_end;
    double h = config.dt ? target - state.t() : remaining;
    const double limit = cfl_limit(u, config.cfl);
    if (config.dt) {
      if (h > limit) {
        std::ostringstream msg;
        msg << "t=" << state.t() << ": dt=" << h << " exceeds the CFL limit " << limit
            << "; reduced for this step";
        warn(msg.str());
        h = limit;
      }
    } else {
      h = std::min(h, limit);
    }
    // Land exactly on t_end when the remainder is within roundoff of a step.
    if (remaining <= h * (1.0 + 1e-9)) h = remaining;

    SimState next;
    try {
      next = advance(state, config, h);
    } catch (const BlowUpError& err) {
      if (hooks.on_blowup) hooks.on_blowup(state);
      throw BlowUpError(err.what(), state.t() + h);
    }
    bool on_grid = !config.dt;
    if (config.dt && next.t() >= target - 1e-9 * *config.dt) {
      // Snap to the grid so roundoff does not accumulate in the clock.
      ++grid_count;
      on_grid = true;
      if (next.el) {
        if (next.el->t1 == next.el->t) next.el->t1 = target;
        next.el->t = target;
      } else {
        next.flow->t = target;
      }
    }
    if (!state_finite(next)) {
      if (hooks.on_blowup) hooks.on_blowup(state);
      throw BlowUpError("non-finite state", next.t());
    }
    SpectralField u_next = next.velocity();
    SpectralField omega_next = curl(u_next);
    const double ens = enstrophy(omega_next);
    if (!std::isfinite(ens) ||
        (enstrophy0 > 0.0 && ens > kBlowUpEnstrophyFactor * enstrophy0)) {
      if (hooks.on_blowup) hooks.on_blowup(state);
      throw BlowUpError("enstrophy exceeded the blow-up threshold", next.t());
    }
    state = std::move(next);
    u = std::move(u_next);
    omega = std::move(omega_next);
    el = state.el ? &*state.el : nullptr;
    ++step_index;
    monitor.accumulate(state.t(), u, omega, el);
    if (hooks.on_step) hooks.on_step(state);

    last_emitted = false;
    const bool done = !(state.t() < t_end * (1.0 - 1e-12) && t_end - state.t() > 1e-14);
    if (on_grid) ++completed;
    if ((on_grid && completed % config.output_every == 0) || done) {
      emit();
      last_emitted = true;
    }
  }
  if (!last_emitted) emit();
  result.final_state = state;
  result.steps = step_index;
  result.numbers = monitor.nondim();
  return result;
}

}  // namespace nitns
