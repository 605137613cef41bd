#include "nitns/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nitns/errors.hpp"
#include "nitns/spectral_ops.hpp"

namespace nitns {

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::direct:
      return "direct";
    case Formulation::mollified:
      return "mollified";
    case Formulation::vortex:
      return "vortex";
    case Formulation::cotangent:
      return "cotangent";
    case Formulation::eulerian_lagrangian:
      return "eulerian_lagrangian";
  }
  return "direct";
}

Formulation parse_formulation(const std::string& name) {
  if (name == "direct") return Formulation::direct;
  if (name == "mollified") return Formulation::mollified;
  if (name == "vortex") return Formulation::vortex;
  if (name == "cotangent") return Formulation::cotangent;
  if (name == "eulerian_lagrangian" || name == "el") return Formulation::eulerian_lagrangian;
  throw ConfigError("unknown formulation '" + name + "'");
}

void SolverConfig::validate() const {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw ConfigError("nu must be >= 0");
  if (dt && !(*dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(cfl > 0.0)) throw ConfigError("cfl must be > 0");
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
  const bool needs_mollifier = formulation == Formulation::mollified ||
                               formulation == Formulation::vortex ||
                               formulation == Formulation::cotangent;
  if (needs_mollifier && !mollifier) {
    throw ConfigError("formulation " + to_string(formulation) + " requires a mollifier");
  }
  if (mollifier) mollifier->validate();
  if (formulation == Formulation::eulerian_lagrangian && !(g > 0.0 && g < 1.0)) {
    throw ConfigError("el.g must lie in (0, 1)");
  }
  if (output_every < 1) throw ConfigError("output.every must be >= 1");
  if (analytic_p != 1 && analytic_p != 2) throw ConfigError("analytic p must be 1 or 2");
  if (!(analytic_lambda >= 0.0)) throw ConfigError("analytic lambda must be >= 0");
  if (!(s0 > 0.0 && s0 < 1.0)) throw ConfigError("el.s0 must lie in (0, 1)");
}

PhysicalField advect(const PhysicalField& a, const PhysicalField& grad_f) {
  const int d = a.grid()->dim();
  require_components(a.ncomp(), d, "advect");
  const int nc = grad_f.ncomp() / d;
  PhysicalField out(a.grid(), nc);
  const auto np = a.grid()->physical_size();
  for (int c = 0; c < nc; ++c) {
    auto o = out.comp(c);
    for (int j = 0; j < d; ++j) {
      auto aj = a.comp(j);
      auto gj = grad_f.comp(c * d + j);
      for (std::size_t i = 0; i < np; ++i) o[i] += aj[i] * gj[i];
    }
  }
  return out;
}

SpectralField finish_rhs(const PhysicalField& f, const char* op) {
  SpectralField out = to_spectral(f);
  dealias_in_place(out);
  if (!out.all_finite()) {
    throw BlowUpError(std::string(op) + ": non-finite right-hand side",
                      std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

namespace {

// P(-a . grad u) for advecting velocity a (spectral) and advected u.
SpectralField projected_advection(const SpectralField& a, const SpectralField& u,
                                  const char* op) {
  const PhysicalField a_phys = to_physical(a);
  const PhysicalField grad_u = to_physical(gradient(u));
  PhysicalField n = advect(a_phys, grad_u);
  for (auto& x : n.data()) x = -x;
  SpectralField out = leray_project(finish_rhs(n, op));
  remove_mean(out);
  return out;
}

}  // namespace

SpectralField nse_rhs(const SpectralField& u) {
  require_components(u.ncomp(), u.grid()->dim(), "nse_rhs");
  return projected_advection(u, u, "nse_rhs");
}

SpectralField mollified_rhs(const SpectralField& u, const Mollifier& m) {
  require_components(u.ncomp(), u.grid()->dim(), "mollified_rhs");
  return projected_advection(apply(m, u), u, "mollified_rhs");
}

SpectralField vortex_rhs(const SpectralField& omega, const Mollifier& m) {
  const auto& grid = omega.grid();
  const int d = grid->dim();
  const SpectralField mu = apply(m, biot_savart(omega));
  const PhysicalField mu_phys = to_physical(mu);
  PhysicalField n = advect(mu_phys, to_physical(gradient(omega)));
  for (auto& x : n.data()) x = -x;
  if (d == 3) {
    const PhysicalField w_phys = to_physical(omega);
    const PhysicalField stretch = advect(w_phys, to_physical(gradient(mu)));
    for (std::size_t i = 0; i < n.data().size(); ++i) n.data()[i] += stretch.data()[i];
  }
  SpectralField out = finish_rhs(n, "vortex_rhs");
  remove_mean(out);
  return out;
}

SpectralField cotangent_rhs(const SpectralField& w, const Mollifier& m) {
  const auto& grid = w.grid();
  const int d = grid->dim();
  require_components(w.ncomp(), d, "cotangent_rhs");
  const SpectralField mu = apply(m, leray_project(w));
  const PhysicalField mu_phys = to_physical(mu);
  const PhysicalField w_phys = to_physical(w);
  const PhysicalField grad_mu = to_physical(gradient(mu));
  PhysicalField n = advect(mu_phys, to_physical(gradient(w)));
  const auto np = grid->physical_size();
  for (int i = 0; i < d; ++i) {
    auto ni = n.comp(i);
    for (int j = 0; j < d; ++j) {
      // (grad [u])^T w: component i is sum_j d_i [u]_j w_j.
      auto dij = grad_mu.comp(j * d + i);
      auto wj = w_phys.comp(j);
      for (std::size_t p = 0; p < np; ++p) ni[p] += dij[p] * wj[p];
    }
  }
  for (auto& x : n.data()) x = -x;
  return finish_rhs(n, "cotangent_rhs");
}

SpectralField velocity_of(const FlowState& state) {
  switch (state.formulation) {
    case Formulation::vortex:
      return biot_savart(state.field);
    case Formulation::cotangent: {
      SpectralField u = leray_project(state.field);
      remove_mean(u);
      return u;
    }
    default:
      return state.field;
  }
}

SpectralField vorticity_of(const FlowState& state) {
  if (state.formulation == Formulation::vortex) return state.field;
  return curl(state.field);
}

RhsFn formulation_rhs(const SolverConfig& config) {
  const Mollifier m = config.mollifier.value_or(Mollifier{});
  switch (config.formulation) {
    case Formulation::direct:
      return [](const State& y) { return State{nse_rhs(y[0])}; };
    case Formulation::mollified:
      return [m](const State& y) { return State{mollified_rhs(y[0], m)}; };
    case Formulation::vortex:
      return [m](const State& y) { return State{vortex_rhs(y[0], m)}; };
    case Formulation::cotangent:
      return [m](const State& y) { return State{cotangent_rhs(y[0], m)}; };
    case Formulation::eulerian_lagrangian:
      break;
  }
  throw ConfigError("formulation_rhs: the Eulerian-Lagrangian system has its own stepper");
}

double cfl_limit(const SpectralField& u, double cfl) {
  const PhysicalField up = to_physical(u);
  const int d = u.grid()->dim();
  double umax = 0.0;
  for (std::size_t i = 0; i < u.grid()->physical_size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < d; ++c) s += up.at(c, i) * up.at(c, i);
    umax = std::max(umax, std::sqrt(s));
  }
  if (umax == 0.0) return std::numeric_limits<double>::infinity();
  return cfl * u.grid()->spacing() / umax;
}

FlowState step(const FlowState& state, const SolverConfig& config, double dt) {
  SolverConfig c = config;
  c.formulation = state.formulation;
  const State next =
      integrating_factor_step(State{state.field}, formulation_rhs(c), config.nu, dt, config.scheme);
  return FlowState{state.formulation, next[0], state.t + dt};
}

}  // namespace nitns
