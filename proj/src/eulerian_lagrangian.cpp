#include "nitns/eulerian_lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nitns/errors.hpp"
#include "nitns/solvers.hpp"
#include "nitns/spectral_ops.hpp"

namespace nitns {

namespace {

int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

// Second derivatives d_j d_k f_c at component (c * d + k) * d + j.
PhysicalField hessian(const SpectralField& f) {
  const auto& g = *f.grid();
  const int d = g.dim();
  const int nc = f.ncomp();
  SpectralField h(f.grid(), nc * d * d);
  for (int c = 0; c < nc; ++c) {
    auto fc = f.comp(c);
    for (int k = 0; k < d; ++k) {
      for (int j = k; j < d; ++j) {
        auto hkj = h.comp((c * d + k) * d + j);
        for (std::size_t s = 0; s < g.spectral_size(); ++s) {
          hkj[s] = -g.deriv_k(s, j) * g.deriv_k(s, k) * fc[s];
        }
        if (j != k) {
          auto hjk = h.comp((c * d + j) * d + k);
          std::copy(hkj.begin(), hkj.end(), hjk.begin());
        }
      }
    }
  }
  return to_physical(h);
}

PhysicalField add_identity(PhysicalField grad_ell) {
  const int d = grad_ell.grid()->dim();
  for (int m = 0; m < d; ++m) {
    for (auto& x : grad_ell.comp(m * d + m)) x += 1.0;
  }
  return grad_ell;
}

// grad^A_i f_c from a physical gradient laid out as c * d + j.
PhysicalField el_gradient_phys(const PhysicalField& grad_f, const PhysicalField& q) {
  const int d = q.grid()->dim();
  const int nc = grad_f.ncomp() / d;
  const auto np = q.grid()->physical_size();
  PhysicalField out(q.grid(), nc * d);
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < d; ++i) {
      auto o = out.comp(c * d + i);
      for (int j = 0; j < d; ++j) {
        auto gj = grad_f.comp(c * d + j);
        auto qji = q.comp(j * d + i);
        for (std::size_t p = 0; p < np; ++p) o[p] += qji[p] * gj[p];
      }
    }
  }
  return out;
}

PhysicalField curl_from_el_gradient(const PhysicalField& ga) {
  const auto& grid = ga.grid();
  const int d = grid->dim();
  const auto np = grid->physical_size();
  if (d == 2) {
    PhysicalField z(grid, 1);
    auto zc = z.comp(0);
    for (std::size_t p = 0; p < np; ++p) zc[p] = ga.at(1 * 2 + 0, p) - ga.at(0 * 2 + 1, p);
    return z;
  }
  PhysicalField z(grid, 3);
  for (int q = 0; q < 3; ++q) {
    const int i = (q + 1) % 3;
    const int j = (q + 2) % 3;
    auto zc = z.comp(q);
    // zeta_q = grad^A_i v_j - grad^A_j v_i
    for (std::size_t p = 0; p < np; ++p) zc[p] = ga.at(j * 3 + i, p) - ga.at(i * 3 + j, p);
  }
  return z;
}

Connection connection_from_hessian(const PhysicalField& h, const PhysicalField& q) {
  const int d = q.grid()->dim();
  const auto np = q.grid()->physical_size();
  Connection c{PhysicalField(q.grid(), d * d * d), d};
  for (int m = 0; m < d; ++m) {
    for (int k = 0; k < d; ++k) {
      for (int i = 0; i < d; ++i) {
        auto o = c.c.comp((m * d + k) * d + i);
        for (int j = 0; j < d; ++j) {
          auto hj = h.comp((m * d + k) * d + j);
          auto qji = q.comp(j * d + i);
          for (std::size_t p = 0; p < np; ++p) o[p] += qji[p] * hj[p];
        }
      }
    }
  }
  return c;
}

// u = P0((grad A)^T v) from physical grad A and v.
SpectralField weber_phys(const PhysicalField& grad_a, const PhysicalField& v) {
  const auto& grid = v.grid();
  const int d = grid->dim();
  const auto np = grid->physical_size();
  PhysicalField w(grid, d);
  for (int i = 0; i < d; ++i) {
    auto wi = w.comp(i);
    for (int m = 0; m < d; ++m) {
      auto jmi = grad_a.comp(m * d + i);
      auto vm = v.comp(m);
      for (std::size_t p = 0; p < np; ++p) wi[p] += jmi[p] * vm[p];
    }
  }
  SpectralField u = leray_project(finish_rhs(w, "weber_velocity"));
  remove_mean(u);
  return u;
}

PhysicalField displacement_rhs_phys(const PhysicalField& grad_ell, const PhysicalField& u) {
  PhysicalField n = advect(u, grad_ell);
  for (std::size_t i = 0; i < n.data().size(); ++i) n.data()[i] = -n.data()[i] - u.data()[i];
  return n;
}

PhysicalField virtual_velocity_rhs_phys(const PhysicalField& grad_v, const PhysicalField& u,
                                        const Connection& c, double nu) {
  const int d = u.grid()->dim();
  const auto np = u.grid()->physical_size();
  PhysicalField n = advect(u, grad_v);
  for (auto& x : n.data()) x = -x;
  if (nu != 0.0) {
    for (int i = 0; i < d; ++i) {
      auto ni = n.comp(i);
      for (int m = 0; m < d; ++m) {
        for (int k = 0; k < d; ++k) {
          auto cmki = c.c.comp((m * d + k) * d + i);
          auto dkvm = grad_v.comp(m * d + k);
          for (std::size_t p = 0; p < np; ++p) ni[p] += 2.0 * nu * cmki[p] * dkvm[p];
        }
      }
    }
  }
  return n;
}

PhysicalField virtual_vorticity_rhs_phys(const PhysicalField& zeta,
                                         const PhysicalField& grad_zeta,
                                         const PhysicalField& u, const Connection& c,
                                         double nu) {
  const auto np = u.grid()->physical_size();
  PhysicalField n = advect(u, grad_zeta);
  for (auto& x : n.data()) x = -x;
  if (nu == 0.0) return n;
  for (std::size_t p = 0; p < np; ++p) {
    double tr[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
      for (int m = 0; m < 3; ++m) tr[k] += c(m, k, m, p);
    }
    // M_{ij} = sum_k C^m_{k;i} C^r_{k;j} contracted with eps_rmp zeta_p:
    // S_{ij} = sum_{k,m,r} C^m_{k;i} C^r_{k;j} e_{rm}, e_{rm} = eps_rmp zeta_p.
    double e[3][3];
    for (int r = 0; r < 3; ++r) {
      for (int m = 0; m < 3; ++m) {
        double s = 0.0;
        for (int q = 0; q < 3; ++q) s += levi_civita(r, m, q) * zeta.at(q, p);
        e[r][m] = s;
      }
    }
    double s_ij[3][3] = {};
    for (int k = 0; k < 3; ++k) {
      for (int r = 0; r < 3; ++r) {
        for (int m = 0; m < 3; ++m) {
          if (e[r][m] == 0.0) continue;
          for (int i = 0; i < 3; ++i) {
            const double cmki = c(m, k, i, p) * e[r][m];
            for (int j = 0; j < 3; ++j) s_ij[i][j] += cmki * c(r, k, j, p);
          }
        }
      }
    }
    for (int q = 0; q < 3; ++q) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) {
        acc += 2.0 * tr[k] * grad_zeta.at(q * 3 + k, p);
        for (int j = 0; j < 3; ++j) acc -= 2.0 * c(q, k, j, p) * grad_zeta.at(j * 3 + k, p);
      }
      for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
          const int eps = levi_civita(q, j, i);
          if (eps != 0) acc += eps * s_ij[i][j];
        }
      }
      n.at(q, p) += nu * acc;
    }
  }
  return n;
}

double relative_l2(const PhysicalField& a, const PhysicalField& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double diff = a.data()[i] - b.data()[i];
    num += diff * diff;
    den += b.data()[i] * b.data()[i];
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

double max_frobenius(const PhysicalField& grad) {
  const auto np = grad.grid()->physical_size();
  double best = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    double s = 0.0;
    for (int c = 0; c < grad.ncomp(); ++c) s += grad.at(c, p) * grad.at(c, p);
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

// One step without rollback.
ELState single_step(const ELState& s, double nu, double dt, Scheme scheme) {
  State y{s.ell, s.v};
  const bool has_logdet = s.logdet.has_value();
  const bool has_zeta = s.zeta.has_value();
  if (has_logdet) y.push_back(*s.logdet);
  if (has_zeta) y.push_back(*s.zeta);
  const State next = integrating_factor_step(y, el_rhs(nu, has_logdet, has_zeta), nu, dt, scheme);
  ELState out = s;
  out.ell = next[0];
  out.v = next[1];
  std::size_t idx = 2;
  if (has_logdet) out.logdet = next[idx++];
  if (has_zeta) out.zeta = next[idx++];
  out.t = s.t + dt;
  out.peak_grad_ell = max_grad_ell(out.ell);
  if (out.peak_grad_ell >= out.g) apply_restart(out);
  return out;
}

}  // namespace

ELState make_el_state(const SpectralField& u0, double g, bool evolve_logdet, bool evolve_zeta,
                      double t) {
  const auto& grid = u0.grid();
  const int d = grid->dim();
  require_components(u0.ncomp(), d, "make_el_state");
  if (evolve_zeta && d != 3) throw ConfigError("evolved virtual vorticity requires dim = 3");
  ELState s;
  s.ell = SpectralField(grid, d);
  s.v = u0;
  if (evolve_logdet) s.logdet = SpectralField(grid, 1);
  if (evolve_zeta) s.zeta = curl(u0);
  s.t = t;
  s.t1 = t;
  s.g = g;
  return s;
}

PhysicalField grad_map(const SpectralField& ell) {
  require_components(ell.ncomp(), ell.grid()->dim(), "grad_map");
  return add_identity(to_physical(gradient(ell)));
}

InverseJacobian inverse_grad(const PhysicalField& grad_a) {
  const auto& grid = grad_a.grid();
  const int d = grid->dim();
  require_components(grad_a.ncomp(), d * d, "inverse_grad");
  const auto np = grid->physical_size();
  InverseJacobian out{PhysicalField(grid, d * d), PhysicalField(grid, 1),
                      std::numeric_limits<double>::infinity()};
  for (std::size_t p = 0; p < np; ++p) {
    double det_p;
    if (d == 3) {
      Mat3 m;
      for (int r = 0; r < 9; ++r) m[r] = grad_a.at(r, p);
      det_p = det(m);
      const Mat3 adj = adjugate(m);
      for (int r = 0; r < 9; ++r) out.q.at(r, p) = adj[r] / det_p;
    } else {
      Mat2 m{grad_a.at(0, p), grad_a.at(1, p), grad_a.at(2, p), grad_a.at(3, p)};
      det_p = det(m);
      out.q.at(0, p) = m[3] / det_p;
      out.q.at(1, p) = -m[1] / det_p;
      out.q.at(2, p) = -m[2] / det_p;
      out.q.at(3, p) = m[0] / det_p;
    }
    out.det.at(0, p) = det_p;
    out.min_abs_det = std::min(out.min_abs_det, std::abs(det_p));
  }
  if (!(out.min_abs_det >= kMinDeterminant)) {
    throw InvertibilityError("near-identity map lost invertibility: min |det grad A| = " +
                                 std::to_string(out.min_abs_det),
                             out.min_abs_det);
  }
  return out;
}

PhysicalField el_gradient(const SpectralField& f, const PhysicalField& q) {
  require_same_grid(f.grid(), q.grid(), "el_gradient");
  return el_gradient_phys(to_physical(gradient(f)), q);
}

VirtualVorticity el_curl(const SpectralField& v, const PhysicalField& q) {
  require_components(v.ncomp(), v.grid()->dim(), "el_curl");
  return VirtualVorticity{curl_from_el_gradient(el_gradient(v, q)),
                          VirtualVorticity::Provenance::derived_from_v};
}

Connection connection_coeffs(const SpectralField& ell, const PhysicalField& q) {
  require_same_grid(ell.grid(), q.grid(), "connection_coeffs");
  require_components(ell.ncomp(), ell.grid()->dim(), "connection_coeffs");
  return connection_from_hessian(hessian(ell), q);
}

SpectralField displacement_rhs(const SpectralField& ell, const SpectralField& u) {
  require_same_grid(ell.grid(), u.grid(), "displacement_rhs");
  require_components(ell.ncomp(), ell.grid()->dim(), "displacement_rhs");
  require_components(u.ncomp(), u.grid()->dim(), "displacement_rhs");
  return finish_rhs(displacement_rhs_phys(to_physical(gradient(ell)), to_physical(u)),
                    "displacement_rhs");
}

SpectralField virtual_velocity_rhs(const SpectralField& v, const SpectralField& u,
                                   const Connection& c, double nu) {
  require_same_grid(v.grid(), u.grid(), "virtual_velocity_rhs");
  require_components(v.ncomp(), v.grid()->dim(), "virtual_velocity_rhs");
  return finish_rhs(virtual_velocity_rhs_phys(to_physical(gradient(v)), to_physical(u), c, nu),
                    "virtual_velocity_rhs");
}

SpectralField weber_velocity(const SpectralField& ell, const SpectralField& v) {
  require_same_grid(ell.grid(), v.grid(), "weber_velocity");
  require_components(v.ncomp(), v.grid()->dim(), "weber_velocity");
  return weber_phys(grad_map(ell), to_physical(v));
}

PhysicalField cauchy_vorticity(const PhysicalField& zeta, const PhysicalField& grad_a) {
  const auto& grid = zeta.grid();
  const int d = grid->dim();
  require_components(grad_a.ncomp(), d * d, "cauchy_vorticity");
  const auto np = grid->physical_size();
  if (d == 2) {
    require_components(zeta.ncomp(), 1, "cauchy_vorticity");
    PhysicalField out(grid, 1);
    for (std::size_t p = 0; p < np; ++p) {
      const Mat2 m{grad_a.at(0, p), grad_a.at(1, p), grad_a.at(2, p), grad_a.at(3, p)};
      out.at(0, p) = cauchy_action(zeta.at(0, p), m);
    }
    return out;
  }
  require_components(zeta.ncomp(), 3, "cauchy_vorticity");
  PhysicalField out(grid, 3);
  for (std::size_t p = 0; p < np; ++p) {
    Mat3 m;
    for (int r = 0; r < 9; ++r) m[r] = grad_a.at(r, p);
    const Vec3 w = cauchy_action(Vec3{zeta.at(0, p), zeta.at(1, p), zeta.at(2, p)}, m);
    for (int q = 0; q < 3; ++q) out.at(q, p) = w[q];
  }
  return out;
}

SpectralField virtual_vorticity_rhs(const SpectralField& zeta, const SpectralField& u,
                                    const Connection& c, double nu) {
  if (zeta.grid()->dim() != 3) {
    throw ConfigError("evolved virtual vorticity requires dim = 3");
  }
  require_components(zeta.ncomp(), 3, "virtual_vorticity_rhs");
  return finish_rhs(virtual_vorticity_rhs_phys(to_physical(zeta), to_physical(gradient(zeta)),
                                               to_physical(u), c, nu),
                    "virtual_vorticity_rhs");
}

PhysicalField logdet_rhs(const Connection& c, double nu) {
  const int d = c.dim;
  const auto np = c.c.grid()->physical_size();
  PhysicalField out(c.c.grid(), 1);
  auto o = out.comp(0);
  for (std::size_t p = 0; p < np; ++p) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int k = 0; k < d; ++k) {
        for (int q = 0; q < d; ++q) s += c(i, k, q, p) * c(q, k, i, p);
      }
    }
    o[p] = nu * s;
  }
  return out;
}

PhysicalField connection_rate(const SpectralField& ell, const SpectralField& u, double nu) {
  const auto& grid = ell.grid();
  const int d = grid->dim();
  require_same_grid(grid, u.grid(), "connection_rate");
  require_components(u.ncomp(), d, "connection_rate");
  const auto np = grid->physical_size();

  const PhysicalField grad_a = grad_map(ell);
  const InverseJacobian inv = inverse_grad(grad_a);
  const Connection c = connection_coeffs(ell, inv.q);
  const SpectralField c_hat = to_spectral(c.c);
  const PhysicalField grad_c = to_physical(gradient(c_hat));
  const PhysicalField lap_c = to_physical(laplacian(c_hat));
  const PhysicalField u_phys = to_physical(u);
  const PhysicalField grad_u = to_physical(gradient(u));
  const PhysicalField hess_u = hessian(u);

  PhysicalField rate = advect(u_phys, grad_c);
  for (std::size_t i = 0; i < rate.data().size(); ++i) {
    rate.data()[i] = -rate.data()[i] + nu * lap_c.data()[i];
  }
  for (std::size_t p = 0; p < np; ++p) {
    for (int m = 0; m < d; ++m) {
      for (int k = 0; k < d; ++k) {
        for (int i = 0; i < d; ++i) {
          double acc = 0.0;
          for (int l = 0; l < d; ++l) {
            // grad^A_i (d_k u_l) = Q_ji d_j d_k u_l
            double ga = 0.0;
            for (int j = 0; j < d; ++j) {
              ga += inv.q.at(j * d + i, p) * hess_u.at((l * d + k) * d + j, p);
            }
            acc -= grad_a.at(m * d + l, p) * ga;
            acc -= grad_u.at(l * d + k, p) * c(m, l, i, p);
            for (int j = 0; j < d; ++j) {
              // d_l C^m_{k;j}
              const double dl = grad_c.at(((m * d + k) * d + j) * d + l, p);
              acc += 2.0 * nu * c(j, l, i, p) * dl;
            }
          }
          rate.at((m * d + k) * d + i, p) += acc;
        }
      }
    }
  }
  return rate;
}

double max_grad_ell(const SpectralField& ell) {
  return max_frobenius(to_physical(gradient(ell)));
}

RestartDecision restart_check(const ELState& state) {
  return max_grad_ell(state.ell) >= state.g ? RestartDecision::restart
                                            : RestartDecision::continue_run;
}

void apply_restart(ELState& state) {
  state.v = weber_velocity(state.ell, state.v);
  state.ell.set_zero();
  if (state.logdet) state.logdet->set_zero();
  if (state.zeta) state.zeta = curl(state.v);
  state.t1 = state.t;
  ++state.restart_count;
}

RhsFn el_rhs(double nu, bool has_logdet, bool has_zeta) {
  return [nu, has_logdet, has_zeta](const State& y) {
    const SpectralField& ell = y[0];
    const SpectralField& v = y[1];
    const PhysicalField grad_ell = to_physical(gradient(ell));
    const PhysicalField grad_a = add_identity(grad_ell);
    const InverseJacobian inv = inverse_grad(grad_a);
    const PhysicalField u = to_physical(weber_phys(grad_a, to_physical(v)));
    const Connection c = connection_from_hessian(hessian(ell), inv.q);

    State out;
    out.push_back(finish_rhs(displacement_rhs_phys(grad_ell, u), "displacement_rhs"));
    out.push_back(finish_rhs(virtual_velocity_rhs_phys(to_physical(gradient(v)), u, c, nu),
                             "virtual_velocity_rhs"));
    std::size_t idx = 2;
    if (has_logdet) {
      const SpectralField& logdet = y[idx++];
      PhysicalField n = advect(u, to_physical(gradient(logdet)));
      const PhysicalField src = logdet_rhs(c, nu);
      for (std::size_t i = 0; i < n.data().size(); ++i) {
        n.data()[i] = src.data()[i] - n.data()[i];
      }
      out.push_back(finish_rhs(n, "logdet_rhs"));
    }
    if (has_zeta) {
      const SpectralField& zeta = y[idx++];
      out.push_back(finish_rhs(virtual_vorticity_rhs_phys(to_physical(zeta),
                                                          to_physical(gradient(zeta)), u, c, nu),
                               "virtual_vorticity_rhs"));
    }
    return out;
  };
}

namespace {

// A step that carries |grad ell| well past g is redone in halves so the reset
// happens close to the threshold. A refined step ends at the reset.
ELState controlled_step(const ELState& s, double nu, double dt, Scheme scheme, int depth) {
  constexpr int kMaxRefinements = 6;
  ELState out = single_step(s, nu, dt, scheme);
  if (out.peak_grad_ell <= s.g * (1.0 + kRestartOvershoot) || depth == kMaxRefinements) {
    return out;
  }
  const ELState half = controlled_step(s, nu, 0.5 * dt, scheme, depth + 1);
  if (half.restart_count != s.restart_count || half.t < s.t + 0.5 * dt) return half;
  ELState full = controlled_step(half, nu, 0.5 * dt, scheme, depth + 1);
  full.peak_grad_ell = std::max(half.peak_grad_ell, full.peak_grad_ell);
  return full;
}

}  // namespace

ELState el_step(const ELState& state, double nu, double dt, Scheme scheme) {
  constexpr int kMaxHalvings = 5;
  for (int r = 0;; ++r) {
    const int substeps = 1 << r;
    try {
      ELState cur = state;
      double peak = 0.0;
      for (int i = 0; i < substeps; ++i) {
        const double target = state.t + dt * (i + 1) / substeps;
        cur = controlled_step(cur, nu, target - cur.t, scheme, 0);
        peak = std::max(peak, cur.peak_grad_ell);
        if (cur.t < target - 1e-12 * dt) {
          cur.peak_grad_ell = peak;
          return cur;
        }
      }
      if (cur.t1 == cur.t) cur.t1 = state.t + dt;
      cur.t = state.t + dt;
      cur.peak_grad_ell = peak;
      return cur;
    } catch (const InvertibilityError&) {
      if (r == kMaxHalvings) throw;
    }
  }
}

ELConsistency el_consistency(const ELState& state) {
  const auto& grid = state.ell.grid();
  const int d = grid->dim();
  const auto np = grid->physical_size();
  ELConsistency out;
  const PhysicalField grad_ell = to_physical(gradient(state.ell));
  out.max_grad_ell = max_frobenius(grad_ell);
  const PhysicalField grad_a = add_identity(grad_ell);
  const InverseJacobian inv = inverse_grad(grad_a);
  out.min_det = inv.min_abs_det;

  const PhysicalField zeta = el_curl(state.v, inv.q).zeta;
  const SpectralField u = weber_phys(grad_a, to_physical(state.v));
  const PhysicalField omega = to_physical(curl(u));
  out.weber_cauchy_err = relative_l2(cauchy_vorticity(zeta, grad_a), omega);

  out.logdet_err = std::numeric_limits<double>::quiet_NaN();
  if (state.logdet) {
    const PhysicalField ld = to_physical(*state.logdet);
    double err = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      err = std::max(err, std::abs(ld.at(0, p) - std::log(inv.det.at(0, p))));
    }
    out.logdet_err = err;
  }
  out.zeta_gap = std::numeric_limits<double>::quiet_NaN();
  if (state.zeta && d == 3) out.zeta_gap = relative_l2(to_physical(*state.zeta), zeta);
  return out;
}

}  // namespace nitns
