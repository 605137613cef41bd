#include <doctest.h>

#include <cmath>

#include "nitns/driver.hpp"
#include "nitns/errors.hpp"
#include "nitns/eulerian_lagrangian.hpp"
#include "nitns/initial.hpp"
#include "nitns/solvers.hpp"
#include "nitns/spectral_ops.hpp"
#include "nitns/tensor.hpp"
#include "support.hpp"

using namespace nitns;
using namespace nitns::test;

namespace {

// ell = (a sin y, 0, 0).
SpectralField shear(const GridPtr& g, double a) {
  return sample(g, g->dim(), [a, d = g->dim()](double, double y, double) {
    std::vector<double> v(d, 0.0);
    v[0] = a * std::sin(y);
    return v;
  });
}

SpectralField band_velocity(const GridPtr& g, std::uint64_t seed, double kmax = 2.0) {
  InitialCondition ic;
  ic.kind = InitialKind::random_band;
  ic.seed = seed;
  ic.kmin = 1.0;
  ic.kmax = kmax;
  return make_initial_velocity(ic, g);
}

}  // namespace

TEST_CASE("Cauchy action") {
  CHECK(cauchy_action(Vec3{1.0, -2.0, 0.5}, identity3()) == Vec3{1.0, -2.0, 0.5});
  const Mat3 m{2, 0, 0, 0, 1, 0, 0, 0, 1};
  const Vec3 r = cauchy_action(Vec3{0, 1, 0}, m);
  CHECK(r[0] == doctest::Approx(0.0));
  CHECK(r[1] == doctest::Approx(2.0));
  CHECK(r[2] == doctest::Approx(0.0));
  // Rank two: third column is the sum of the first two.
  const Mat3 s{1, 2, 3, 0, 1, 1, 2, 0, 2};
  const Vec3 q{0.3, -1.0, 2.0};
  const Vec3 c = cauchy_action(q, s);
  const Vec3 want = matvec(adjugate(s), q);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::isfinite(c[i]));
    CHECK(c[i] == doctest::Approx(want[i]).epsilon(1e-14));
  }
  CHECK(det(s) == doctest::Approx(0.0));
}

TEST_CASE("identity map") {
  for (int dim : {2, 3}) {
    const auto g = Grid::create(dim, 16);
    const SpectralField zero(g, dim);
    const PhysicalField ga = grad_map(zero);
    const InverseJacobian inv = inverse_grad(ga);
    for (std::size_t p = 0; p < g->physical_size(); p += 7) {
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
          CHECK(ga.at(i * dim + j, p) == (i == j ? 1.0 : 0.0));
          CHECK(inv.q.at(i * dim + j, p) == (i == j ? 1.0 : 0.0));
        }
      }
      CHECK(inv.det.at(0, p) == 1.0);
    }
    const Connection c = connection_coeffs(zero, inv.q);
    CHECK(max_abs(c.c) == 0.0);

    // Q = I: el_gradient and el_curl reduce to the Eulerian operators.
    const SpectralField v = band_velocity(g, 3);
    CHECK(max_abs_diff(curl(v), el_curl(v, inv.q).zeta) < 1e-14);
    CHECK(max_abs_diff(gradient(v), el_gradient(v, inv.q)) < 1e-14);
    CHECK(max_abs_diff(cauchy_vorticity(el_curl(v, inv.q).zeta, ga), el_curl(v, inv.q).zeta) == 0.0);
  }
}

TEST_CASE("nilpotent shear map") {
  const auto g = Grid::create(3, 16);
  const double a = 0.05;
  const SpectralField ell = shear(g, a);
  const PhysicalField ga = grad_map(ell);
  const InverseJacobian inv = inverse_grad(ga);
  double e_ga = 0.0, e_q = 0.0, e_det = 0.0;
  for (std::size_t p = 0; p < g->physical_size(); ++p) {
    const double cy = a * std::cos(g->point(p)[1]);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double id = i == j ? 1.0 : 0.0;
        const double off = (i == 0 && j == 1) ? cy : 0.0;
        e_ga = std::max(e_ga, std::abs(ga.at(i * 3 + j, p) - id - off));
        e_q = std::max(e_q, std::abs(inv.q.at(i * 3 + j, p) - id + off));
      }
    }
    e_det = std::max(e_det, std::abs(inv.det.at(0, p) - 1.0));
  }
  CHECK(e_ga < 1e-15);
  CHECK(e_q < 1e-15);
  CHECK(e_det < 1e-15);

  // grad^A of f = sin x + sin y is (cos x, cos y - a cos y cos x, 0).
  const auto f = sample(g, 1, [](double x, double y, double) { return std::vector{std::sin(x) + std::sin(y)}; });
  const auto want = sample_physical(g, 3, [a](double x, double y, double) {
    return std::vector{std::cos(x), std::cos(y) - a * std::cos(y) * std::cos(x), 0.0};
  });
  CHECK(max_abs_diff(el_gradient(f, inv.q), want) < 1e-14);

  // Only C^1_{2;2} = -a sin y survives; C is linear in a.
  const Connection c = connection_coeffs(ell, inv.q);
  const SpectralField ell2 = shear(g, 2 * a);
  const Connection c2 = connection_coeffs(ell2, inverse_grad(grad_map(ell2)).q);
  double err = 0.0, lin = 0.0;
  for (std::size_t p = 0; p < g->physical_size(); ++p) {
    const double sy = std::sin(g->point(p)[1]);
    for (int m = 0; m < 3; ++m) {
      for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 3; ++i) {
          const double w = (m == 0 && k == 1 && i == 1) ? -a * sy : 0.0;
          err = std::max(err, std::abs(c(m, k, i, p) - w));
          lin = std::max(lin, std::abs(c2(m, k, i, p) - 2.0 * c(m, k, i, p)));
        }
      }
    }
  }
  CHECK(err < 1e-15);
  CHECK(lin < 1e-15);
  CHECK(max_abs(logdet_rhs(c, 1.0)) < 1e-30);

  // 2D shear: det = 1 and so omega = zeta.
  const auto g2 = Grid::create(2, 16);
  const SpectralField ell2d = shear(g2, a);
  const PhysicalField ga2 = grad_map(ell2d);
  const auto z = el_curl(band_velocity(g2, 5), inverse_grad(ga2).q).zeta;
  CHECK(max_abs_diff(cauchy_vorticity(z, ga2), z) < 1e-15);
}

TEST_CASE("Weber velocity") {
  const auto g = Grid::create(3, 16);
  const SpectralField zero(g, 3);
  const SpectralField v = band_velocity(g, 9);
  CHECK(max_abs_diff(weber_velocity(zero, v), v) < 1e-15);
  const SpectralField phi = sample(g, 1, [](double x, double y, double z) {
    return std::vector{std::sin(x) * std::cos(2 * y) + std::cos(z)};
  });
  CHECK(max_abs(weber_velocity(zero, gradient(phi))) < 1e-15);

  // Shear with v = (sin z, 0, 0): (grad A)^T v = (sin z, a cos y sin z, 0),
  // projected mode by mode.
  const double a = 0.05;
  const auto vz = sample(g, 3, [](double, double, double z) { return std::vector{std::sin(z), 0.0, 0.0}; });
  const auto want = sample_physical(g, 3, [a](double, double y, double z) {
    return std::vector{std::sin(z), 0.5 * a * std::cos(y) * std::sin(z),
                       -0.5 * a * std::sin(y) * std::cos(z)};
  });
  CHECK(max_abs_diff(weber_velocity(shear(g, a), vz), want) < 1e-10);
}

TEST_CASE("displacement right-hand side") {
  const auto g = Grid::create(2, 16);
  const SpectralField u = band_velocity(g, 4);
  const SpectralField zero(g, 2);
  auto minus_u = u;
  minus_u *= -1.0;
  CHECK(max_abs_diff(displacement_rhs(zero, u), minus_u) < 1e-15);
  CHECK(max_abs(displacement_rhs(random_field(g, 2, 1, 3.0, 0.1), zero)) == 0.0);

  // One inviscid step: ell = -u dt + O(dt^2).
  auto err = [&](double dt) {
    const ELState s = el_step(make_el_state(u, 0.5, false, false), 0.0, dt, Scheme::rk4);
    auto want = u;
    want *= -dt;
    return max_abs_diff(s.ell, want);
  };
  const double e1 = err(1e-2);
  const double e2 = err(5e-3);
  CHECK(e1 < 1e-3);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("virtual velocity right-hand side") {
  const auto g = Grid::create(3, 16);
  const SpectralField v = band_velocity(g, 6, 3.0);
  const SpectralField u = band_velocity(g, 7, 3.0);
  const SpectralField ell = random_field(g, 3, 8, 2.0, 0.02);
  const InverseJacobian inv = inverse_grad(grad_map(ell));
  const Connection c = connection_coeffs(ell, inv.q);

  const auto up = to_physical(u);
  const auto gv = to_physical(gradient(v));
  PhysicalField adv(g, 3);
  for (std::size_t p = 0; p < g->physical_size(); ++p) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) adv.at(i, p) -= up.at(j, p) * gv.at(i * 3 + j, p);
    }
  }
  const SpectralField adv_hat = dealias(to_spectral(adv));
  CHECK(max_abs_diff(virtual_velocity_rhs(v, u, c, 0.0), adv_hat) < 1e-14);
  const Connection zero_c{PhysicalField(g, 27), 3};
  CHECK(max_abs_diff(virtual_velocity_rhs(v, u, zero_c, 0.3), adv_hat) < 1e-14);

  // Manufactured C: naive index loop for 2 nu C^m_{k;i} d_k v_m.
  const double nu = 0.2;
  Connection mc{to_physical(random_field(g, 27, 99, 3.0)), 3};
  PhysicalField loop = adv;
  for (std::size_t p = 0; p < g->physical_size(); ++p) {
    for (int i = 0; i < 3; ++i) {
      double s = 0.0;
      for (int m = 0; m < 3; ++m) {
        for (int k = 0; k < 3; ++k) s += mc(m, k, i, p) * gv.at(m * 3 + k, p);
      }
      loop.at(i, p) += 2.0 * nu * s;
    }
  }
  const SpectralField want = dealias(to_spectral(loop));
  CHECK(max_abs_diff(virtual_velocity_rhs(v, u, mc, nu), want) / max_abs(want) < 1e-12);

  // Virtual vorticity: nu = 0 and C = 0 leave pure advection.
  const SpectralField z = curl(v);
  const auto gz = to_physical(gradient(z));
  PhysicalField zadv(g, 3);
  for (std::size_t p = 0; p < g->physical_size(); ++p) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) zadv.at(i, p) -= up.at(j, p) * gz.at(i * 3 + j, p);
    }
  }
  const SpectralField zadv_hat = dealias(to_spectral(zadv));
  CHECK(max_abs_diff(virtual_vorticity_rhs(z, u, c, 0.0), zadv_hat) < 1e-13);
  CHECK(max_abs_diff(virtual_vorticity_rhs(z, u, zero_c, 0.4), zadv_hat) < 1e-13);
}

TEST_CASE("inverse Jacobian of a random small displacement") {
  const auto g = Grid::create(3, 16);
  const SpectralField ell = random_field(g, 3, 13, 3.0, 0.01);
  CHECK(max_grad_ell(ell) <= 0.1);
  const PhysicalField ga = grad_map(ell);
  const InverseJacobian inv = inverse_grad(ga);
  double err = 0.0;
  for (std::size_t p = 0; p < g->physical_size(); ++p) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += inv.q.at(i * 3 + k, p) * ga.at(k * 3 + j, p);
        err = std::max(err, std::abs(s - (i == j ? 1.0 : 0.0)));
      }
    }
  }
  CHECK(err < 1e-12);
  CHECK_THROWS_AS(inverse_grad(grad_map(random_field(g, 3, 13, 3.0, 3.0))), InvertibilityError);
}

TEST_CASE("restart check and reset") {
  const auto g = Grid::create(3, 16);
  const SpectralField u = band_velocity(g, 21);
  ELState s = make_el_state(u, 0.1, true, true);
  CHECK(restart_check(s) == RestartDecision::continue_run);
  s.ell = shear(g, 1.01 * 0.1);
  CHECK(max_grad_ell(s.ell) == doctest::Approx(0.101).epsilon(1e-12));
  CHECK(restart_check(s) == RestartDecision::restart);
  s.ell = shear(g, 0.99 * 0.1);
  CHECK(restart_check(s) == RestartDecision::continue_run);

  s.ell = shear(g, 0.2);
  s.t = 0.7;
  const SpectralField u_before = weber_velocity(s.ell, s.v);
  apply_restart(s);
  CHECK(max_abs(s.ell) == 0.0);
  CHECK(s.restart_count == 1);
  CHECK(s.t1 == 0.7);
  CHECK(max_abs_diff(s.v, u_before) < 1e-15);
  CHECK(max_abs(*s.logdet) == 0.0);
  const PhysicalField gi = grad_map(s.ell);
  const auto z = el_curl(s.v, inverse_grad(gi).q).zeta;
  CHECK(max_abs_diff(cauchy_vorticity(z, gi), curl(weber_velocity(s.ell, s.v))) < 1e-14);
  CHECK(max_abs_diff(*s.zeta, curl(s.v)) < 1e-14);
}

TEST_CASE("zero velocity stays frozen") {
  const auto g = Grid::create(3, 16);
  ELState s = make_el_state(SpectralField(g, 3), 0.1, true, true);
  for (int i = 0; i < 5; ++i) s = el_step(s, 0.1, 0.01, Scheme::rk4);
  CHECK(max_abs(s.ell) == 0.0);
  CHECK(max_abs(s.v) == 0.0);
  CHECK(s.restart_count == 0);
}

TEST_CASE("a step that overshoots g ends at the reset") {
  const auto g = Grid::create(2, 32);
  const SpectralField u0 = make_initial_velocity(InitialCondition{}, g);
  const ELState s = el_step(make_el_state(u0, 0.1, false, false), 0.1, 0.1, Scheme::rk4);
  CHECK(s.restart_count == 1);
  CHECK(s.t < 0.1);
  CHECK(s.t1 == s.t);
  CHECK(max_abs(s.ell) == 0.0);
  CHECK(s.peak_grad_ell >= 0.1);
  CHECK(s.peak_grad_ell <= 0.1 * (1.0 + kRestartOvershoot));
}

TEST_CASE("fixed-step runs record on the step grid across restarts") {
  const auto g = Grid::create(2, 32);
  const SpectralField u0 = make_initial_velocity(InitialCondition{}, g);
  SolverConfig c;
  c.formulation = Formulation::eulerian_lagrangian;
  c.nu = 0.1;
  c.dt = 0.05;
  c.t_end = 0.5;
  c.g = 0.1;
  const RunResult r = run(c, make_state(c, u0));
  CHECK(r.final_state.el->restart_count >= 2);
  CHECK(r.steps > 10);
  REQUIRE(r.records.size() == 11);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    CHECK(r.records[i].t == doctest::Approx(0.05 * static_cast<double>(i)).epsilon(1e-12));
  }
}

TEST_CASE("Eulerian-Lagrangian and direct solvers agree over one window") {
  const auto g = Grid::create(2, 32);
  const SpectralField u0 = make_initial_velocity(InitialCondition{}, g);
  SolverConfig direct;
  direct.nu = 0.1;
  direct.dt = 1e-3;
  direct.t_end = 0.05;
  SolverConfig el = direct;
  el.formulation = Formulation::eulerian_lagrangian;
  el.g = 0.9;
  const RunResult a = run(direct, make_state(direct, u0));
  const RunResult b = run(el, make_state(el, u0));
  CHECK(b.final_state.el->restart_count == 0);
  CHECK(max_abs_diff(a.final_state.velocity(), b.final_state.velocity()) < 1e-4);
}

TEST_CASE("inviscid 2D virtual vorticity keeps its extrema") {
  // Taylor-Green maxima of |omega| sit on stagnation points of the grid.
  const auto g = Grid::create(2, 32);
  const SpectralField u0 = make_initial_velocity(InitialCondition{}, g);
  auto drift = [&](double dt) {
    ELState s = make_el_state(u0, 0.9, false, false);
    for (int i = 0; i < static_cast<int>(std::lround(0.2 / dt)); ++i) {
      s = el_step(s, 0.0, dt, Scheme::rk4);
    }
    const auto z = el_curl(s.v, inverse_grad(grad_map(s.ell)).q).zeta;
    return std::abs(max_abs(z) - 2.0);
  };
  // The stagnation points stay fixed, so only roundoff remains.
  CHECK(drift(0.02) < 1e-10);
  CHECK(drift(0.01) < 1e-10);
}

TEST_CASE("evolved trackers follow their derived counterparts") {
  const auto g = Grid::create(3, 32);
  const SpectralField u0 = band_velocity(g, 33);
  auto gaps = [&](double dt) {
    ELState s = make_el_state(u0, 0.9, true, true);
    double logdet = 0.0, zeta = 0.0;
    for (int i = 0; i < static_cast<int>(std::lround(0.2 / dt)); ++i) {
      s = el_step(s, 0.1, dt, Scheme::rk2);
      const ELConsistency c = el_consistency(s);
      logdet = std::max(logdet, c.logdet_err);
      zeta = std::max(zeta, c.zeta_gap);
    }
    CHECK(s.restart_count == 0);
    return std::pair{logdet, zeta};
  };
  const auto [l1, z1] = gaps(0.04);
  const auto [l2, z2] = gaps(0.02);
  MESSAGE("logdet gap " << l1 << " -> " << l2 << ", zeta gap " << z1 << " -> " << z2);
  CHECK(l1 <= 1e-4);
  CHECK(z1 <= 1e-4);
  CHECK(l2 < l1 / 2.0);
  CHECK(z2 < z1 / 2.0);
}

TEST_CASE("virtual vorticity evolution requires three dimensions") {
  const auto g = Grid::create(2, 16);
  CHECK_THROWS_AS(make_el_state(SpectralField(g, 2), 0.1, false, true), ConfigError);
}
