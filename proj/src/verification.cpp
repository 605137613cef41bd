#include "nitns/verification.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <random>

#include "nitns/diagnostics.hpp"
#include "nitns/errors.hpp"
#include "nitns/eulerian_lagrangian.hpp"
#include "nitns/initial.hpp"
#include "nitns/mollifier.hpp"
#include "nitns/solvers.hpp"
#include "nitns/spectral_ops.hpp"
#include "nitns/tensor.hpp"

namespace nitns {

namespace {

class Collector {
 public:
  explicit Collector(std::string suite) : suite_(std::move(suite)) {}
  void check(const std::string& name, double value, double tol) {
    results_.push_back({suite_, name, value, tol, std::isfinite(value) && value <= tol});
  }
  std::vector<PropertyResult> take() { return std::move(results_); }

 private:
  std::string suite_;
  std::vector<PropertyResult> results_;
};

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const PhysicalField& a, const PhysicalField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

double rel_diff(const PhysicalField& a, const PhysicalField& b) {
  const double scale = std::max(max_abs(a.data()), max_abs(b.data()));
  const double d = max_abs_diff(a, b);
  return scale == 0.0 ? d : d / scale;
}

double rel_diff(const SpectralField& a, const SpectralField& b) {
  return rel_diff(to_physical(a), to_physical(b));
}

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
double frob(const Mat3& m) {
  double s = 0.0;
  for (double x : m) s += x * x;
  return std::sqrt(s);
}

// Adjugate from signed minors, written independently of the library routine.
Mat3 adjugate_from_minors(const Mat3& m) {
  Mat3 adj{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double minor[4];
      int idx = 0;
      for (int r = 0; r < 3; ++r) {
        if (r == i) continue;
        for (int c = 0; c < 3; ++c) {
          if (c == j) continue;
          minor[idx++] = m[r * 3 + c];
        }
      }
      const double cof = ((i + j) % 2 == 0 ? 1.0 : -1.0) * (minor[0] * minor[3] - minor[1] * minor[2]);
      adj[j * 3 + i] = cof;
    }
  }
  return adj;
}

std::vector<PropertyResult> algebra_suite() {
  Collector out("algebra");
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto vec = [&] { return Vec3{u(rng), u(rng), u(rng)}; };
  auto mat = [&] {
    Mat3 m;
    for (auto& x : m) x = u(rng);
    return m;
  };
  constexpr int kSamples = 1000;
  double e_id = 0.0, e_cyc = 0.0, e_nid = 0.0, e_sing = 0.0, e_det = 0.0, e_2d = 0.0;
  for (int s = 0; s < kSamples; ++s) {
    const Vec3 q = vec();
    const Mat3 m = mat();
    const Mat3 n = mat();
    const double qn = norm3(q);

    const Vec3 id = cauchy_action(q, identity3());
    for (int i = 0; i < 3; ++i) e_id = std::max(e_id, std::abs(id[i] - q[i]) / qn);

    const Vec3 lhs = cauchy_action(q, matmul(m, n));
    const Vec3 rhs = cauchy_action(cauchy_action(q, m), n);
    const double scale_cyc = qn * frob(m) * frob(m) * frob(n) * frob(n);
    for (int i = 0; i < 3; ++i) e_cyc = std::max(e_cyc, std::abs(lhs[i] - rhs[i]) / scale_cyc);

    Mat3 ipn = n;
    for (int i = 0; i < 3; ++i) ipn[i * 3 + i] += 1.0;
    const Vec3 a = cauchy_action(q, ipn);
    const Vec3 nq = matvec(n, q);
    const Vec3 cn = cauchy_action(q, n);
    const double tr = trace(n);
    const double scale_nid = qn * (1.0 + frob(n)) * (1.0 + frob(n));
    for (int i = 0; i < 3; ++i) {
      const double b = (1.0 + tr) * q[i] - nq[i] + cn[i];
      e_nid = std::max(e_nid, std::abs(a[i] - b) / scale_nid);
    }

    // Rank-two matrix: third column a combination of the first two.
    Mat3 sing = m;
    const double al = u(rng), be = u(rng);
    for (int r = 0; r < 3; ++r) sing[r * 3 + 2] = al * sing[r * 3 + 0] + be * sing[r * 3 + 1];
    const Vec3 cs = cauchy_action(q, sing);
    const Vec3 oracle = matvec(adjugate_from_minors(sing), q);
    const double scale_sing = qn * frob(sing) * frob(sing);
    for (int i = 0; i < 3; ++i) {
      const double err = std::isfinite(cs[i]) ? std::abs(cs[i] - oracle[i]) / scale_sing : 1.0;
      e_sing = std::max(e_sing, err);
    }

    // M C(q, M) = det(M) q
    const Vec3 mc = matvec(m, cauchy_action(q, m));
    const double dm = det(m);
    const double scale_det = qn * frob(m) * frob(m) * frob(m);
    for (int i = 0; i < 3; ++i) e_det = std::max(e_det, std::abs(mc[i] - dm * q[i]) / scale_det);

    const Mat2 m2{m[0], m[1], m[3], m[4]};
    e_2d = std::max(e_2d, std::abs(cauchy_action(q[0], m2) - det(m2) * q[0]) /
                              (std::abs(q[0]) * frob(m) * frob(m) + 1e-300));
  }
  out.check("cauchy_identity", e_id, 1e-12);
  out.check("cauchy_group_action", e_cyc, 1e-12);
  out.check("cauchy_near_identity", e_nid, 1e-12);
  out.check("cauchy_singular_cofactor", e_sing, 1e-12);
  out.check("cauchy_det_relation", e_det, 1e-12);
  out.check("cauchy_two_dimensional", e_2d, 1e-12);
  return out.take();
}

std::vector<PropertyResult> spectral_suite() {
  Collector out("spectral");
  for (int dim : {2, 3}) {
    const std::string tag = dim == 2 ? "_2d" : "_3d";
    const auto grid = Grid::create(dim, dim == 2 ? 32 : 16);
    const SpectralField f = random_field(grid, dim, 11 + dim, 5.0);
    const PhysicalField fp = to_physical(f);
    out.check("roundtrip" + tag, rel_diff(to_physical(to_spectral(fp)), fp), 1e-12);

    const double quad = quadrature_inner(fp, fp);
    const double spec = grid->volume() * lattice_sum_sq(f);
    out.check("parseval" + tag, std::abs(quad - spec) / spec, 1e-12);

    const SpectralField pf = leray_project(f);
    const double div = max_abs(to_physical(divergence(pf)).data()) /
                       std::max(1e-300, max_abs(to_physical(gradient(pf)).data()));
    out.check("leray_divergence_free" + tag, div, 1e-13);
    out.check("leray_idempotent" + tag, rel_diff(leray_project(pf), pf), 1e-14);

    InitialCondition ic;
    ic.kind = InitialKind::random_band;
    ic.seed = 7;
    ic.kmin = 1.0;
    ic.kmax = 4.0;
    const SpectralField u = make_initial_velocity(ic, grid);
    out.check("biot_savart_inverts_curl" + tag, rel_diff(biot_savart(curl(u)), u), 1e-12);
    out.check("mode_bound" + tag, std::max(0.0, mode_bound_excess(u, curl(u))), 1e-14);

    const SpectralField d1 = dealias(f);
    out.check("dealias_idempotent" + tag, rel_diff(dealias(d1), d1), 0.0);

    for (auto kind : {MollifierKind::poisson, MollifierKind::gaussian}) {
      const Mollifier m{kind, 0.3};
      const SpectralField back = apply(m, apply_inverse_sqrt(m, apply_inverse_sqrt(m, d1)));
      out.check("mollifier_inverse_sqrt_" + to_string(kind) + tag, rel_diff(back, d1), 1e-12);
    }
  }
  return out.take();
}

std::vector<PropertyResult> energy_suite() {
  Collector out("energy");
  for (int dim : {2, 3}) {
    const std::string tag = dim == 2 ? "_2d" : "_3d";
    const auto grid = Grid::create(dim, dim == 2 ? 32 : 16);
    InitialCondition ic;
    ic.kind = InitialKind::random_band;
    ic.seed = 3;
    ic.kmin = 1.0;
    ic.kmax = 4.0;
    const SpectralField u = make_initial_velocity(ic, grid);
    auto pairing = [&](const SpectralField& rhs) {
      const double ip = grid->volume() * lattice_inner(u, rhs);
      const double scale =
          grid->volume() * std::sqrt(lattice_sum_sq(u) * lattice_sum_sq(rhs));
      return std::abs(ip) / scale;
    };
    out.check("nse_energy_conserving" + tag, pairing(nse_rhs(u)), 1e-10);
    const Mollifier m{MollifierKind::poisson, 0.2};
    out.check("mollified_energy_conserving" + tag, pairing(mollified_rhs(u, m)), 1e-10);

    // Vortex form: d/dt of 1/2 int u . [u] from the nonlinearity vanishes.
    const SpectralField w = curl(u);
    const SpectralField dw = vortex_rhs(w, m);
    const SpectralField du = biot_savart(dw);
    const double paired_rate = grid->volume() * lattice_inner(apply(m, u), du);
    const double paired_scale =
        grid->volume() * std::sqrt(lattice_sum_sq(apply(m, u)) * lattice_sum_sq(du));
    out.check("vortex_paired_energy_conserving" + tag, std::abs(paired_rate) / paired_scale,
              1e-10);
    if (dim == 3) {
      const double div = max_abs(to_physical(divergence(dw)).data()) /
                         max_abs(to_physical(gradient(dw)).data());
      out.check("vortex_rhs_divergence_free" + tag, div, 1e-10);
    }

    for (auto kind : {MollifierKind::poisson, MollifierKind::gaussian}) {
      const VortexEnergyPair p = vortex_energy_pair(u, Mollifier{kind, 0.3}, 0.1);
      out.check("paired_energy_dual_path_" + to_string(kind) + tag,
                std::abs(p.energy_physical - p.energy_spectral) / p.energy_spectral, 1e-12);
      out.check("paired_dissipation_dual_path_" + to_string(kind) + tag,
                std::abs(p.dissipation_physical - p.dissipation_spectral) /
                    p.dissipation_spectral,
                1e-12);
    }
  }
  return out.take();
}

struct ElFixture {
  GridPtr grid;
  SpectralField ell;
  SpectralField v;
};

ElFixture el_fixture(int dim, int n) {
  ElFixture f;
  f.grid = Grid::create(dim, n);
  f.ell = random_field(f.grid, dim, 101 + dim, 2.0, 0.02);
  InitialCondition ic;
  ic.kind = InitialKind::random_band;
  ic.seed = 202;
  ic.kmin = 1.0;
  ic.kmax = 2.0;
  f.v = make_initial_velocity(ic, f.grid);
  return f;
}

std::vector<PropertyResult> cauchy_suite() {
  Collector out("cauchy");
  for (int dim : {2, 3}) {
    const std::string tag = dim == 2 ? "_2d" : "_3d";
    const ElFixture fx = el_fixture(dim, dim == 2 ? 32 : 16);
    const PhysicalField ga = grad_map(fx.ell);
    const InverseJacobian inv = inverse_grad(ga);
    const auto np = fx.grid->physical_size();
    double qerr = 0.0;
    for (std::size_t p = 0; p < np; ++p) {
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
          double s = 0.0;
          for (int k = 0; k < dim; ++k) s += inv.q.at(i * dim + k, p) * ga.at(k * dim + j, p);
          qerr = std::max(qerr, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
      }
    }
    out.check("inverse_jacobian" + tag, qerr, 1e-12);

    const PhysicalField zeta = el_curl(fx.v, inv.q).zeta;
    const SpectralField u = weber_velocity(fx.ell, fx.v);
    const PhysicalField omega = to_physical(curl(u));
    const PhysicalField cw = cauchy_vorticity(zeta, ga);
    out.check("weber_cauchy" + tag, rel_diff(cw, omega), 1e-10);
    if (dim == 2) {
      PhysicalField det_zeta(fx.grid, 1);
      for (std::size_t p = 0; p < np; ++p) det_zeta.at(0, p) = inv.det.at(0, p) * zeta.at(0, p);
      out.check("two_dimensional_det_reduction", rel_diff(det_zeta, omega), 1e-8);
    } else {
      // (omega . grad) f = det (zeta . grad^A) f
      const SpectralField f = random_field(fx.grid, 1, 9, 3.0);
      const PhysicalField gf = to_physical(gradient(f));
      const PhysicalField gaf = el_gradient(f, inv.q);
      PhysicalField lhs(fx.grid, 1), rhs(fx.grid, 1);
      for (std::size_t p = 0; p < np; ++p) {
        for (int i = 0; i < 3; ++i) {
          lhs.at(0, p) += omega.at(i, p) * gf.at(i, p);
          rhs.at(0, p) += inv.det.at(0, p) * zeta.at(i, p) * gaf.at(i, p);
        }
      }
      out.check("derivative_identity", rel_diff(lhs, rhs), 1e-6);
    }

    // Identity map: C(zeta, I) = curl u.
    SpectralField zero(fx.grid, dim);
    const PhysicalField gi = grad_map(zero);
    const PhysicalField z0 = el_curl(fx.v, inverse_grad(gi).q).zeta;
    out.check("identity_map_cauchy" + tag,
              rel_diff(cauchy_vorticity(z0, gi), to_physical(curl(weber_velocity(zero, fx.v)))),
              1e-12);
  }
  return out.take();
}

std::vector<PropertyResult> consistency_suite() {
  Collector out("consistency");
  for (int dim : {2, 3}) {
    const std::string tag = dim == 2 ? "_2d" : "_3d";
    const auto grid = Grid::create(dim, dim == 2 ? 32 : 16);
    const SpectralField w = random_field(grid, dim, 55, 4.0);
    const Mollifier m{MollifierKind::gaussian, 0.25};
    out.check("cotangent_curl_matches_vortex" + tag,
              rel_diff(curl(cotangent_rhs(w, m)), vortex_rhs(curl(w), m)), 1e-10);
  }

  // [grad^A_i, d_k] f = C^m_{k;i} grad^A_m f
  {
    const ElFixture fx = el_fixture(3, 32);
    const auto& g = fx.grid;
    const auto np = g->physical_size();
    const InverseJacobian inv = inverse_grad(grad_map(fx.ell));
    const Connection c = connection_coeffs(fx.ell, inv.q);
    const SpectralField f = random_field(g, 1, 77, 3.0);
    const SpectralField df = gradient(f);                        // d_k f
    const PhysicalField ga_df = el_gradient(df, inv.q);           // grad^A_i d_k f at k*3+i
    const PhysicalField ga_f = el_gradient(f, inv.q);             // grad^A_m f
    const PhysicalField d_ga_f = to_physical(gradient(to_spectral(ga_f)));  // d_k grad^A_i f
    PhysicalField lhs(g, 9), rhs(g, 9);
    for (std::size_t p = 0; p < np; ++p) {
      for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 3; ++i) {
          lhs.at(k * 3 + i, p) = ga_df.at(k * 3 + i, p) - d_ga_f.at(i * 3 + k, p);
          double s = 0.0;
          for (int mm = 0; mm < 3; ++mm) s += c(mm, k, i, p) * ga_f.at(mm, p);
          rhs.at(k * 3 + i, p) = s;
        }
      }
    }
    const double scale = max_abs(to_physical(df).data());
    out.check("commutator_relation", max_abs_diff(lhs, rhs) / scale, 1e-8);
  }

  // Shear ell = (a sin y, 0, 0): only C^1_{2;2} = -a sin y, trace contraction 0.
  {
    const auto g = Grid::create(3, 16);
    const double a = 0.05;
    PhysicalField ell(g, 3);
    for (std::size_t p = 0; p < g->physical_size(); ++p) ell.at(0, p) = a * std::sin(g->point(p)[1]);
    const SpectralField ell_hat = to_spectral(ell);
    const InverseJacobian inv = inverse_grad(grad_map(ell_hat));
    const Connection c = connection_coeffs(ell_hat, inv.q);
    double err = 0.0;
    for (std::size_t p = 0; p < g->physical_size(); ++p) {
      const double y = g->point(p)[1];
      for (int mm = 0; mm < 3; ++mm) {
        for (int k = 0; k < 3; ++k) {
          for (int i = 0; i < 3; ++i) {
            const double want = (mm == 0 && k == 1 && i == 1) ? -a * std::sin(y) : 0.0;
            err = std::max(err, std::abs(c(mm, k, i, p) - want));
          }
        }
      }
    }
    out.check("shear_connection", err, 1e-12);
    out.check("shear_logdet_source", max_abs(logdet_rhs(c, 1.0).data()), 1e-14);
    const SpectralField zero(g, 3);
    const Connection c0 = connection_coeffs(zero, inverse_grad(grad_map(zero)).q);
    out.check("connection_vanishes_at_identity", max_abs(c0.c.data()), 0.0);
  }
  return out.take();
}

}  // namespace

const std::vector<std::string>& verification_suites() {
  static const std::vector<std::string> names = {"algebra", "spectral", "energy", "cauchy",
                                                 "consistency"};
  return names;
}

std::vector<PropertyResult> run_suite(const std::string& suite) {
  if (suite == "algebra") return algebra_suite();
  if (suite == "spectral") return spectral_suite();
  if (suite == "energy") return energy_suite();
  if (suite == "cauchy") return cauchy_suite();
  if (suite == "consistency") return consistency_suite();
  throw ConfigError("unknown verification suite '" + suite + "'");
}

void print_results(const std::vector<PropertyResult>& results, std::ostream& out) {
  for (const auto& r : results) {
    out << r.suite << ' ' << r.name << ' ' << (r.pass ? "PASS" : "FAIL") << " value="
        << std::setprecision(6) << r.value << " tol=" << r.tolerance << '\n';
  }
}

}  // namespace nitns
