#include "nitns/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nitns/errors.hpp"
#include "nitns/spectral_ops.hpp"

namespace nitns {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDirectionMask = 1e-12;

double cell_volume(const Grid& g) { return g.volume() / static_cast<double>(g.physical_size()); }

// Largest |k| of any lattice entry that carries a nonzero coefficient.
double max_active_k(const SpectralField& f) {
  const auto& g = *f.grid();
  double kmax = 0.0;
  for (std::size_t s = 0; s < g.spectral_size(); ++s) {
    for (int c = 0; c < f.ncomp(); ++c) {
      if (f.comp(c)[s] != Complex(0.0, 0.0)) {
        kmax = std::max(kmax, g.k_magnitude(s));
        break;
      }
    }
  }
  return kmax;
}

// Pointwise Euclidean norm of a multi-component physical field.
std::vector<double> pointwise_norm(const PhysicalField& f) {
  const auto np = f.grid()->physical_size();
  std::vector<double> out(np, 0.0);
  for (int c = 0; c < f.ncomp(); ++c) {
    auto fc = f.comp(c);
    for (std::size_t p = 0; p < np; ++p) out[p] += fc[p] * fc[p];
  }
  for (auto& x : out) x = std::sqrt(x);
  return out;
}

double sup_norm(const SpectralField& u) {
  const auto n = pointwise_norm(to_physical(u));
  return n.empty() ? 0.0 : *std::max_element(n.begin(), n.end());
}

double nan_if(bool absent, double v) { return absent ? kNaN : v; }

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "t",        "K",         "eps",          "enstrophy",     "omega_l1",
      "dir_diss", "alpha_max", "u_linf",       "suf1",          "suf2",
      "maxu",     "y_gevrey",  "budget_residual", "max_grad_ell", "logdet_err",
      "weber_cauchy_err",      "restarts",     "G",             "rho",
      "tau"};
  return cols;
}

const std::vector<std::string>& extra_csv_columns() {
  static const std::vector<std::string> cols = {
      "t",           "analytic_norm",       "paired_energy", "paired_residual",
      "zeta_gap",    "min_det",             "t1",            "interpolation_ratio",
      "mode_bound_excess", "ltwo_ratio",    "nablaeltwo_ratio", "maxdel_ratio",
      "lbound_ratio", "grl_ratio"};
  return cols;
}

std::vector<double> csv_values(const DiagnosticsRecord& r) {
  return {r.t,        r.K,         r.eps,      r.enstrophy, r.omega_l1,
          r.dir_diss, r.alpha_max, r.u_linf,   r.suf1,      r.suf2,
          r.maxu,     r.y_gevrey,  r.budget_residual, r.max_grad_ell, r.logdet_err,
          r.weber_cauchy_err, r.restarts < 0 ? kNaN : static_cast<double>(r.restarts),
          r.G,        r.rho,       r.tau};
}

std::vector<double> extra_csv_values(const DiagnosticsRecord& r) {
  return {r.t,          r.analytic_norm,       r.paired_energy, r.paired_residual,
          r.zeta_gap,   r.min_det,             r.t1,            r.interpolation_ratio,
          r.mode_bound_excess, r.ltwo_ratio,   r.nablaeltwo_ratio, r.maxdel_ratio,
          r.lbound_ratio, r.grl_ratio};
}

NondimNumbers nondim_numbers(double K0, double enstrophy0, double max_enstrophy, double nu,
                             double T, double g, double s0) {
  NondimNumbers out;
  out.g = g;
  out.R0 = nu > 0.0 ? std::pow(2.0 * K0, 0.25) * std::pow(enstrophy0, 0.25) / nu : kNaN;
  if (!(nu > 0.0) || !(T > 0.0)) {
    out.applicable = false;
    out.G = out.rho = out.lambda_tilde = out.lambda = out.U_r = out.tau = kNaN;
    return out;
  }
  const double g2 = std::pow(nu, -1.5) * std::sqrt(T) * max_enstrophy;
  out.G = std::sqrt(g2);
  out.rho = g2 * g2;
  out.tau = out.G > 0.0 ? g * std::pow(out.G, -7.0) : std::numeric_limits<double>::infinity();
  out.lambda_tilde = out.G > 0.0 ? std::min(s0, 1.0 / out.rho) : s0;
  out.lambda = std::sqrt(nu * T) * out.lambda_tilde;
  // U~ = (lambda~ - r~)^(-1/2) G with r~ = (1 - gamma) lambda~.
  const double u_tilde = out.G / std::sqrt(kGamma * out.lambda_tilde);
  out.U_r = std::sqrt(nu / T) * u_tilde;
  return out;
}

double kinetic_energy(const SpectralField& u) {
  return 0.5 * u.grid()->volume() * lattice_sum_sq(u);
}

double kinetic_energy(const PhysicalField& u) { return 0.5 * quadrature_inner(u, u); }

double enstrophy(const SpectralField& omega) {
  return omega.grid()->volume() * lattice_sum_sq(omega);
}

double dissipation_rate(const SpectralField& u, double nu) {
  if (nu == 0.0) return 0.0;
  const auto& g = *u.grid();
  return nu * g.volume() *
         weighted_lattice_sum_sq(u, [&g](std::size_t s) { return g.k_squared(s); });
}

double energy_budget_residual(std::span<const BudgetSample> series) {
  if (series.empty()) return 0.0;
  double integral = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    integral += 0.5 * (series[i].t - series[i - 1].t) * (series[i].eps + series[i - 1].eps);
  }
  return series.back().K + integral - series.front().K;
}

VortexEnergyPair vortex_energy_pair(const SpectralField& u, const Mollifier& m, double nu) {
  const auto& g = *u.grid();
  const int d = g.dim();
  require_components(u.ncomp(), d, "vortex_energy_pair");
  VortexEnergyPair out;
  const SpectralField mu = apply(m, u);

  out.energy_physical = 0.5 * quadrature_inner(to_physical(u), to_physical(mu));
  if (nu != 0.0) {
    out.dissipation_physical =
        nu * quadrature_inner(to_physical(gradient(u)), to_physical(gradient(mu)));
  }

  double e = 0.0;
  double diss = 0.0;
  for (std::size_t s = 0; s < g.spectral_size(); ++s) {
    const double j = m.multiplier(g.k_magnitude(s));
    if (j == 0.0) continue;  // [u]_k vanishes there
    double a = 0.0;
    for (int c = 0; c < d; ++c) a += std::norm(mu.comp(c)[s]);
    e += g.multiplicity(s) * a / j;
    diss += g.multiplicity(s) * g.deriv_k_squared(s) * a / j;
  }
  out.energy_spectral = 0.5 * g.volume() * e;
  out.dissipation_spectral = nu * g.volume() * diss;

  if (m.kind == MollifierKind::sharp) {
    out.omitted_reason = "sharp truncation has no inverse square root";
    return out;
  }
  try {
    const SpectralField h = apply_inverse_sqrt(m, mu);
    out.gevrey_energy = kinetic_energy(h);
    out.gevrey_dissipation = g.volume() * weighted_lattice_sum_sq(
                                              h, [&g](std::size_t s) { return g.k_squared(s); });
  } catch (const OverflowGuardError& err) {
    out.omitted_reason = err.what();
  }
  return out;
}

DirectionField vorticity_direction(const SpectralField& omega) {
  const auto& grid = omega.grid();
  const auto np = grid->physical_size();
  DirectionField out{PhysicalField(grid, 3), std::vector<unsigned char>(np, 0)};
  const PhysicalField w = to_physical(omega);
  const auto mag = pointwise_norm(w);
  const double wmax = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  const double floor = kDirectionMask * wmax;
  for (std::size_t p = 0; p < np; ++p) {
    if (!(mag[p] > floor) || wmax == 0.0) continue;
    out.defined[p] = 1;
    if (grid->dim() == 2) {
      out.xi.at(2, p) = w.at(0, p) > 0.0 ? 1.0 : -1.0;
    } else {
      for (int c = 0; c < 3; ++c) out.xi.at(c, p) = w.at(c, p) / mag[p];
    }
  }
  return out;
}

double direction_dissipation(const SpectralField& omega) {
  const auto& grid = omega.grid();
  if (grid->dim() == 2) return 0.0;
  require_components(omega.ncomp(), 3, "direction_dissipation");
  const auto np = grid->physical_size();
  const PhysicalField w = to_physical(omega);
  const PhysicalField gw = to_physical(gradient(omega));
  const auto mag = pointwise_norm(w);
  const double wmax = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  if (wmax == 0.0) return 0.0;
  const double floor = kDirectionMask * wmax;
  double total = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    if (!(mag[p] > floor)) continue;
    // |omega| |grad xi|^2 = sum_j (|d_j omega|^2 - (xi . d_j omega)^2) / |omega|
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) {
      double sq = 0.0;
      double proj = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double dj = gw.at(c * 3 + j, p);
        sq += dj * dj;
        proj += w.at(c, p) * dj;
      }
      proj /= mag[p];
      acc += std::max(0.0, sq - proj * proj);
    }
    total += acc / mag[p];
  }
  return total * cell_volume(*grid);
}

PhysicalField stretching_alpha(const SpectralField& u, const SpectralField& omega) {
  const auto& grid = u.grid();
  PhysicalField alpha(grid, 1);
  if (grid->dim() == 2) return alpha;
  const DirectionField dir = vorticity_direction(omega);
  const PhysicalField gu = to_physical(gradient(u));
  const auto np = grid->physical_size();
  for (std::size_t p = 0; p < np; ++p) {
    if (!dir.defined[p]) continue;
    double a = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double s_ij = 0.5 * (gu.at(i * 3 + j, p) + gu.at(j * 3 + i, p));
        a += dir.xi.at(i, p) * s_ij * dir.xi.at(j, p);
      }
    }
    alpha.at(0, p) = a;
  }
  return alpha;
}

double analytic_norm(const SpectralField& f, double lambda, int p) {
  if (p != 1 && p != 2) throw ConfigError("analytic_norm: p must be 1 or 2");
  if (!(lambda >= 0.0)) throw ConfigError("analytic_norm: lambda must be >= 0");
  const auto& g = *f.grid();
  const double kmax = max_active_k(f);
  if (lambda * kmax > kMaxWeightExponent) {
    throw OverflowGuardError("analytic_norm: lambda |k|max exceeds 300",
                             kMaxWeightExponent / kmax);
  }
  double total = 0.0;
  for (std::size_t s = 0; s < g.spectral_size(); ++s) {
    double a = 0.0;
    for (int c = 0; c < f.ncomp(); ++c) a += std::norm(f.comp(c)[s]);
    if (a == 0.0) continue;
    const double w = std::exp(p * lambda * g.k_magnitude(s));
    total += g.multiplicity(s) * w * (p == 2 ? a : std::sqrt(a));
  }
  return p == 2 ? std::sqrt(total) : total;
}

double gevrey_y(const SpectralField& omega, double nu, double T, double s, double t) {
  if (!(T > 0.0)) throw ConfigError("gevrey_y: T must be > 0");
  if (t < s) throw ConfigError("gevrey_y: requires t >= s");
  const auto& g = *omega.grid();
  const double rate = std::sqrt(nu / T) * (t - s);
  const double kmax = max_active_k(omega);
  if (rate * kmax > kMaxWeightExponent) {
    throw OverflowGuardError("gevrey_y: weight exponent exceeds the guard",
                             kmax > 0.0 ? kMaxWeightExponent / kmax : 0.0);
  }
  return weighted_lattice_sum_sq(
      omega, [&g, rate](std::size_t k) { return std::exp(2.0 * rate * g.k_magnitude(k)); });
}

double mode_bound_excess(const SpectralField& u, const SpectralField& omega) {
  const auto& g = *u.grid();
  double umax = 0.0;
  double excess = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < g.spectral_size(); ++s) {
    const double kd = std::sqrt(g.deriv_k_squared(s));
    if (kd == 0.0) continue;
    double a = 0.0;
    for (int c = 0; c < u.ncomp(); ++c) a += std::norm(u.comp(c)[s]);
    double w = 0.0;
    for (int c = 0; c < omega.ncomp(); ++c) w += std::norm(omega.comp(c)[s]);
    a = std::sqrt(a);
    umax = std::max(umax, a);
    excess = std::max(excess, a - std::sqrt(w) / kd);
  }
  if (umax == 0.0) return 0.0;
  return excess / umax;
}

double interpolation_ratio(const SpectralField& u, const SpectralField& omega) {
  const double w2 = std::sqrt(enstrophy(omega));
  const double gw2 = std::sqrt(enstrophy(gradient(omega)));
  const double denom = std::sqrt(4.0 * std::numbers::pi) * std::sqrt(w2) * std::sqrt(gw2);
  const double num = sup_norm(u);
  if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / denom;
}

DisplacementBounds displacement_bound_report(const ELState& state, double window_grad_sq,
                                             double K0, double K_inf, double nu,
                                             const NondimNumbers& numbers) {
  DisplacementBounds out;
  const double dt = state.t - state.t1;
  if (!(dt > 0.0)) return out;
  const auto& g = *state.ell.grid();
  const PhysicalField ell = to_physical(state.ell);
  const auto mag = pointwise_norm(ell);
  const double linf = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  out.maxdel = K_inf > 0.0 ? linf / K_inf : (linf == 0.0 ? 0.0 : kNaN);
  const double l2 = g.volume() * lattice_sum_sq(state.ell);
  out.ltwo = K0 > 0.0 ? l2 / (2.0 * K0 * dt * dt) : (l2 == 0.0 ? 0.0 : kNaN);
  out.nablaeltwo = window_grad_sq == 0.0 ? 0.0
                   : (K0 > 0.0 && nu > 0.0) ? window_grad_sq * nu / (K0 * dt * dt)
                                            : kNaN;
  // A vanishing displacement meets every bound.
  if (linf == 0.0) return out;

  if (!numbers.applicable || !(numbers.U_r > 0.0) || !(nu > 0.0)) {
    out.lbound = out.grl = kNaN;
    return out;
  }
  const double r = (1.0 - kGamma) * numbers.lambda;
  const double r1 = (1.0 - kGamma) * r;
  const double growth = dt * numbers.U_r * numbers.U_r / nu;
  const double scale = dt * numbers.U_r;
  try {
    out.lbound = analytic_norm(state.ell, r, 1) / scale * std::exp(-growth);
    out.grl = analytic_norm(gradient(state.ell), r1, 1) * std::numbers::e * (r - r1) / scale *
              std::exp(-growth);
  } catch (const OverflowGuardError&) {
    out.lbound = out.grl = kNaN;
  }
  return out;
}

void Monitor::accumulate(double t, const SpectralField& u, const SpectralField& omega,
                         const ELState* el) {
  const double K = kinetic_energy(u);
  const double eps = dissipation_rate(u, opt_.nu);
  const double ens = enstrophy(omega);
  const double uinf = sup_norm(u);
  double paired = 0.0;
  double paired_diss = 0.0;
  if (opt_.paired) {
    const VortexEnergyPair pair = vortex_energy_pair(u, *opt_.paired, opt_.nu);
    paired = pair.energy_spectral;
    paired_diss = pair.dissipation_spectral;
  }
  double grad_sq = 0.0;
  if (el) grad_sq = el->ell.grid()->volume() * lattice_sum_sq(gradient(el->ell));

  if (!started_) {
    started_ = true;
    t0_ = t;
    K0_ = K;
    enstrophy0_ = ens;
    paired0_ = paired;
    if (el) restarts_seen_ = el->restart_count;
  } else {
    const double h = t - t_;
    int_eps_ += 0.5 * h * (eps + eps_);
    suf1_ += 0.5 * h * (ens * ens + enstrophy_ * enstrophy_);
    suf2_ += 0.5 * h * (uinf * uinf + u_linf_ * u_linf_);
    maxu_ += 0.5 * h * (uinf + u_linf_);
    int_paired_diss_ += 0.5 * h * (paired_diss + paired_diss_);
    if (el && el->restart_count != restarts_seen_) {
      // A reset closed the window at this instant; the new one starts empty.
      restarts_seen_ = el->restart_count;
      window_grad_sq_ = 0.0;
    } else if (el) {
      window_grad_sq_ += 0.5 * h * (grad_sq + grad_sq_);
    }
  }
  t_ = t;
  K_ = K;
  eps_ = eps;
  enstrophy_ = ens;
  u_linf_ = uinf;
  paired_ = paired;
  paired_diss_ = paired_diss;
  grad_sq_ = grad_sq;
  max_enstrophy_ = std::max(max_enstrophy_, ens);
}

NondimNumbers Monitor::nondim() const {
  return nondim_numbers(K0_, enstrophy0_, max_enstrophy_, opt_.nu, opt_.horizon, opt_.g,
                        opt_.s0);
}

DiagnosticsRecord Monitor::record(const SpectralField& u, const SpectralField& omega,
                                  const ELState* el) const {
  DiagnosticsRecord r;
  r.t = t_;
  r.K = K_;
  r.eps = eps_;
  r.enstrophy = enstrophy_;
  r.u_linf = u_linf_;
  r.suf1 = suf1_;
  r.suf2 = suf2_;
  r.maxu = maxu_;
  r.budget_residual = K_ + int_eps_ - K0_;

  const auto& grid = *u.grid();
  const auto wmag = pointwise_norm(to_physical(omega));
  double l1 = 0.0;
  for (double x : wmag) l1 += x;
  r.omega_l1 = l1 * cell_volume(grid);
  r.dir_diss = direction_dissipation(omega);
  const PhysicalField alpha = stretching_alpha(u, omega);
  double amax = grid.dim() == 2 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (grid.dim() == 3) {
    const DirectionField dir = vorticity_direction(omega);
    for (std::size_t p = 0; p < grid.physical_size(); ++p) {
      if (dir.defined[p]) amax = std::max(amax, alpha.at(0, p));
    }
    if (!std::isfinite(amax)) amax = 0.0;
  }
  r.alpha_max = amax;

  try {
    r.y_gevrey = opt_.horizon > 0.0 ? gevrey_y(omega, opt_.nu, opt_.horizon, t0_, t_) : kNaN;
  } catch (const OverflowGuardError&) {
    r.y_gevrey = kNaN;
  }
  try {
    r.analytic_norm = analytic_norm(u, opt_.analytic_lambda, opt_.analytic_p);
  } catch (const OverflowGuardError&) {
    r.analytic_norm = kNaN;
  }
  r.paired_energy = nan_if(!opt_.paired, paired_);
  r.paired_residual = nan_if(!opt_.paired, paired_ + int_paired_diss_ - paired0_);

  const NondimNumbers nd = nondim();
  r.G = nd.G;
  r.rho = nd.rho;
  r.tau = nd.tau;
  r.interpolation_ratio = interpolation_ratio(u, omega);
  r.mode_bound_excess = mode_bound_excess(u, omega);

  if (el) {
    const ELConsistency c = el_consistency(*el);
    r.max_grad_ell = c.max_grad_ell;
    r.logdet_err = c.logdet_err;
    r.weber_cauchy_err = c.weber_cauchy_err;
    r.zeta_gap = c.zeta_gap;
    r.min_det = c.min_det;
    r.restarts = el->restart_count;
    r.t1 = el->t1;
    const DisplacementBounds b =
        displacement_bound_report(*el, window_grad_sq_, K0_, maxu_, opt_.nu, nd);
    r.ltwo_ratio = b.ltwo;
    r.nablaeltwo_ratio = b.nablaeltwo;
    r.maxdel_ratio = b.maxdel;
    r.lbound_ratio = b.lbound;
    r.grl_ratio = b.grl;
  } else {
    r.max_grad_ell = r.logdet_err = r.weber_cauchy_err = r.zeta_gap = r.min_det = kNaN;
    r.restarts = -1;
    r.t1 = kNaN;
    r.ltwo_ratio = r.nablaeltwo_ratio = r.maxdel_ratio = r.lbound_ratio = r.grl_ratio = kNaN;
  }
  return r;
}

}  // namespace nitns
