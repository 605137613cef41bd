#include "nitns/initial.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nitns/diagnostics.hpp"
#include "nitns/errors.hpp"
#include "nitns/spectral_ops.hpp"

namespace nitns {

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::taylor_green:
      return "taylor_green";
    case InitialKind::abc:
      return "abc";
    case InitialKind::random_band:
      return "random_band";
  }
  return "taylor_green";
}

InitialKind parse_initial_kind(const std::string& name) {
  if (name == "taylor_green" || name == "tg") return InitialKind::taylor_green;
  if (name == "abc") return InitialKind::abc;
  if (name == "random_band") return InitialKind::random_band;
  throw ConfigError("unknown initial condition '" + name + "'");
}

namespace {

SpectralField sample(const GridPtr& grid, int ncomp, auto&& fn) {
  PhysicalField f(grid, ncomp);
  for (std::size_t p = 0; p < grid->physical_size(); ++p) {
    const auto x = grid->point(p);
    fn(x[0], x[1], x[2], p, f);
  }
  return to_spectral(f);
}

SpectralField taylor_green(const GridPtr& grid, double a) {
  if (grid->dim() == 2) {
    return sample(grid, 2, [a](double x, double y, double, std::size_t p, PhysicalField& f) {
      f.at(0, p) = a * std::cos(x) * std::sin(y);
      f.at(1, p) = -a * std::sin(x) * std::cos(y);
    });
  }
  return sample(grid, 3, [a](double x, double y, double z, std::size_t p, PhysicalField& f) {
    f.at(0, p) = a * std::cos(x) * std::sin(y) * std::cos(z);
    f.at(1, p) = -a * std::sin(x) * std::cos(y) * std::cos(z);
    f.at(2, p) = 0.0;
  });
}

SpectralField abc_flow(const GridPtr& grid, double a) {
  if (grid->dim() != 3) throw ConfigError("ic.kind = abc requires grid.dim = 3");
  return sample(grid, 3, [a](double x, double y, double z, std::size_t p, PhysicalField& f) {
    f.at(0, p) = a * (std::sin(z) + std::cos(y));
    f.at(1, p) = a * (std::sin(x) + std::cos(z));
    f.at(2, p) = a * (std::sin(y) + std::cos(x));
  });
}

// Divergence-free Gaussian noise on the shell kmin <= |k| <= kmax inside the
// dealias mask, with unit kinetic energy.
SpectralField random_shell(const GridPtr& grid, std::uint64_t seed, double kmin, double kmax) {
  const auto& g = *grid;
  const int d = g.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(grid, d);
  bool any = false;
  for (std::size_t s = 0; s < g.spectral_size(); ++s) {
    const double k = g.k_magnitude(s);
    const bool inside = k > 0.0 && k >= kmin && k <= kmax && g.in_dealias_mask(s);
    for (int c = 0; c < d; ++c) {
      // Draw for every mode so the stream does not depend on the shell.
      const double re = normal(rng);
      const double im = normal(rng);
      if (inside) f.comp(c)[s] = Complex(re, im);
    }
    any = any || inside;
  }
  if (!any) throw ConfigError("random_band: empty wavenumber shell");
  // Round trip through physical space restores conjugate symmetry.
  f = leray_project(to_spectral(to_physical(f)));
  remove_mean(f);
  const double K = kinetic_energy(f);
  if (!(K > 0.0)) throw ConfigError("random_band: shell carries no divergence-free modes");
  f *= 1.0 / std::sqrt(K);
  return f;
}

}  // namespace

SpectralField random_field(const GridPtr& grid, int ncomp, std::uint64_t seed, double kmax,
                           double amplitude) {
  const auto& g = *grid;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f(grid, ncomp);
  for (std::size_t s = 0; s < g.spectral_size(); ++s) {
    const double k = g.k_magnitude(s);
    for (int c = 0; c < ncomp; ++c) {
      const double re = normal(rng);
      const double im = normal(rng);
      if (k > 0.0 && k <= kmax) f.comp(c)[s] = Complex(re, im);
    }
  }
  PhysicalField p = to_physical(f);
  double peak = 0.0;
  for (double x : p.data()) peak = std::max(peak, std::abs(x));
  if (peak > 0.0) {
    for (double& x : p.data()) x *= amplitude / peak;
  }
  SpectralField out = to_spectral(p);
  remove_mean(out);
  return out;
}

double initial_reynolds(const SpectralField& u, double nu) {
  if (!(nu > 0.0)) throw ConfigError("initial Reynolds number requires nu > 0");
  const double e = 2.0 * kinetic_energy(u);
  const double z = enstrophy(gradient(u));
  return std::pow(e, 0.25) * std::pow(z, 0.25) / nu;
}

SpectralField make_initial_velocity(const InitialCondition& ic, const GridPtr& grid, double nu) {
  if (!(ic.kmin <= ic.kmax)) throw ConfigError("ic.kmin must not exceed ic.kmax");
  if (ic.kmax > grid->max_masked_k()) {
    throw ConfigError("ic.kmax lies outside the dealias mask");
  }
  if (!(ic.perturbation >= 0.0)) throw ConfigError("ic.perturbation must be >= 0");
  SpectralField u;
  switch (ic.kind) {
    case InitialKind::taylor_green:
      u = taylor_green(grid, ic.amplitude);
      break;
    case InitialKind::abc:
      u = abc_flow(grid, ic.amplitude);
      break;
    case InitialKind::random_band: {
      u = random_shell(grid, ic.seed, ic.kmin, ic.kmax);
      if (ic.r0) {
        if (!(*ic.r0 >= 0.0)) throw ConfigError("ic.r0 must be >= 0");
        u *= *ic.r0 / initial_reynolds(u, nu);
      } else {
        if (!(ic.amplitude >= 0.0)) throw ConfigError("ic.amplitude must be >= 0");
        u *= std::sqrt(ic.amplitude);
      }
      return u;
    }
  }
  if (ic.perturbation > 0.0) {
    const double K = kinetic_energy(u);
    SpectralField noise = random_shell(grid, ic.seed, ic.kmin, ic.kmax);
    u.axpy(std::sqrt(ic.perturbation * K), noise);
  }
  dealias_in_place(u);
  remove_mean(u);
  return u;
}

}  // namespace nitns
