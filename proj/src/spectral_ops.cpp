#include "nitns/spectral_ops.hpp"

#include <algorithm>
#include <cmath>

#include "nitns/errors.hpp"

namespace nitns {

namespace {

constexpr Complex kI{0.0, 1.0};

}  // namespace

SpectralField gradient(const SpectralField& f) {
  const auto& g = *f.grid();
  const int d = g.dim();
  SpectralField out(f.grid(), f.ncomp() * d);
  for (int c = 0; c < f.ncomp(); ++c) {
    auto fc = f.comp(c);
    for (int j = 0; j < d; ++j) {
      auto oc = out.comp(c * d + j);
      for (std::size_t s = 0; s < g.spectral_size(); ++s) oc[s] = kI * g.deriv_k(s, j) * fc[s];
    }
  }
  return out;
}

SpectralField divergence(const SpectralField& v) {
  const auto& g = *v.grid();
  const int d = g.dim();
  require_components(v.ncomp(), d, "divergence");
  SpectralField out(v.grid(), 1);
  auto o = out.comp(0);
  for (int j = 0; j < d; ++j) {
    auto vj = v.comp(j);
    for (std::size_t s = 0; s < g.spectral_size(); ++s) o[s] += kI * g.deriv_k(s, j) * vj[s];
  }
  return out;
}

SpectralField curl(const SpectralField& v) {
  const auto& g = *v.grid();
  const int d = g.dim();
  require_components(v.ncomp(), d, "curl");
  const auto ns = g.spectral_size();
  if (d == 2) {
    SpectralField out(v.grid(), 1);
    auto o = out.comp(0);
    auto v0 = v.comp(0);
    auto v1 = v.comp(1);
    for (std::size_t s = 0; s < ns; ++s) {
      o[s] = kI * (g.deriv_k(s, 0) * v1[s] - g.deriv_k(s, 1) * v0[s]);
    }
    return out;
  }
  SpectralField out(v.grid(), 3);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    auto o = out.comp(i);
    auto vj = v.comp(j);
    auto vk = v.comp(k);
    for (std::size_t s = 0; s < ns; ++s) {
      o[s] = kI * (g.deriv_k(s, j) * vk[s] - g.deriv_k(s, k) * vj[s]);
    }
  }
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  const auto& g = *f.grid();
  SpectralField out(f.grid(), f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c) {
    auto fc = f.comp(c);
    auto oc = out.comp(c);
    for (std::size_t s = 0; s < g.spectral_size(); ++s) oc[s] = -g.k_squared(s) * fc[s];
  }
  return out;
}

SpectralField leray_project(const SpectralField& v) {
  const auto& g = *v.grid();
  const int d = g.dim();
  require_components(v.ncomp(), d, "leray_project");
  SpectralField out = v;
  for (std::size_t s = 0; s < g.spectral_size(); ++s) {
    const double kd2 = g.deriv_k_squared(s);
    if (kd2 == 0.0) continue;
    Complex kdotv = 0.0;
    for (int j = 0; j < d; ++j) kdotv += g.deriv_k(s, j) * v.comp(j)[s];
    const Complex factor = kdotv / kd2;
    for (int j = 0; j < d; ++j) out.comp(j)[s] -= g.deriv_k(s, j) * factor;
  }
  return out;
}

SpectralField biot_savart(const SpectralField& omega) {
  const auto& g = *omega.grid();
  const int d = g.dim();
  require_components(omega.ncomp(), d == 3 ? 3 : 1, "biot_savart");
  double peak = 0.0;
  double mean = 0.0;
  for (int c = 0; c < omega.ncomp(); ++c) {
    for (auto z : omega.comp(c)) peak = std::max(peak, std::abs(z));
    mean = std::max(mean, std::abs(omega.comp(c)[0]));
  }
  if (mean > 1e-12 * peak) {
    throw ConfigError("biot_savart: vorticity has non-zero mean (no periodic velocity)");
  }
  const auto ns = g.spectral_size();
  SpectralField u(omega.grid(), d);
  if (d == 2) {
    auto w = omega.comp(0);
    auto u0 = u.comp(0);
    auto u1 = u.comp(1);
    for (std::size_t s = 0; s < ns; ++s) {
      const double kd2 = g.deriv_k_squared(s);
      if (kd2 == 0.0) continue;
      u0[s] = kI * g.deriv_k(s, 1) * w[s] / kd2;
      u1[s] = -kI * g.deriv_k(s, 0) * w[s] / kd2;
    }
    return u;
  }
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    auto o = u.comp(i);
    auto wj = omega.comp(j);
    auto wk = omega.comp(k);
    for (std::size_t s = 0; s < ns; ++s) {
      const double kd2 = g.deriv_k_squared(s);
      if (kd2 == 0.0) continue;
      o[s] = kI * (g.deriv_k(s, j) * wk[s] - g.deriv_k(s, k) * wj[s]) / kd2;
    }
  }
  return u;
}

SpectralField dealias(const SpectralField& f) {
  SpectralField out = f;
  dealias_in_place(out);
  return out;
}

void dealias_in_place(SpectralField& f) {
  const auto& g = *f.grid();
  for (int c = 0; c < f.ncomp(); ++c) {
    auto fc = f.comp(c);
    for (std::size_t s = 0; s < g.spectral_size(); ++s) {
      if (!g.in_dealias_mask(s)) fc[s] = 0.0;
    }
  }
}

void remove_mean(SpectralField& f) {
  for (int c = 0; c < f.ncomp(); ++c) f.comp(c)[0] = 0.0;
}

void apply_heat(SpectralField& f, double nu_t) {
  if (nu_t == 0.0) return;
  const auto& g = *f.grid();
  std::vector<double> factor(g.spectral_size());
  for (std::size_t s = 0; s < g.spectral_size(); ++s) factor[s] = std::exp(-nu_t * g.k_squared(s));
  for (int c = 0; c < f.ncomp(); ++c) {
    auto fc = f.comp(c);
    for (std::size_t s = 0; s < g.spectral_size(); ++s) fc[s] *= factor[s];
  }
}

double lattice_sum_sq(const SpectralField& f) {
  return weighted_lattice_sum_sq(f, [](std::size_t) { return 1.0; });
}

double lattice_inner(const SpectralField& f, const SpectralField& h) {
  require_same_grid(f.grid(), h.grid(), "lattice_inner");
  require_components(h.ncomp(), f.ncomp(), "lattice_inner");
  const auto& g = *f.grid();
  double total = 0.0;
  for (int c = 0; c < f.ncomp(); ++c) {
    auto fc = f.comp(c);
    auto hc = h.comp(c);
    for (std::size_t s = 0; s < g.spectral_size(); ++s) {
      total += g.multiplicity(s) * (fc[s] * std::conj(hc[s])).real();
    }
  }
  return total;
}

double quadrature_inner(const PhysicalField& f, const PhysicalField& h) {
  require_same_grid(f.grid(), h.grid(), "quadrature_inner");
  require_components(h.ncomp(), f.ncomp(), "quadrature_inner");
  double total = 0.0;
  for (std::size_t i = 0; i < f.data().size(); ++i) total += f.data()[i] * h.data()[i];
  const auto& g = *f.grid();
  return total * g.volume() / static_cast<double>(g.physical_size());
}

}  // namespace nitns
