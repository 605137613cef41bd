#include "nitns/stepper.hpp"

#include "nitns/errors.hpp"
#include "nitns/spectral_ops.hpp"

namespace nitns {

namespace {

State heat(const State& y, double nu_t) {
  State out = y;
  for (auto& f : out) apply_heat(f, nu_t);
  return out;
}

void axpy(State& y, double a, const State& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i].axpy(a, x[i]);
}

State combine(const State& y, double a, const State& x) {
  State out = y;
  axpy(out, a, x);
  return out;
}

void check_shape(const State& y, const State& k) {
  if (k.size() != y.size()) throw ConfigError("rhs returned a state of the wrong size");
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::rk2 ? "RK2" : "RK4"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "RK2" || name == "rk2") return Scheme::rk2;
  if (name == "RK4" || name == "rk4") return Scheme::rk4;
  throw ConfigError("unknown scheme '" + name + "' (expected RK2 or RK4)");
}

State integrating_factor_step(const State& y, const RhsFn& rhs, double nu, double dt,
                              Scheme scheme) {
  const double h = dt;
  if (scheme == Scheme::rk2) {
    const State k1 = rhs(y);
    check_shape(y, k1);
    const State a = heat(combine(y, h, k1), nu * h);
    const State k2 = rhs(a);
    State out = heat(combine(y, 0.5 * h, k1), nu * h);
    axpy(out, 0.5 * h, k2);
    return out;
  }

  const State k1 = rhs(y);
  check_shape(y, k1);
  const State y_half = heat(y, 0.5 * nu * h);
  const State k1_half = heat(k1, 0.5 * nu * h);

  State a = y_half;
  axpy(a, 0.5 * h, k1_half);
  const State k2 = rhs(a);

  State b = y_half;
  axpy(b, 0.5 * h, k2);
  const State k3 = rhs(b);

  State c = heat(y, nu * h);
  axpy(c, h, heat(k3, 0.5 * nu * h));
  const State k4 = rhs(c);

  // y1 = E y + h/6 (E k1 + 2 E_half (k2 + k3) + k4)
  State out = heat(y, nu * h);
  axpy(out, h / 6.0, heat(k1, nu * h));
  State mid = k2;
  axpy(mid, 1.0, k3);
  axpy(out, h / 3.0, heat(mid, 0.5 * nu * h));
  axpy(out, h / 6.0, k4);
  return out;
}

}  // namespace nitns
