#include <doctest.h>

#include <cmath>

#include "nitns/errors.hpp"
#include "nitns/initial.hpp"
#include "nitns/mollifier.hpp"
#include "nitns/spectral_ops.hpp"
#include "support.hpp"

using namespace nitns;
using namespace nitns::test;

TEST_CASE("multiplier values") {
  const Mollifier p{MollifierKind::poisson, 0.5};
  const Mollifier gs{MollifierKind::gaussian, 1.0};
  const Mollifier sh{MollifierKind::sharp, 0.25};
  for (const auto& m : {p, gs, sh}) CHECK(m.multiplier(0.0) == 1.0);
  for (double k : {1.0, 2.0, 5.0}) {
    CHECK(p.multiplier(k) > 0.0);
    CHECK(p.multiplier(k) <= 1.0);
    CHECK(gs.multiplier(k) > 0.0);
    CHECK(gs.multiplier(k) <= 1.0);
  }
  CHECK(sh.multiplier(4.0) == 1.0);
  CHECK(sh.multiplier(4.5) == 0.0);
  CHECK_THROWS_AS(Mollifier({MollifierKind::poisson, -1.0}).validate(), ConfigError);
}

TEST_CASE("Poisson kernel at delta 0.5 on cos x") {
  const auto g = Grid::create(2, 16);
  const auto f = sample(g, 1, [](double x, double, double) { return std::vector{std::cos(x)}; });
  auto want = to_physical(f);
  for (double& x : want.data()) x *= 0.606531;
  CHECK(max_abs_diff(apply(Mollifier{MollifierKind::poisson, 0.5}, f), want) < 1e-6);
  for (double& x : want.data()) x *= std::exp(-0.5) / 0.606531;
  CHECK(max_abs_diff(apply(Mollifier{MollifierKind::poisson, 0.5}, f), want) < 1e-15);
}

TEST_CASE("zero width is the identity") {
  const auto g = Grid::create(3, 16);
  const SpectralField f = random_field(g, 3, 4, 5.0);
  for (auto kind : {MollifierKind::poisson, MollifierKind::gaussian, MollifierKind::sharp}) {
    CHECK(max_abs_diff(apply(Mollifier{kind, 0.0}, f), f) == 0.0);
  }
  for (auto kind : {MollifierKind::poisson, MollifierKind::gaussian}) {
    CHECK(max_abs_diff(apply_inverse_sqrt(Mollifier{kind, 0.0}, f), f) == 0.0);
  }
}

TEST_CASE("Gaussian at delta 1 on a |k| = 2 mode") {
  const auto g = Grid::create(2, 16);
  const auto f = sample(g, 1, [](double x, double, double) { return std::vector{std::sin(2 * x)}; });
  auto want = to_physical(f);
  for (double& x : want.data()) x *= 0.135335;
  CHECK(max_abs_diff(apply(Mollifier{MollifierKind::gaussian, 1.0}, f), want) < 1e-6);
}

TEST_CASE("inverse square root") {
  const auto g = Grid::create(2, 16);
  const auto f = sample(g, 1, [](double x, double, double) { return std::vector{std::cos(x)}; });
  auto want = to_physical(f);
  for (double& x : want.data()) x *= 1.284025;
  CHECK(max_abs_diff(apply_inverse_sqrt(Mollifier{MollifierKind::poisson, 0.5}, f), want) < 1e-6);

  const SpectralField r = dealias(random_field(g, 2, 8, 8.0));
  for (auto kind : {MollifierKind::poisson, MollifierKind::gaussian}) {
    const Mollifier m{kind, 0.4};
    const auto back = apply(m, apply_inverse_sqrt(m, apply_inverse_sqrt(m, r)));
    CHECK(max_abs_diff(back, r) / max_abs(r) < 1e-12);
  }
  CHECK_THROWS_AS(apply_inverse_sqrt(Mollifier{MollifierKind::sharp, 0.5}, r), ConfigError);
  CHECK_THROWS_AS(apply_inverse_sqrt(Mollifier{MollifierKind::gaussian, 5.0}, r),
                  OverflowGuardError);
}
