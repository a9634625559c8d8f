#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/helpers.hpp"

using namespace lcl;
using lcl::testing::random_field;

TEST_CASE("basis evaluation on both index classes") {
  CHECK(eval_basis({1, 0}, {kTwoPi / 4.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_basis({-1, 0}, {0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_basis({0, 1}, {0.0, kTwoPi / 4.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(eval_basis({0, 0}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("sine and cosine halves pair up") {
  NoiseStream rng(2, 0);
  for (int i = 0; i < 50; ++i) {
    const Vec2 x(kTwoPi * rng.uniform(), kTwoPi * rng.uniform());
    const WaveVector k{3, -2};
    const double s = eval_basis(k, x), c = eval_basis(-k, x);
    CHECK(s * s + c * c == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(in_positive_class(k) != in_positive_class(-k));
  }
}

TEST_CASE("gamma convention and contract") {
  CHECK(gamma({1, 0}) == Vec2(0.0, -1.0));
  CHECK(gamma({0, 1}) == Vec2(1.0, 0.0));
  CHECK(gamma({1, 1}) == Vec2(0.5, -0.5));
  // contract: perpendicular to k with norm 1/|k|, exhaustively
  for (int k1 = -64; k1 <= 64; ++k1)
    for (int k2 = -64; k2 <= 64; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const WaveVector k{k1, k2};
      const Vec2 g = gamma(k);
      CHECK(std::abs(k1 * g[0] + k2 * g[1]) < 1e-15);
      CHECK(g.norm() == doctest::Approx(1.0 / k.norm()).epsilon(1e-13));
    }
}

TEST_CASE("velocity evaluation is the exact trigonometric sum") {
  SpectralVelocity u(4);
  u.set_coeff({1, 0}, 1.0);
  const Vec2 at(kTwoPi / 4.0, 0.0);
  CHECK((eval_velocity(u, at) - Vec2(0.0, -1.0)).norm() < 1e-15);

  SpectralVelocity zero(4);
  CHECK(eval_velocity(zero, {0.3, 0.4}).norm() == 0.0);

  // sum of the two single-mode evaluations
  SpectralVelocity a(4), b(4), both(4);
  a.set_coeff({1, 0}, 1.0);
  b.set_coeff({0, 1}, 2.0);
  both.set_coeff({1, 0}, 1.0);
  both.set_coeff({0, 1}, 2.0);
  const Vec2 x(kTwoPi / 4.0, kTwoPi / 4.0);
  const Vec2 expect = eval_velocity(a, x) + eval_velocity(b, x);
  CHECK((eval_velocity(both, x) - expect).norm() < 1e-14);
  CHECK((expect - Vec2(2.0, -1.0)).norm() < 1e-14);
}

TEST_CASE("gradient: single-mode closed form and tracelessness") {
  SpectralVelocity u(4);
  u.set_coeff({1, 0}, 1.0);
  NoiseStream rng(3, 0);
  for (int i = 0; i < 20; ++i) {
    const Vec2 x(kTwoPi * rng.uniform(), kTwoPi * rng.uniform());
    Mat2 expect;
    expect << 0.0, 0.0, -std::cos(x[0]), 0.0;
    CHECK((eval_velocity_gradient(u, x) - expect).cwiseAbs().maxCoeff() < 1e-14);
  }

  const SpectralVelocity w = random_field(6, 5);
  for (int i = 0; i < 20; ++i) {
    const Vec2 x(kTwoPi * rng.uniform(), kTwoPi * rng.uniform());
    CHECK(std::abs(eval_velocity_gradient(w, x).trace()) < 1e-11);
  }
}

TEST_CASE("hessian matches finite differences of the gradient") {
  const SpectralVelocity u = random_field(5, 9, 0.5);
  const Vec2 x(1.2, 2.7);
  const Hessian2 h = eval_velocity_hessian(u, x);
  const double d = 1e-6;
  for (int j = 0; j < 2; ++j) {
    Vec2 xp = x, xm = x;
    xp[j] += d;
    xm[j] -= d;
    const Mat2 fd = (eval_velocity_gradient(u, xp) - eval_velocity_gradient(u, xm)) / (2 * d);
    for (int i = 0; i < 2; ++i)
      for (int l = 0; l < 2; ++l) CHECK(h[i](j, l) == doctest::Approx(fd(i, l)).epsilon(1e-6));
  }
  SpectralVelocity zero(4);
  const Hessian2 hz = eval_velocity_hessian(zero, x);
  CHECK(hz[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(hz[1].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projections split by Euclidean radius and conserve energy") {
  SpectralVelocity u(6);
  u.set_coeff({1, 0}, 2.0);
  u.set_coeff({5, 0}, 3.0);
  u.set_coeff({3, 4}, 1.0);  // |k| = 5
  const SpectralVelocity lo = project_low(u, 4);
  const SpectralVelocity hi = project_high(u, 4);
  CHECK(lo.coeff({1, 0}) == 2.0);
  CHECK(lo.coeff({5, 0}) == 0.0);
  CHECK(lo.coeff({3, 4}) == 0.0);
  CHECK(hi.coeff({5, 0}) == 3.0);
  CHECK(hi.coeff({3, 4}) == 1.0);

  const SpectralVelocity w = random_field(6, 12);
  const SpectralVelocity wl = project_low(w, 4), wh = project_high(w, 4);
  CHECK(energy(project_low(wh, 4)) == 0.0);
  SpectralVelocity sum = wl;
  sum.axpy(1.0, wh);
  CHECK(std::abs(energy(w) - energy(wl) - energy(wh)) < 1e-12 * energy(w));
  sum.axpy(-1.0, w);
  CHECK(energy(sum) == 0.0);  // exact coefficient-wise split
}

TEST_CASE("sobolev norms in the coefficient convention") {
  SpectralVelocity u(4);
  u.set_coeff({1, 0}, 1.0);
  CHECK(sobolev_norm(u, 1) == doctest::Approx(1.0));
  SpectralVelocity w(4);
  w.set_coeff({2, 0}, 1.0);
  CHECK(sobolev_norm(w, 2) == doctest::Approx(4.0));
  CHECK(sobolev_norm(SpectralVelocity(4), 3) == 0.0);
}
