#include <doctest.h>

#include "support/helpers.hpp"

using namespace lcl;
using lcl::testing::random_field;
using lcl::testing::small_solver;

TEST_CASE("bracket closed form at reference points") {
  const Vec2 x(0.0, 0.0);
  const Vec2 v(1.0, 0.0);
  const BundleVector b1 = bracket_ek_fbar(x, v, {1, 0});
  CHECK(b1.bx.norm() < 1e-15);                     // sin(0) kills the x block
  CHECK((b1.bv - Vec2(0.0, -1.0)).norm() < 1e-15);  // (k.v) cos(0) Pi_v gamma
  const BundleVector b2 = bracket_ek_fbar(x, v, {0, 1});
  CHECK(b2.bx.norm() < 1e-15);
  CHECK(b2.bv.norm() < 1e-15);  // both factors vanish
}

TEST_CASE("bracket equals the directional derivative of the drift") {
  ForcingSpec forcing(3, 5.5, 1.0);
  NoiseStream rng(66, 0);
  const double delta = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec2 x(kTwoPi * rng.uniform(), kTwoPi * rng.uniform());
    const double a = kTwoPi * rng.uniform();
    const Vec2 v(std::cos(a), std::sin(a));
    for (WaveVector k : forcing.modes()) {
      SpectralVelocity up(forcing.nstar()), um(forcing.nstar());
      up.set_coeff(k, delta);
      um.set_coeff(k, -delta);
      const BundleVector fp = fbar_eval(up, forcing, x, v);
      const BundleVector fm = fbar_eval(um, forcing, x, v);
      const BundleVector cf = bracket_ek_fbar(x, v, k);
      worst = std::max(worst, ((fp.bx - fm.bx) / (2 * delta) - cf.bx).norm());
      worst = std::max(worst, ((fp.bv - fm.bv) / (2 * delta) - cf.bv).norm());
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("drift restriction matches the exact evaluators") {
  ForcingSpec forcing(3, 5.5, 1.0);
  const SpectralVelocity full = random_field(6, 81, 0.7);
  const SpectralVelocity low = project_low(full, forcing.nstar());
  NoiseStream rng(5, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec2 x(kTwoPi * rng.uniform(), kTwoPi * rng.uniform());
    const double a = kTwoPi * rng.uniform();
    const Vec2 v(std::cos(a), std::sin(a));
    const BundleVector f = fbar_eval(full, forcing, x, v);
    CHECK((f.bx - eval_velocity(low, x)).norm() < 1e-12);
    const Mat2 du = eval_velocity_gradient(low, x);
    CHECK((f.bv - projective_drift(du, v)).norm() < 1e-10);
  }
}

TEST_CASE("spanning rank over the tangent bundle") {
  const std::vector<WaveVector> kfull = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  CHECK(spanning_rank({0.0, 0.0}, {1.0, 0.0}, kfull) == 3);
  CHECK(spanning_rank({0.0, 0.0}, {1.0, 0.0}, {{1, 0}}) <= 1);

  NoiseStream rng(3, 0);
  for (int i = 0; i < 100; ++i) {
    const Vec2 x(kTwoPi * rng.uniform(), kTwoPi * rng.uniform());
    const double a = kTwoPi * rng.uniform();
    const Vec2 v(std::cos(a), std::sin(a));
    CHECK(spanning_rank(x, v, kfull) == 3);
    CHECK(spanning_rank(x, v, {{1, 0}, {-1, 0}, {2, 0}, {-2, 0}}) <= 2);
  }
}

TEST_CASE("first-bracket field at zero velocity takes its closed form") {
  ForcingSpec forcing(2, 5.5, 1.0);
  const SpectralVelocity zero(4);
  const Vec2 x(1.7, 0.4);
  const Vec2 v(std::cos(2.2), std::sin(2.2));
  const double nu = 0.05;
  for (size_t i = 0; i < forcing.modes().size(); ++i) {
    const WaveVector k = forcing.modes()[i];
    const double qk = forcing.q()[i];
    const LowModeField up = upsilon_q(zero, forcing, x, v, k, nu);
    // velocity block: only the dissipation bracket survives
    for (size_t j = 0; j < forcing.modes().size(); ++j) {
      const double expect = (j == i) ? qk * nu * k.norm2() : 0.0;
      CHECK(up.fu[j] == doctest::Approx(expect).epsilon(1e-13));
    }
    // manifold block: minus the closed-form bracket, scaled by q_k
    const BundleVector b = bracket_ek_fbar(x, v, k);
    CHECK((up.fxv.bx + qk * b.bx).norm() < 1e-13);
    CHECK((up.fxv.bv + qk * b.bv).norm() < 1e-13);
  }
}

TEST_CASE("advection bracket is linear in the velocity") {
  ForcingSpec forcing(2, 5.5, 1.0);
  const SpectralVelocity u1 = random_field(4, 91, 0.5);
  const SpectralVelocity u2 = random_field(4, 92, 0.5);
  SpectralVelocity mix = u1;
  mix.scale(2.0);
  mix.axpy(-0.5, u2);
  const Vec2 x(0.3, 0.9), v(1.0, 0.0);
  const WaveVector k{1, 1};
  const double nu = 0.05;
  const LowModeField f1 = upsilon_q(u1, forcing, x, v, k, nu);
  const LowModeField f2 = upsilon_q(u2, forcing, x, v, k, nu);
  const LowModeField fm = upsilon_q(mix, forcing, x, v, k, nu);
  const LowModeField f0 = upsilon_q(SpectralVelocity(4), forcing, x, v, k, nu);
  // subtract the u-independent parts, then check linear combination
  const Eigen::VectorXd a1 = f1.fu - f0.fu;
  const Eigen::VectorXd a2 = f2.fu - f0.fu;
  const Eigen::VectorXd am = fm.fu - f0.fu;
  CHECK((am - 2.0 * a1 + 0.5 * a2).norm() < 1e-12);
}

TEST_CASE("first-bracket field equals the short-time drift of the inverse propagator") {
  // freeze the noise after burn-in and difference S over one (and half a)
  // step: the drift converges to Upsilon Q^k at first order in dt
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 0.7);
  LagrangianStepper s(cfg, forcing, NoiseStream(202, 1), Vec2(0.5, 2.8), Vec2(0.0, 1.0));
  s.burn_in(1.0);

  ForcingSpec noiseless(2, 5.5, 0.0);
  LagrangianStepper frozen(cfg, noiseless, NoiseStream(1, 1), s.particle().x,
                           s.particle().v);
  frozen.state() = s.state();
  TrajectoryRecord rec = record_trajectory(frozen, 2);

  LowModeOps ops(forcing, cfg.nu);
  const SpectralVelocity& u0 = rec.u[0];
  const Vec2 x0 = rec.x[0];
  const Vec2 v0 = rec.v[0];

  auto drift_error = [&](int refine) {
    PropagatorPath path(rec, ops, 0, 1, refine);
    const double delta = cfg.dt / refine;
    double worst = 0.0;
    for (size_t i = 0; i < forcing.modes().size(); ++i) {
      const WaveVector k = forcing.modes()[i];
      Eigen::VectorXd qe = Eigen::VectorXd::Zero(ops.dim());
      qe[int(i)] = forcing.q()[i];
      const Eigen::VectorXd fd = (path.S(1) * qe - qe) / delta;
      const LowModeField up = upsilon_q(u0, forcing, x0, v0, k, cfg.nu);
      Eigen::VectorXd expect = Eigen::VectorXd::Zero(ops.dim());
      expect.head(ops.m()) = up.fu;
      expect[ops.m()] = up.fxv.bx[0];
      expect[ops.m() + 1] = up.fxv.bx[1];
      expect[ops.m() + 2] = up.fxv.bv[0];
      expect[ops.m() + 3] = up.fxv.bv[1];
      worst = std::max(worst, (fd - expect).norm() / expect.norm());
    }
    return worst;
  };

  const double e1 = drift_error(1);   // dt = 1e-3
  const double e2 = drift_error(2);   // dt/2
  CHECK(e1 < 5e-2);
  CHECK(e2 < 0.75 * e1);  // first-order convergence under refinement
}

TEST_CASE("bracket pairings certify the lower bound") {
  ForcingSpec forcing(2, 5.5, 1.0);
  const double nu = 0.05;
  const Vec2 x(2.9, 1.1);
  const Vec2 v(std::cos(0.4), std::sin(0.4));

  // velocity-supported directions pair with the noise fields directly
  const SpectralVelocity zero(4);
  const LowerBoundReport rep = lower_bound_check(zero, forcing, x, v, nu, 500, 31);
  CHECK(rep.samples == 500);
  CHECK(rep.strictly_positive);
  CHECK(rep.min_pairing > 0.0);
  CHECK(rep.mean_pairing >= rep.min_pairing);

  // at a nonzero velocity the certificate still holds empirically
  const SpectralVelocity u = random_field(4, 55, 0.3);
  const LowerBoundReport rep2 = lower_bound_check(u, forcing, x, v, nu, 500, 32);
  CHECK(rep2.strictly_positive);
}
