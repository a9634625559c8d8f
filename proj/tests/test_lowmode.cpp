#include <doctest.h>

#include "support/helpers.hpp"

using namespace lcl;
using lcl::testing::random_field;
using lcl::testing::small_solver;

namespace {

TrajectoryRecord quick_record(const SolverConfig& cfg, const ForcingSpec& forcing,
                              uint64_t stream, int nsteps, double burn = 1.0) {
  LagrangianStepper s(cfg, forcing, NoiseStream(909, stream), Vec2(0.8, 3.1),
                      Vec2(0.0, 1.0));
  s.burn_in(burn);
  return record_trajectory(s, nsteps);
}

}  // namespace

TEST_CASE("embedding pack/unpack and tangency re-projection") {
  ForcingSpec forcing(2, 5.5, 1.0);
  LowModeOps ops(forcing, 0.05);
  CHECK(ops.m() == 12);  // lattice points with 0 < |k|^2 <= 4
  CHECK(ops.dim() == 16);

  LowModeVector h;
  h.hu = Eigen::VectorXd::LinSpaced(ops.m(), 1.0, 2.0);
  h.hx = Vec2(0.3, -0.4);
  h.hv = Vec2(1.0, 1.0);
  const Eigen::VectorXd z = ops.pack(h);
  const Vec2 v(1.0, 0.0);
  const LowModeVector back = ops.unpack(z, v);
  CHECK((back.hu - h.hu).norm() == 0.0);
  CHECK((back.hx - h.hx).norm() == 0.0);
  CHECK(std::abs(back.hv.dot(v)) < 1e-15);  // re-projected tangent
  CHECK(back.hv[1] == 1.0);
}

TEST_CASE("coupling matrix agrees with the solver-grid linearization") {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 1.0);
  SnsSolver solver(cfg, forcing);
  LowModeOps ops(forcing, cfg.nu);
  const SpectralVelocity u = random_field(cfg.kmax, 61, 0.5);

  Eigen::MatrixXd c;
  ops.advection_coupling(u, c);
  for (int j = 0; j < ops.m(); ++j) {
    SpectralVelocity phi(cfg.kmax);
    phi.set_coeff(forcing.modes()[j], 1.0);
    const SpectralVelocity col = solver.advection_derivative(u, phi);
    for (int r = 0; r < ops.m(); ++r)
      CHECK(c(r, j) == doctest::Approx(col.coeff(forcing.modes()[r])).epsilon(1e-11));
  }
}

TEST_CASE("step matrix equals the low block of the full Jacobian step") {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 0.7);
  SnsSolver solver(cfg, forcing);
  LowModeOps ops(forcing, cfg.nu);
  TrajectoryRecord rec = quick_record(cfg, forcing, 1, 1);

  const Eigen::MatrixXd t = ops.step_matrix(cfg, rec.u[0], rec.x[0], rec.v[0]);
  NoiseStream hrng(5, 5);
  for (int trial = 0; trial < 4; ++trial) {
    // a random low-supported tangent with hv tangent to v(0)
    LowModeVector h;
    h.hu = Eigen::VectorXd(ops.m());
    for (int i = 0; i < ops.m(); ++i) h.hu[i] = hrng.gaussian();
    h.hx = Vec2(hrng.gaussian(), hrng.gaussian());
    h.hv = hrng.gaussian() * Vec2(-rec.v[0][1], rec.v[0][0]);

    FullTangent hf;
    hf.hu = ops.field_of(ops.pack(h), cfg.kmax);
    hf.hx = h.hx;
    hf.hv = h.hv;
    const FullTangent jh = jacobian_apply(rec, solver, 0.0, cfg.dt, hf);

    const Eigen::VectorXd tz = t * ops.pack(h);
    const auto& modes = forcing.modes();
    for (int i = 0; i < ops.m(); ++i)
      CHECK(tz[i] == doctest::Approx(jh.hu.coeff(modes[i])).epsilon(1e-11));
    CHECK((Vec2(tz[ops.m()], tz[ops.m() + 1]) - jh.hx).norm() < 1e-12);
    CHECK((Vec2(tz[ops.m() + 2], tz[ops.m() + 3]) - jh.hv).norm() < 1e-12);
  }
}

TEST_CASE("propagator at zero velocity is pure heat decay on the forced block") {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 0.0);
  LagrangianStepper s(cfg, forcing, NoiseStream(1, 1), Vec2(1.0, 1.0), Vec2(1.0, 0.0));
  TrajectoryRecord rec = record_trajectory(s, 100);  // u stays identically zero
  LowModeOps ops(forcing, cfg.nu);

  const LowModePropagator r = evolve_R(rec, ops, 0.0, 0.1);
  const auto& modes = forcing.modes();
  for (int i = 0; i < ops.m(); ++i)
    for (int j = 0; j < ops.m(); ++j) {
      const double expect = (i == j) ? std::exp(-cfg.nu * modes[i].norm2() * 0.1) : 0.0;
      CHECK(r.mat(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("trivial interval gives the identity") {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 0.5);
  TrajectoryRecord rec = quick_record(cfg, forcing, 2, 10);
  LowModeOps ops(forcing, cfg.nu);
  const LowModePropagator r = evolve_R(rec, ops, 0.004, 0.004);
  CHECK((r.mat - Eigen::MatrixXd::Identity(ops.dim(), ops.dim())).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("inverse propagator: S R = Id on the tangent subspace") {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 0.7);
  for (uint64_t stream = 1; stream <= 3; ++stream) {
    TrajectoryRecord rec = quick_record(cfg, forcing, stream, 450);
    LowModeOps ops(forcing, cfg.nu);
    const LowModePropagator r = evolve_R(rec, ops, 0.05, 0.45);
    const LowModePropagator sp = evolve_S(rec, ops, 0.05, 0.45);
    const Eigen::MatrixXd w = ops.tangent_basis(rec.v[rec.node(0.05)]);
    const Eigen::MatrixXd prod = w.transpose() * sp.mat * r.mat * w;
    const double err =
        (prod - Eigen::MatrixXd::Identity(ops.dim() - 1, ops.dim() - 1)).cwiseAbs().maxCoeff();
    CHECK(err < 1e-6);
  }
}

TEST_CASE("generator linearity and the finite-difference oracle") {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 1.0);
  LowModeOps ops(forcing, cfg.nu);
  const SpectralVelocity u = random_field(cfg.kmax, 71, 0.4);
  const Vec2 x(0.9, 4.4);
  const Vec2 v(std::cos(1.3), std::sin(1.3));

  NoiseStream rng(6, 0);
  LowModeVector h1, h2;
  h1.hu = Eigen::VectorXd(ops.m());
  h2.hu = Eigen::VectorXd(ops.m());
  for (int i = 0; i < ops.m(); ++i) {
    h1.hu[i] = rng.gaussian();
    h2.hu[i] = rng.gaussian();
  }
  h1.hx = Vec2(rng.gaussian(), rng.gaussian());
  h2.hx = Vec2(rng.gaussian(), rng.gaussian());
  const Vec2 vp(-v[1], v[0]);
  h1.hv = rng.gaussian() * vp;
  h2.hv = rng.gaussian() * vp;

  const LowModeVector l1 = ops.ltilde_apply(u, x, v, h1);
  const LowModeVector l2 = ops.ltilde_apply(u, x, v, h2);
  LowModeVector hsum;
  hsum.hu = 2.0 * h1.hu - 3.0 * h2.hu;
  hsum.hx = 2.0 * h1.hx - 3.0 * h2.hx;
  hsum.hv = 2.0 * h1.hv - 3.0 * h2.hv;
  const LowModeVector lsum = ops.ltilde_apply(u, x, v, hsum);
  CHECK((lsum.hu - 2.0 * l1.hu + 3.0 * l2.hu).norm() < 1e-12);
  CHECK((lsum.hx - 2.0 * l1.hx + 3.0 * l2.hx).norm() < 1e-12);
  CHECK((lsum.hv - 2.0 * l1.hv + 3.0 * l2.hv).norm() < 1e-12);

  // h = 0 maps to 0
  LowModeVector hz;
  hz.hu = Eigen::VectorXd::Zero(ops.m());
  const LowModeVector lz = ops.ltilde_apply(u, x, v, hz);
  CHECK(lz.hu.norm() == 0.0);
  CHECK(lz.hx.norm() == 0.0);
  CHECK(lz.hv.norm() == 0.0);
}

TEST_CASE("generator at zero velocity: dissipation plus field coupling") {
  ForcingSpec forcing(2, 5.5, 1.0);
  LowModeOps ops(forcing, 0.07);
  const SpectralVelocity zero(6);
  const Vec2 x(1.0, 2.0);
  const Vec2 v(0.0, 1.0);

  LowModeVector h;
  h.hu = Eigen::VectorXd::Zero(ops.m());
  h.hu[3] = 1.5;
  const LowModeVector out = ops.ltilde_apply(zero, x, v, h);
  // velocity block: -nu |k|^2 hu, no advection at u = 0
  for (int i = 0; i < ops.m(); ++i) {
    const double expect = (i == 3) ? -0.07 * forcing.modes()[3].norm2() * 1.5 : 0.0;
    CHECK(out.hu[i] == doctest::Approx(expect).epsilon(1e-13));
  }
  // position block: the perturbation field evaluated at x
  const WaveVector k = forcing.modes()[3];
  const Vec2 expect_x = 1.5 * eval_basis(k, x) * gamma(k);
  CHECK((out.hx - expect_x).norm() < 1e-13);
  // direction block: projected gradient of the perturbation field
  const Vec2 pg = 1.5 * eval_basis(-k, x) * (k.k1 * v[0] + k.k2 * v[1]) * gamma(k);
  const Vec2 expect_v = pg - v * (v.dot(pg));
  CHECK((out.hv - expect_v).norm() < 1e-13);
}
