#include <cmath>
#include <cstdio>

#include "lcl/lab.hpp"

namespace lcl {

namespace {

std::string fmt_err(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "err=%.3g", v);
  return buf;
}

void push(std::vector<ValidationCheck>& out, const std::string& name, bool pass,
          const std::string& detail) {
  out.push_back({name, pass, detail});
}

SolverConfig small_solver() {
  SolverConfig cfg;
  cfg.nu = 0.05;
  cfg.dt = 1e-3;
  cfg.kmax = 8;
  cfg.gridsize = 28;  // strictly alias-free: 28 > 3*kmax
  return cfg;
}

SpectralVelocity random_field(int kmax, uint64_t seed, double scale) {
  NoiseStream rng(seed, 0);
  SpectralVelocity u(kmax);
  for (double& a : u.raw()) a = scale * rng.gaussian();
  u.raw()[u.index({0, 0})] = 0.0;
  return u;
}

// ---- individual checks -------------------------------------------------

void check_gamma(std::vector<ValidationCheck>& out) {
  double worst = 0.0;
  for (int k1 = -64; k1 <= 64; ++k1)
    for (int k2 = -64; k2 <= 64; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      WaveVector k{k1, k2};
      const Vec2 g = gamma(k);
      worst = std::max(worst, std::abs(k1 * g[0] + k2 * g[1]));
      worst = std::max(worst, std::abs(g.norm() - 1.0 / k.norm()));
    }
  push(out, "gamma-orthogonality", worst < 1e-14, fmt_err(worst));
}

void check_basis_pair(std::vector<ValidationCheck>& out) {
  NoiseStream rng(7, 0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vec2 x(kTwoPi * rng.uniform(), kTwoPi * rng.uniform());
    const WaveVector k{int(rng.uniform() * 9) - 4, int(rng.uniform() * 9) - 4};
    if (k.is_zero()) continue;
    const double s = eval_basis(k, x), c = eval_basis(-k, x);
    worst = std::max(worst, std::abs(s * s + c * c - 1.0));
  }
  push(out, "basis-sin-cos-pair", worst < 1e-12, fmt_err(worst));
}

void check_roundtrip(std::vector<ValidationCheck>& out) {
  SpectralWorkspace ws(32);
  const SpectralVelocity u = random_field(8, 11, 0.7);
  const PhysicalField f = ws.to_grid(u);
  const SpectralVelocity back = ws.from_grid(f, 8);
  double worst = 0.0;
  u.for_each([&](WaveVector k, double a) {
    worst = std::max(worst, std::abs(a - back.coeff(k)));
  });
  push(out, "grid-round-trip", worst < 1e-12, fmt_err(worst));

  // a pure gradient field is annihilated by the projection
  PhysicalField gradphi(32);
  for (int i1 = 0; i1 < 32; ++i1)
    for (int i2 = 0; i2 < 32; ++i2) {
      gradphi.ux[size_t(i1) * 32 + i2] = -std::sin(kTwoPi * i1 / 32.0);
      gradphi.uy[size_t(i1) * 32 + i2] = 0.0;
    }
  const SpectralVelocity z = ws.from_grid(gradphi, 8);
  const double gnorm = std::sqrt(energy(z));
  push(out, "leray-annihilates-gradients", gnorm < 1e-12, fmt_err(gnorm));
}

void check_shear_decay(std::vector<ValidationCheck>& out) {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 0.0);
  SnsSolver solver(cfg, forcing);
  SnsState st;
  st.u = SpectralVelocity(cfg.kmax);
  st.u.set_coeff({1, 0}, 1.0);
  NoiseStream rng(1, 1);
  for (int i = 0; i < 1000; ++i) solver.step(st, rng);
  const double expect = std::exp(-cfg.nu);
  const double err = std::abs(st.u.coeff({1, 0}) - expect) / expect;
  push(out, "single-mode-viscous-decay", err < 1e-10, fmt_err(err));
}

void check_energy_neutrality(std::vector<ValidationCheck>& out) {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 0.0);
  SnsSolver solver(cfg, forcing);
  const SpectralVelocity u = random_field(cfg.kmax, 23, 0.5);
  const SpectralVelocity b = solver.nonlinear_term(u);
  const double pair = std::abs(proxy_dot(b, u));
  push(out, "advection-energy-neutral", pair < 1e-10, fmt_err(pair));
}

void check_det_tangent(std::vector<ValidationCheck>& out) {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 0.5);
  LagrangianStepper s(cfg, forcing, NoiseStream(3, 1), Vec2(1.0, 2.0), Vec2(0.0, 1.0));
  s.burn_in(2.0);
  s.tangent().a = Mat2::Identity();
  for (int i = 0; i < 1000; ++i) s.step();
  const double err = std::abs(s.tangent().a.determinant() - 1.0);
  push(out, "tangent-volume-conservation", err < 1e-6, fmt_err(err));
}

void check_inverse_propagator(std::vector<ValidationCheck>& out) {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 0.5);
  LagrangianStepper s(cfg, forcing, NoiseStream(5, 1), Vec2(0.3, 4.0), Vec2(1.0, 0.0));
  s.burn_in(1.0);
  TrajectoryRecord rec = record_trajectory(s, 200);
  LowModeOps ops(forcing, cfg.nu);
  const LowModePropagator r = evolve_R(rec, ops, 0.1, 0.2);
  const LowModePropagator sp = evolve_S(rec, ops, 0.1, 0.2);
  const Eigen::MatrixXd prod = sp.mat * r.mat;
  const Eigen::MatrixXd w = ops.tangent_basis(rec.v[rec.node(0.1)]);
  const double err =
      (w.transpose() * prod * w - Eigen::MatrixXd::Identity(ops.dim() - 1, ops.dim() - 1))
          .cwiseAbs()
          .maxCoeff();
  push(out, "inverse-propagator-identity", err < 1e-6, fmt_err(err));
}

void check_spanning(std::vector<ValidationCheck>& out) {
  NoiseStream rng(9, 0);
  const std::vector<WaveVector> kfull = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const std::vector<WaveVector> kline = {{1, 0}, {-1, 0}, {2, 0}};
  bool ok = true;
  for (int i = 0; i < 20; ++i) {
    const Vec2 x(kTwoPi * rng.uniform(), kTwoPi * rng.uniform());
    const double a = kTwoPi * rng.uniform();
    const Vec2 v(std::cos(a), std::sin(a));
    ok = ok && spanning_rank(x, v, kfull) == 3 && spanning_rank(x, v, kline) <= 2;
  }
  push(out, "bracket-spanning-rank", ok, ok ? "rank pattern as expected" : "rank mismatch");
}

void check_bracket_fd(std::vector<ValidationCheck>& out) {
  ForcingSpec forcing(2, 5.5, 1.0);
  NoiseStream rng(13, 0);
  double worst = 0.0;
  const double delta = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    const Vec2 x(kTwoPi * rng.uniform(), kTwoPi * rng.uniform());
    const double a = kTwoPi * rng.uniform();
    const Vec2 v(std::cos(a), std::sin(a));
    for (WaveVector k : forcing.modes()) {
      SpectralVelocity up(forcing.nstar());
      up.set_coeff(k, delta);
      SpectralVelocity um(forcing.nstar());
      um.set_coeff(k, -delta);
      const BundleVector fp = fbar_eval(up, forcing, x, v);
      const BundleVector fm = fbar_eval(um, forcing, x, v);
      const BundleVector cf = bracket_ek_fbar(x, v, k);
      const Vec2 dbx = (fp.bx - fm.bx) / (2.0 * delta);
      const Vec2 dbv = (fp.bv - fm.bv) / (2.0 * delta);
      worst = std::max(worst, (dbx - cf.bx).norm() + (dbv - cf.bv).norm());
    }
  }
  push(out, "bracket-finite-difference", worst < 1e-6, fmt_err(worst));
}

void check_ltilde_fd(std::vector<ValidationCheck>& out) {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 1.0);
  SnsSolver solver(cfg, forcing);
  LowModeOps ops(forcing, cfg.nu);
  NoiseStream rng(17, 0);
  const SpectralVelocity u = random_field(cfg.kmax, 31, 0.4);
  const Vec2 x(1.1, 2.3);
  const Vec2 v(std::cos(0.7), std::sin(0.7));

  LowModeVector h;
  h.hu = Eigen::VectorXd(ops.m());
  for (int i = 0; i < ops.m(); ++i) h.hu[i] = rng.gaussian();
  h.hx = Vec2(rng.gaussian(), rng.gaussian());
  h.hv = Vec2(-v[1], v[0]) * rng.gaussian();

  const LowModeVector lt = ops.ltilde_apply(u, x, v, h);

  // FD of the low-mode drift along (hu, hx, hv)
  const double delta = 1e-6;
  auto drift = [&](double sgn) {
    SpectralVelocity up = u;
    for (int i = 0; i < ops.m(); ++i)
      up.add_coeff(forcing.modes()[i], sgn * delta * h.hu[i]);
    const Vec2 xp = x + sgn * delta * h.hx;
    const Vec2 vp = v + sgn * delta * h.hv;
    LowModeVector d;
    const SpectralVelocity b = solver.nonlinear_term(up);
    d.hu = Eigen::VectorXd(ops.m());
    for (int i = 0; i < ops.m(); ++i) {
      const WaveVector k = forcing.modes()[i];
      d.hu[i] = -cfg.nu * k.norm2() * up.coeff(k) + b.coeff(k);
    }
    d.hx = eval_velocity(up, xp);
    const Mat2 du = eval_velocity_gradient(up, xp);
    d.hv = projective_drift(du, vp);
    return d;
  };
  const LowModeVector dp = drift(1.0);
  const LowModeVector dm = drift(-1.0);
  Eigen::VectorXd fd_hu = (dp.hu - dm.hu) / (2.0 * delta);
  Vec2 fd_hx = (dp.hx - dm.hx) / (2.0 * delta);
  Vec2 fd_hv = (dp.hv - dm.hv) / (2.0 * delta);
  fd_hv -= v * (v.dot(fd_hv));  // re-project as the operator does

  const double scale = std::sqrt(lt.hu.squaredNorm() + lt.hx.squaredNorm() +
                                 lt.hv.squaredNorm());
  const double err = std::sqrt((fd_hu - lt.hu).squaredNorm() +
                               (fd_hx - lt.hx).squaredNorm() +
                               (fd_hv - lt.hv).squaredNorm()) /
                     std::max(scale, 1e-12);
  push(out, "generator-finite-difference", err < 1e-5, fmt_err(err));
}

void check_jacobian_fd(std::vector<ValidationCheck>& out) {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 0.5);
  const uint64_t seed = 21, stream = 1;
  LagrangianStepper s(cfg, forcing, NoiseStream(seed, stream), Vec2(2.0, 0.4),
                      Vec2(0.6, 0.8));
  s.burn_in(1.0);
  const SnsState base_state = s.state();
  const ParticleState base_p = s.particle();
  const uint64_t ctr = s.rng().counter();
  const int nsteps = 100;
  TrajectoryRecord rec = record_trajectory(s, nsteps);

  NoiseStream hrng(seed, 99);
  FullTangent h = random_unit_tangent(cfg.kmax, base_p.v, hrng);
  SnsSolver solver(cfg, forcing);
  const FullTangent jh = jacobian_apply(rec, solver, 0.0, nsteps * cfg.dt, h);

  const double delta = 1e-6;
  LagrangianStepper sp(cfg, forcing, NoiseStream(seed, stream, ctr), base_p.x, base_p.v);
  sp.state() = base_state;
  sp.state().u.axpy(delta, h.hu);
  sp.particle().x = base_p.x + delta * h.hx;
  Vec2 vp = base_p.v + delta * h.hv;
  sp.particle().v = vp / vp.norm();
  for (int i = 0; i < nsteps; ++i) sp.step();

  FullTangent fd;
  fd.hu = sp.state().u;
  fd.hu.axpy(-1.0, rec.u.back());
  fd.hu.scale(1.0 / delta);
  for (int c = 0; c < 2; ++c) {
    double d = sp.particle().x[c] - rec.x.back()[c];
    d = std::remainder(d, kTwoPi);
    fd.hx[c] = d / delta;
  }
  fd.hv = (sp.particle().v - rec.v.back()) / delta;
  fd.hv -= rec.v.back() * (rec.v.back().dot(fd.hv));

  FullTangent diff = fd;
  diff.hu.axpy(-1.0, jh.hu);
  diff.hx -= jh.hx;
  diff.hv -= jh.hv;
  const double err = tangent_norm(diff) / tangent_norm(jh);
  push(out, "jacobian-variational-oracle", err < 1e-4, fmt_err(err));
}

void check_control_matching(std::vector<ValidationCheck>& out) {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 1.0);
  LagrangianStepper s(cfg, forcing, NoiseStream(29, 1), Vec2(0.2, 5.1), Vec2(1.0, 0.0));
  s.burn_in(1.0);
  TrajectoryRecord rec = record_trajectory(s, 150);
  LowModeOps ops(forcing, cfg.nu);
  MalliavinPipeline pipe(rec, s.solver(), ops, 0.05, 0.15, /*coupling=*/false);
  NoiseStream hrng(29, 7);
  const FullTangent h = random_unit_tangent(cfg.kmax, rec.v[0], hrng);
  const ResidualReport rep = pipe.residual(h);
  const double err = std::max(rep.matching_residual, rep.rho_low);
  push(out, "control-matching-decoupled", err < 1e-8, fmt_err(err));
}

}  // namespace

std::vector<ValidationCheck> run_validation_suite() {
  std::vector<ValidationCheck> out;
  check_gamma(out);
  check_basis_pair(out);
  check_roundtrip(out);
  check_shear_decay(out);
  check_energy_neutrality(out);
  check_det_tangent(out);
  check_inverse_propagator(out);
  check_spanning(out);
  check_bracket_fd(out);
  check_ltilde_fd(out);
  check_jacobian_fd(out);
  check_control_matching(out);
  return out;
}

}  // namespace lcl
