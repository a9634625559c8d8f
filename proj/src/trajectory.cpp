#include "lcl/trajectory.hpp"

#include <cmath>

namespace lcl {

LagrangianStepper::LagrangianStepper(const SolverConfig& cfg, const ForcingSpec& forcing,
                                     NoiseStream rng, const Vec2& x0, const Vec2& v0)
    : solver_(cfg, forcing), rng_(rng) {
  state_.u = SpectralVelocity(cfg.kmax);
  state_.t = 0.0;
  particle_.x = wrap_torus(x0);
  const double n = v0.norm();
  if (n <= 0.0) throw ConfigError("LagrangianStepper: zero initial direction");
  particle_.v = v0 / n;
}

void LagrangianStepper::step(std::span<Mat2* const> extra_tangents,
                             std::span<Vec2* const> extra_directions) {
  const SolverConfig& cfg = solver_.config();
  SpectralFlowField field(state_.u);
  const double h = cfg.dt / cfg.flow_substeps;
  for (int i = 0; i < cfg.flow_substeps; ++i) {
    ManifoldSubstep s = manifold_substep(field, particle_.x, particle_.v, h, false);
    tangent_.a = tangent_through(s, tangent_.a);
    for (Mat2* a : extra_tangents) *a = tangent_through(s, *a);
    for (Vec2* v : extra_directions) *v = direction_through(s, *v);
    particle_.x = s.x_out;
    particle_.v = s.v_out;
  }
  solver_.step(state_, rng_);
}

double LagrangianStepper::projective_rate(const Vec2& v) const {
  const Mat2 du = eval_velocity_gradient(state_.u, particle_.x);
  return v.dot(du * v);
}

void LagrangianStepper::burn_in(double t_burn) {
  if (t_burn < 0.0) throw ConfigError("burn_in: negative horizon");
  const long n = std::lround(t_burn / dt());
  for (long i = 0; i < n; ++i) step();
}

int TrajectoryRecord::node(double t_rel) const {
  const double r = t_rel / cfg.dt;
  const int i = int(std::lround(r));
  if (std::abs(r - i) > 1e-9 || i < 0 || i > steps())
    throw ConfigError("TrajectoryRecord: time does not land on a stored node");
  return i;
}

TrajectoryRecord record_trajectory(LagrangianStepper& s, int nsteps) {
  TrajectoryRecord rec;
  rec.cfg = s.solver().config();
  rec.forcing = s.solver().forcing();
  rec.t0 = s.state().t;
  rec.u.reserve(nsteps + 1);
  rec.x.reserve(nsteps + 1);
  rec.v.reserve(nsteps + 1);
  rec.u.push_back(s.state().u);
  rec.x.push_back(s.particle().x);
  rec.v.push_back(s.particle().v);
  for (int i = 0; i < nsteps; ++i) {
    s.step();
    rec.u.push_back(s.state().u);
    rec.x.push_back(s.particle().x);
    rec.v.push_back(s.particle().v);
  }
  return rec;
}

}  // namespace lcl
