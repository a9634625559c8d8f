#pragma once

#include <span>

#include "lcl/flow.hpp"
#include "lcl/solver.hpp"

namespace lcl {

/// Coupled velocity + particle + tangent + projective stepper.
///
/// Per step: the manifold variables advance by RK4 with the velocity
/// frozen over [t, t+dt] (the velocity is only defined at step resolution
/// anyway), then the velocity takes its stochastic update.  Extra tangent
/// matrices or directions ride the same RK4 stages, so ensemble
/// estimators stay consistent with the canonical state.
class LagrangianStepper {
 public:
  LagrangianStepper(const SolverConfig& cfg, const ForcingSpec& forcing,
                    NoiseStream rng, const Vec2& x0 = Vec2::Zero(),
                    const Vec2& v0 = Vec2(1.0, 0.0));

  void step(std::span<Mat2* const> extra_tangents = {},
            std::span<Vec2* const> extra_directions = {});

  const SnsState& state() const { return state_; }
  SnsState& state() { return state_; }
  const ParticleState& particle() const { return particle_; }
  ParticleState& particle() { return particle_; }
  const TangentMatrix& tangent() const { return tangent_; }
  TangentMatrix& tangent() { return tangent_; }
  NoiseStream& rng() { return rng_; }
  SnsSolver& solver() { return solver_; }
  double dt() const { return solver_.config().dt; }

  /// <v, Du(x) v> at the current state (projective growth rate).
  double projective_rate(const Vec2& v) const;

  /// Let the velocity field relax toward its statistical steady state;
  /// the manifold variables are advected along.
  void burn_in(double t_burn);

 private:
  SnsSolver solver_;
  SnsState state_;
  ParticleState particle_;
  TangentMatrix tangent_;
  NoiseStream rng_;
};

/// A stored window of the coupled trajectory: velocity at every step
/// start plus the manifold path, enough to replay any linearized
/// transport along it. Node i is time t0 + i dt; u[i] drives step i.
struct TrajectoryRecord {
  SolverConfig cfg;
  ForcingSpec forcing;
  double t0 = 0.0;
  std::vector<SpectralVelocity> u;  // size steps+1
  std::vector<Vec2> x, v;           // size steps+1

  int steps() const { return int(u.size()) - 1; }
  double dt() const { return cfg.dt; }
  double time_at(int i) const { return t0 + i * cfg.dt; }

  /// Node index for a time offset from t0; must land on a node.
  int node(double t_rel) const;
};

/// Advance the stepper nsteps, recording the window.
TrajectoryRecord record_trajectory(LagrangianStepper& s, int nsteps);

}  // namespace lcl
