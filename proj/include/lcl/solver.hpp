#pragma once

#include <memory>

#include "lcl/forcing.hpp"
#include "lcl/noise.hpp"
#include "lcl/transforms.hpp"

namespace lcl {

/// Pseudo-spectral discretization parameters for the velocity equation.
struct SolverConfig {
  double nu = 0.05;        // viscosity
  double dt = 1e-3;        // time step
  int kmax = 21;           // Galerkin truncation (|k|_inf)
  int gridsize = 64;       // physical grid for quadratic products
  double dealias = 2.0 / 3.0;
  bool enable_nonlinear = true;  // test hook: disable the advection term
  int flow_substeps = 1;         // particle RK4 substeps per velocity step

  void validate() const;
};

/// Velocity state: spectral field plus simulation time.
struct SnsState {
  SpectralVelocity u;
  double t = 0.0;
};

/// Time integrator for the stochastically forced velocity field.
///
/// Each step applies one exponential (integrating-factor) Euler-Maruyama
/// update per coefficient:
///   a_k <- exp(-nu |k|^2 dt) (a_k + dt b_k) + q_k sigma_k xi_k
/// with b the spectral advection term and sigma_k^2 the exact
/// Ornstein-Uhlenbeck step variance (1 - exp(-2 nu |k|^2 dt)) / (2 nu |k|^2),
/// so the linear+noise subsystem is sampled with no discretization error.
/// Noise enters only on the forced set 0 < |k| <= nstar.
class SnsSolver {
 public:
  SnsSolver(const SolverConfig& cfg, const ForcingSpec& forcing);

  const SolverConfig& config() const { return cfg_; }
  const ForcingSpec& forcing() const { return forcing_; }
  SpectralWorkspace& workspace() { return *ws_; }

  /// -Leray((u . grad) u), dealiased; energy-neutral in the proxy pairing.
  SpectralVelocity nonlinear_term(const SpectralVelocity& u);

  /// Advance one step in place, drawing noise from rng.
  void step(SnsState& state, NoiseStream& rng);

  /// Advance floor(T_burn/dt + 1/2) steps; the result is treated as a
  /// sample from the quasi-stationary regime.
  void burn_in(SnsState& state, NoiseStream& rng, double t_burn);

  /// Derivative of the discrete velocity update at u, applied to a
  /// tangent field h (same truncation):
  ///   h <- exp(-nu |k|^2 dt) (h + dt D b(u)[h]).
  /// The additive noise has no state dependence and drops out.
  void step_velocity_tangent(const SpectralVelocity& u, SpectralVelocity& h);

  /// D b(u)[h] = -Leray(B(h,u) + B(u,h)) with the solver's dealiasing.
  SpectralVelocity advection_derivative(const SpectralVelocity& u,
                                        const SpectralVelocity& h);

 private:
  SolverConfig cfg_;
  ForcingSpec forcing_;
  std::shared_ptr<SpectralWorkspace> ws_;
  std::vector<double> exp_factor_;    // exp(-nu|k|^2 dt) per flat index
  std::vector<double> noise_scale_;   // q_k sigma_k per forced mode
};

/// Squared proxy norms: energy = ||u||_0^2, enstrophy = ||u||_1^2.
double energy(const SpectralVelocity& u);
double enstrophy(const SpectralVelocity& u);

}  // namespace lcl
