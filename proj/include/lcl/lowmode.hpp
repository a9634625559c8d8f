#pragma once

#include <Eigen/Dense>

#include "lcl/trajectory.hpp"
#include "lcl/transforms.hpp"

namespace lcl {

/// Tangent vector of the low-mode subsystem: velocity coefficients over
/// the forced set plus the manifold blocks, with hv constrained tangent
/// to the reference direction (<v, hv> = 0, re-projected on construction).
struct LowModeVector {
  Eigen::VectorXd hu;  // over forcing.modes()
  Vec2 hx = Vec2::Zero();
  Vec2 hv = Vec2::Zero();
};

/// Dense low-mode propagator on the (m+4)-dimensional embedding
/// [hu | hx | hv], hv in R^2.  The direction normal to v is carried as an
/// isometric placeholder so the matrix stays invertible; diagnostics and
/// inversions act on the (m+3)-dimensional tangent subspace.
struct LowModePropagator {
  Eigen::MatrixXd mat;
  double s = 0.0, t = 0.0;  // times relative to the record start
  char kind = 'R';          // 'R' forward, 'S' inverse
};

/// Operator algebra of the low-mode subsystem for a fixed forcing set and
/// viscosity: the generator, its exact one-step discrete transition, and
/// the embedding bookkeeping.  Owns the small-grid coupling table; not
/// thread-safe, one instance per worker.
class LowModeOps {
 public:
  LowModeOps(const ForcingSpec& forcing, double nu);

  const ForcingSpec& forcing() const { return forcing_; }
  double nu() const { return nu_; }
  int m() const { return forcing_.mode_count(); }
  int dim() const { return m() + 4; }

  Eigen::VectorXd pack(const LowModeVector& h) const;
  LowModeVector unpack(const Eigen::VectorXd& z, const Vec2& v) const;

  /// Velocity block of z as a spectral field with the given truncation.
  SpectralVelocity field_of(const Eigen::VectorXd& z, int kmax) const;

  /// Orthonormal basis of the tangent subspace at direction v:
  /// (m+4) x (m+3), spanning {hv perpendicular to nothing but v}.
  Eigen::MatrixXd tangent_basis(const Vec2& v) const;

  /// The diffusion embedding: columns q_k on the velocity block.
  /// apply_Q(g) = (diag(q) g; 0; 0).
  Eigen::VectorXd apply_Q(const Eigen::VectorXd& g) const;
  Eigen::VectorXd apply_Qt(const Eigen::VectorXd& z) const;

  /// Generator of the low-mode linearized dynamics at state (u, x, v):
  ///   velocity block: -nu |k|^2 hu - Pi_l(B(hu,u) + B(u,hu))
  ///   position block: Du(x) hx + hu(x)
  ///   direction block: derivative of (u,x,v) -> Pi_v Du(x) v along
  ///     (hu, hx, hv), re-projected tangent to v.
  LowModeVector ltilde_apply(const SpectralVelocity& u, const Vec2& x, const Vec2& v,
                             const LowModeVector& h);

  /// Coupling matrix C(u): column j holds the forced-set coefficients of
  /// -Leray(B(phi_j, u) + B(u, phi_j)).  u is truncated internally to the
  /// band that can contribute.
  void advection_coupling(const SpectralVelocity& u, Eigen::MatrixXd& out);

  /// Exact linearization of one coupled step with the velocity frozen and
  /// the high-band coupling dropped: manifold blocks ride the recorded
  /// RK4 substeps, the velocity block takes the integrating-factor update
  /// exp(-nu|k|^2 dt)(I + dt C(u)).  x_out/v_out, when non-null, receive
  /// the transported forward state.
  Eigen::MatrixXd step_matrix(const SolverConfig& cfg, const SpectralVelocity& u,
                              const Vec2& x, const Vec2& v, Vec2* x_out = nullptr,
                              Vec2* v_out = nullptr);

 private:
  ForcingSpec forcing_;
  double nu_;
  AdvectionCouplingTable table_;
  Eigen::MatrixXd coupling_;  // scratch
  std::vector<double> lam_;   // nu |k|^2 per forced mode
};

/// Forward/inverse propagators at every sub-node of a record window
/// [i0, i1] (node spacing dt/refine), with R S = Id by construction:
/// S accumulates the exact per-step matrix inverses.
class PropagatorPath {
 public:
  PropagatorPath(const TrajectoryRecord& rec, LowModeOps& ops, int i0, int i1,
                 int refine = 1);

  int nodes() const { return int(r_.size()); }  // (i1-i0)*refine + 1
  double dt_node() const { return dt_node_; }
  double time_of(int j) const { return t0_ + j * dt_node_; }
  const Eigen::MatrixXd& R(int j) const { return r_[j]; }
  const Eigen::MatrixXd& S(int j) const { return s_[j]; }
  /// Transition over sub-step j (R_{j+1} = T(j) R_j).
  const Eigen::MatrixXd& T(int j) const { return t_[j]; }
  const Vec2& v_at(int j) const { return v_[j]; }

 private:
  double t0_ = 0.0, dt_node_ = 0.0;
  std::vector<Eigen::MatrixXd> r_, s_, t_;
  std::vector<Vec2> v_;
};

/// Propagator over [s, t] (record-relative times): product of the exact
/// per-step transitions.  Raises a diagnostic when R is ill-conditioned
/// (condition number above 1e12 on the tangent subspace).
LowModePropagator evolve_R(const TrajectoryRecord& rec, LowModeOps& ops, double s,
                           double t);
LowModePropagator evolve_S(const TrajectoryRecord& rec, LowModeOps& ops, double s,
                           double t);

}  // namespace lcl
