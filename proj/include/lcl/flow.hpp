#pragma once

#include "lcl/spectral.hpp"

namespace lcl {

/// Minimal field interface for the manifold dynamics.  The production
/// implementation evaluates a spectral velocity exactly; synthetic fields
/// (uniform flow, constant gradient) drive the closed-form tests.
class FlowField {
 public:
  virtual ~FlowField() = default;
  virtual void jet(const Vec2& x, FieldJet& out, bool with_hessian) const = 0;
};

class SpectralFlowField final : public FlowField {
 public:
  explicit SpectralFlowField(const SpectralVelocity& u) : u_(&u) {}
  void jet(const Vec2& x, FieldJet& out, bool with_hessian) const override {
    eval_jet(*u_, x, out, with_hessian);
  }

 private:
  const SpectralVelocity* u_;
};

/// u(x) = c everywhere; Du = 0.
class UniformFlowField final : public FlowField {
 public:
  explicit UniformFlowField(const Vec2& c) : c_(c) {}
  void jet(const Vec2&, FieldJet& out, bool) const override {
    out.u = c_;
    out.du = Mat2::Zero();
    out.d2u = {Mat2::Zero(), Mat2::Zero()};
  }

 private:
  Vec2 c_;
};

/// u(x) = G x; Du = G everywhere (synthetic constant-gradient cocycle).
class LinearFlowField final : public FlowField {
 public:
  explicit LinearFlowField(const Mat2& g) : g_(g) {}
  void jet(const Vec2& x, FieldJet& out, bool) const override {
    out.u = g_ * x;
    out.du = g_;
    out.d2u = {Mat2::Zero(), Mat2::Zero()};
  }

 private:
  Mat2 g_;
};

/// Particle position on the torus plus projective direction on S^1.
struct ParticleState {
  Vec2 x = Vec2::Zero();
  Vec2 v = Vec2(1.0, 0.0);  // |v| = 1, renormalized every step
};

/// Derivative cocycle A_t = D_x x_t; det A = 1 along incompressible flow.
struct TangentMatrix {
  Mat2 a = Mat2::Identity();
};

/// Projective drift G(u,x,v) = (I - v v^T) Du(x) v, defined for any v in
/// R^2 by the same formula (stages of the integrator leave the sphere by
/// O(h^2); the step ends with a renormalization).
Vec2 projective_drift(const Mat2& du, const Vec2& v);

/// Full derivative of v -> projective_drift(du, v) applied to h (no
/// tangential projection; the renormalization derivative handles that).
Vec2 projective_drift_dv(const Mat2& du, const Vec2& v, const Vec2& h);

/// One RK4 substep of the coupled manifold system with the field frozen:
/// stage states, field jets, and the raw (pre-renormalization) outputs.
/// Kept so linearized transports can replay the exact same stages.
struct ManifoldSubstep {
  double h = 0.0;
  Vec2 x[4];
  Vec2 v[4];
  FieldJet jet[4];
  Vec2 kx[4];  // stage dx/dt
  Vec2 kv[4];  // stage dv/dt
  Vec2 x_out;  // wrapped
  Vec2 v_raw;  // before renormalization
  double v_len = 1.0;
  Vec2 v_out;  // v_raw / v_len
};

ManifoldSubstep manifold_substep(const FlowField& f, const Vec2& x0, const Vec2& v0,
                                 double h, bool with_hessian);

/// Transport the tangent matrix through a recorded substep (A' = Du(x_t) A).
Mat2 tangent_through(const ManifoldSubstep& s, const Mat2& a);

/// Transport a projective direction through a recorded substep (the stage
/// positions do not depend on v, so any direction can ride them).
Vec2 direction_through(const ManifoldSubstep& s, const Vec2& v0);

/// Jet of a perturbation field at a stage point (value and gradient).
struct PerturbationJet {
  Vec2 val = Vec2::Zero();
  Mat2 grad = Mat2::Zero();
};

/// Exact linearization of one manifold substep.  (hx, hv) is transported
/// through the recorded stages; field_jet, when non-null, supplies the
/// perturbation-field jet at stage i (the hu coupling).  The output hv is
/// the derivative of the renormalized v, hence tangent to s.v_out.
void variational_substep(const ManifoldSubstep& s,
                         const PerturbationJet* field_jets,  // [4] or nullptr
                         Vec2& hx, Vec2& hv);

/// One RK4 substep of the position ODE x' = u(x), field frozen, wrapped.
Vec2 advect(const Vec2& x, const FlowField& f, double dt, int substeps = 1);

/// RK4 on A' = Du(x_t) A along the same substep positions as advect.
Mat2 step_tangent(const Mat2& a, const FlowField& f, const Vec2& x, double dt,
                  int substeps = 1);

/// RK4 on v' = (I - v v^T) Du(x_t) v followed by renormalization.
Vec2 step_projective(const Vec2& v, const FlowField& f, const Vec2& x, double dt,
                     int substeps = 1);

/// Advance position, direction, and tangent matrix together (one field
/// evaluation per stage); the canonical per-step update of the extended
/// system.  Extra tangent matrices and directions ride the same stages.
struct ManifoldStep {
  Vec2 x;
  Vec2 v;
  Mat2 a;
};
ManifoldStep step_all(const FlowField& f, const Vec2& x, const Vec2& v, const Mat2& a,
                      double dt, int substeps = 1);

}  // namespace lcl
