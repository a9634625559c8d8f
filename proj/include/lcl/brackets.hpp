#pragma once

#include <Eigen/Dense>

#include "lcl/forcing.hpp"
#include "lcl/spectral.hpp"

namespace lcl {

/// Element of T_x T^2 x T_v S^1: a position block and a direction block
/// constrained tangent to v (<v, bv> = 0).
struct BundleVector {
  Vec2 bx = Vec2::Zero();
  Vec2 bv = Vec2::Zero();
};

/// Low-mode vector field value: coefficients over the forced set plus a
/// bundle part.
struct LowModeField {
  Eigen::VectorXd fu;  // over forcing.modes()
  BundleVector fxv;
};

/// Manifold drift restricted to the forced modes, evaluated at (x, v):
///   bx = sum_k a_k e_k(x) gamma_k           (the low-mode velocity at x)
///   bv = sum_k a_k (k.v) e_{-k}(x) Pi_v gamma_k   (the projective drift)
/// The coefficient normalization is pinned by the identities
/// bx == eval_velocity(project_low(u), x) and bv == Pi_v Du_low(x) v.
BundleVector fbar_eval(const SpectralVelocity& u, const ForcingSpec& forcing,
                       const Vec2& x, const Vec2& v);

/// Closed-form bracket of the constant field gamma_k e_k (velocity block)
/// with the manifold drift:
///   [e_k gamma_k, Fbar](x, v) = (e_k(x) gamma_k, (k.v) e_{-k}(x) Pi_v gamma_k).
BundleVector bracket_ek_fbar(const Vec2& x, const Vec2& v, WaveVector k);

/// Numerical rank (singular values > tol * sigma_max) of the 3 x |K|
/// matrix of bracket directions (bx, <bv, v_perp>) in an orthonormal
/// tangent frame at (x, v).
int spanning_rank(const Vec2& x, const Vec2& v, const std::vector<WaveVector>& K,
                  double tol = 1e-8);

/// First-bracket field Upsilon_l Q^k at the state (u, x, v): the
/// dissipation and advection brackets on the velocity block plus the
/// manifold bracket, scaled by q_k.  Equals minus the low-mode generator
/// applied to Q^k, which the short-time drift of S_t Q^k verifies.
LowModeField upsilon_q(const SpectralVelocity& u, const ForcingSpec& forcing,
                       const Vec2& x, const Vec2& v, WaveVector k, double nu);

/// Empirical certificate for the bracket lower bound: for each unit
/// sample h^l, the max of |<Q^k, h>| and |<Upsilon_l Q^k, h>| over the
/// forced set; reports the minimum over samples.
struct LowerBoundReport {
  double min_pairing = 0.0;     // empirical minimum over samples
  double mean_pairing = 0.0;
  int samples = 0;
  bool strictly_positive = false;
};

LowerBoundReport lower_bound_check(const SpectralVelocity& u, const ForcingSpec& forcing,
                                   const Vec2& x, const Vec2& v, double nu,
                                   int samples, uint64_t seed);

}  // namespace lcl
