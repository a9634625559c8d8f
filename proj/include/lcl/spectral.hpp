#pragma once

#include <array>
#include <vector>

#include "lcl/types.hpp"
#include "lcl/wavevector.hpp"

namespace lcl {

/// Hessian of a 2-vector field at a point: hess[i](j,l) = d_j d_l u_i.
using Hessian2 = std::array<Mat2, 2>;

/// Velocity and gradient (optionally Hessian) of a field at one point.
struct FieldJet {
  Vec2 u = Vec2::Zero();
  Mat2 du = Mat2::Zero();
  Hessian2 d2u = {Mat2::Zero(), Mat2::Zero()};
};

/// Divergence-free mean-zero velocity field on the torus, stored as real
/// coefficients a_k of u = sum_k a_k gamma_k e_k over 0 < |k|_inf <= kmax.
///
/// The basis is divergence-free mode by mode (k . gamma_k = 0) and has no
/// k = 0 entry, so every representable field is automatically solenoidal
/// with zero mean.  Values are immutable after construction in spirit:
/// all operations return new fields, so sharing across threads is safe.
class SpectralVelocity {
 public:
  SpectralVelocity() = default;
  explicit SpectralVelocity(int kmax);

  int kmax() const { return kmax_; }
  int side() const { return 2 * kmax_ + 1; }

  bool contains(WaveVector k) const {
    return !k.is_zero() && k.norm_inf() <= kmax_;
  }

  /// Flat index into the dense coefficient array; requires contains(k).
  int index(WaveVector k) const {
    return (k.k1 + kmax_) * side() + (k.k2 + kmax_);
  }

  double coeff(WaveVector k) const {
    return contains(k) ? a_[index(k)] : 0.0;
  }
  void set_coeff(WaveVector k, double v);
  void add_coeff(WaveVector k, double v);

  const std::vector<double>& raw() const { return a_; }
  std::vector<double>& raw() { return a_; }

  /// In-place this += s * other (matching kmax required).
  void axpy(double s, const SpectralVelocity& other);
  void scale(double s);
  void set_zero();

  /// Visit every stored mode: f(WaveVector, coefficient).
  template <class F>
  void for_each(F&& f) const {
    for (int k1 = -kmax_; k1 <= kmax_; ++k1)
      for (int k2 = -kmax_; k2 <= kmax_; ++k2) {
        if (k1 == 0 && k2 == 0) continue;
        f(WaveVector{k1, k2}, a_[(k1 + kmax_) * side() + (k2 + kmax_)]);
      }
  }

 private:
  int kmax_ = 0;
  std::vector<double> a_;  // dense, (2kmax+1)^2, slot at k=0 unused
};

/// Exact trigonometric evaluation of u(x); no interpolation.
Vec2 eval_velocity(const SpectralVelocity& u, const Vec2& x);

/// Exact gradient Du(x); trace-free by construction (k . gamma_k = 0).
Mat2 eval_velocity_gradient(const SpectralVelocity& u, const Vec2& x);

/// Exact Hessian D2u(x); d_j d_l e_k = -k_j k_l e_k.
Hessian2 eval_velocity_hessian(const SpectralVelocity& u, const Vec2& x);

/// One-pass evaluation of u, Du (and D2u when with_hessian) at x.
void eval_jet(const SpectralVelocity& u, const Vec2& x, FieldJet& jet,
              bool with_hessian = false);

/// Contraction (D2u(x) . hx) applied to v: component i = hx^T H_i v.
Vec2 hessian_apply(const Hessian2& h, const Vec2& hx, const Vec2& v);

/// Coefficient-wise restriction to Euclidean |k| <= nstar (resp. > nstar).
/// project_low(u) + project_high(u) == u exactly.
SpectralVelocity project_low(const SpectralVelocity& u, int nstar);
SpectralVelocity project_high(const SpectralVelocity& u, int nstar);

/// Coefficient-convention Sobolev norm (sum_k |k|^{2n} a_k^2)^{1/2}.
/// n = 0 is the L2-proxy norm used by the energy diagnostics.
double sobolev_norm(const SpectralVelocity& u, int n);

/// Coefficient dot product sum_k a_k b_k (the L2-proxy pairing).
double proxy_dot(const SpectralVelocity& a, const SpectralVelocity& b);

}  // namespace lcl
