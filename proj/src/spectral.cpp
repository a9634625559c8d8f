#include "lcl/spectral.hpp"

#include <cassert>
#include <cmath>

namespace lcl {

namespace {

// Stack trig tables for one evaluation point: cos/sin of n*x1 and n*x2,
// n = 0..kmax.  sin(k.x) and cos(k.x) for signed k follow from the angle
// sum; negative first components flip the sign of the sine table entry.
constexpr int kMaxTable = 256;

struct TrigTable {
  double c1[kMaxTable], s1[kMaxTable], c2[kMaxTable], s2[kMaxTable];

  TrigTable(int kmax, const Vec2& x) {
    assert(kmax + 1 <= kMaxTable);
    for (int n = 0; n <= kmax; ++n) {
      c1[n] = std::cos(n * x[0]);
      s1[n] = std::sin(n * x[0]);
      c2[n] = std::cos(n * x[1]);
      s2[n] = std::sin(n * x[1]);
    }
  }

  // sin and cos of (k1*x1 + k2*x2) with k2 >= 0 required by the caller.
  inline void sincos(int k1, int k2, double& s, double& c) const {
    const int a1 = k1 < 0 ? -k1 : k1;
    const double sg = k1 < 0 ? -1.0 : 1.0;
    const double sa = sg * s1[a1], ca = c1[a1];
    s = sa * c2[k2] + ca * s2[k2];
    c = ca * c2[k2] - sa * s2[k2];
  }
};

}  // namespace

SpectralVelocity::SpectralVelocity(int kmax) : kmax_(kmax) {
  if (kmax < 1) throw ConfigError("SpectralVelocity: kmax must be >= 1");
  a_.assign(side() * side(), 0.0);
}

void SpectralVelocity::set_coeff(WaveVector k, double v) {
  if (!contains(k)) throw std::invalid_argument("set_coeff: mode outside truncation");
  a_[index(k)] = v;
}

void SpectralVelocity::add_coeff(WaveVector k, double v) {
  if (!contains(k)) throw std::invalid_argument("add_coeff: mode outside truncation");
  a_[index(k)] += v;
}

void SpectralVelocity::axpy(double s, const SpectralVelocity& other) {
  assert(other.kmax_ == kmax_);
  const size_t n = a_.size();
  for (size_t i = 0; i < n; ++i) a_[i] += s * other.a_[i];
}

void SpectralVelocity::scale(double s) {
  for (double& v : a_) v *= s;
}

void SpectralVelocity::set_zero() {
  for (double& v : a_) v = 0.0;
}

// The mode loop below runs over k2 >= 0 only: the pair (k1,k2) and
// (-k1,-k2) is handled together so the trig table is consulted once.
// For k with k2 > 0 (or k2 = 0, k1 > 0): e_k = sin, e_{-k} = cos, and
// grad e_k = k e_{-k}, grad e_{-k} = k e_k (note the sign in -k).
void eval_jet(const SpectralVelocity& u, const Vec2& x, FieldJet& jet,
              bool with_hessian) {
  const int kmax = u.kmax();
  TrigTable t(kmax, x);

  Vec2 val = Vec2::Zero();
  Mat2 grad = Mat2::Zero();
  Hessian2 hess = {Mat2::Zero(), Mat2::Zero()};
  const std::vector<double>& a = u.raw();
  const int side = u.side();

  for (int k2 = 0; k2 <= kmax; ++k2) {
    const int k1lo = (k2 == 0) ? 1 : -kmax;
    for (int k1 = k1lo; k1 <= kmax; ++k1) {
      // (k1,k2) is in the positive class here
      const double ap = a[(k1 + kmax) * side + (k2 + kmax)];
      const double am = a[(-k1 + kmax) * side + (-k2 + kmax)];
      if (ap == 0.0 && am == 0.0) continue;
      double s, c;
      t.sincos(k1, k2, s, c);
      const double n2 = double(k1) * k1 + double(k2) * k2;
      const double g1 = k2 / n2, g2 = -k1 / n2;  // gamma_k
      // contribution of a_k gamma_k sin + a_{-k} (-gamma_k) cos
      const double w = ap * s - am * c;   // field weight along gamma_k
      const double dw = ap * c + am * s;  // derivative weight (e_k' = e_{-k})
      val[0] += g1 * w;
      val[1] += g2 * w;
      grad(0, 0) += g1 * k1 * dw;
      grad(0, 1) += g1 * k2 * dw;
      grad(1, 0) += g2 * k1 * dw;
      grad(1, 1) += g2 * k2 * dw;
      if (with_hessian) {
        // d_j d_l e_k = -k_j k_l e_k, so the weight is -w again
        const double h11 = -double(k1) * k1 * w, h12 = -double(k1) * k2 * w,
                     h22 = -double(k2) * k2 * w;
        hess[0](0, 0) += g1 * h11;
        hess[0](0, 1) += g1 * h12;
        hess[0](1, 0) += g1 * h12;
        hess[0](1, 1) += g1 * h22;
        hess[1](0, 0) += g2 * h11;
        hess[1](0, 1) += g2 * h12;
        hess[1](1, 0) += g2 * h12;
        hess[1](1, 1) += g2 * h22;
      }
    }
  }
  jet.u = val;
  jet.du = grad;
  if (with_hessian) jet.d2u = hess;
}

Vec2 eval_velocity(const SpectralVelocity& u, const Vec2& x) {
  FieldJet jet;
  eval_jet(u, x, jet, false);
  return jet.u;
}

Mat2 eval_velocity_gradient(const SpectralVelocity& u, const Vec2& x) {
  FieldJet jet;
  eval_jet(u, x, jet, false);
  return jet.du;
}

Hessian2 eval_velocity_hessian(const SpectralVelocity& u, const Vec2& x) {
  FieldJet jet;
  eval_jet(u, x, jet, true);
  return jet.d2u;
}

Vec2 hessian_apply(const Hessian2& h, const Vec2& hx, const Vec2& v) {
  return {hx.dot(h[0] * v), hx.dot(h[1] * v)};
}

SpectralVelocity project_low(const SpectralVelocity& u, int nstar) {
  if (nstar < 1) throw ConfigError("project_low: nstar must be >= 1");
  SpectralVelocity out(u.kmax());
  const double r2 = double(nstar) * nstar;
  u.for_each([&](WaveVector k, double a) {
    if (a != 0.0 && k.norm2() <= r2) out.set_coeff(k, a);
  });
  return out;
}

SpectralVelocity project_high(const SpectralVelocity& u, int nstar) {
  if (nstar < 1) throw ConfigError("project_high: nstar must be >= 1");
  SpectralVelocity out(u.kmax());
  const double r2 = double(nstar) * nstar;
  u.for_each([&](WaveVector k, double a) {
    if (a != 0.0 && k.norm2() > r2) out.set_coeff(k, a);
  });
  return out;
}

double sobolev_norm(const SpectralVelocity& u, int n) {
  if (n < 0) throw std::invalid_argument("sobolev_norm: n must be >= 0");
  double sum = 0.0;
  u.for_each([&](WaveVector k, double a) {
    if (a == 0.0) return;
    sum += std::pow(k.norm2(), n) * a * a;
  });
  return std::sqrt(sum);
}

double proxy_dot(const SpectralVelocity& a, const SpectralVelocity& b) {
  assert(a.kmax() == b.kmax());
  double sum = 0.0;
  const auto& ra = a.raw();
  const auto& rb = b.raw();
  for (size_t i = 0; i < ra.size(); ++i) sum += ra[i] * rb[i];
  return sum;
}

}  // namespace lcl
