#include "lcl/flow.hpp"

#include <cmath>

namespace lcl {

Vec2 projective_drift(const Mat2& du, const Vec2& v) {
  const Vec2 w = du * v;
  return w - v * (v.dot(w));
}

Vec2 projective_drift_dv(const Mat2& du, const Vec2& v, const Vec2& h) {
  const Vec2 mv = du * v;
  const Vec2 mh = du * h;
  return mh - h * (v.dot(mv)) - v * (h.dot(mv) + v.dot(mh));
}

ManifoldSubstep manifold_substep(const FlowField& f, const Vec2& x0, const Vec2& v0,
                                 double h, bool with_hessian) {
  static constexpr double c[4] = {0.0, 0.5, 0.5, 1.0};
  ManifoldSubstep s;
  s.h = h;
  for (int i = 0; i < 4; ++i) {
    if (i == 0) {
      s.x[i] = x0;
      s.v[i] = v0;
    } else {
      s.x[i] = x0 + (c[i] * h) * s.kx[i - 1];
      s.v[i] = v0 + (c[i] * h) * s.kv[i - 1];
    }
    f.jet(s.x[i], s.jet[i], with_hessian);
    s.kx[i] = s.jet[i].u;
    s.kv[i] = projective_drift(s.jet[i].du, s.v[i]);
  }
  const double w = h / 6.0;
  s.x_out = wrap_torus(x0 + w * (s.kx[0] + 2.0 * s.kx[1] + 2.0 * s.kx[2] + s.kx[3]));
  s.v_raw = v0 + w * (s.kv[0] + 2.0 * s.kv[1] + 2.0 * s.kv[2] + s.kv[3]);
  s.v_len = s.v_raw.norm();
  s.v_out = s.v_raw / s.v_len;
  return s;
}

Mat2 tangent_through(const ManifoldSubstep& s, const Mat2& a) {
  Mat2 k[4];
  k[0] = s.jet[0].du * a;
  k[1] = s.jet[1].du * (a + (0.5 * s.h) * k[0]);
  k[2] = s.jet[2].du * (a + (0.5 * s.h) * k[1]);
  k[3] = s.jet[3].du * (a + s.h * k[2]);
  return a + (s.h / 6.0) * (k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3]);
}

Vec2 direction_through(const ManifoldSubstep& s, const Vec2& v0) {
  static constexpr double c[4] = {0.0, 0.5, 0.5, 1.0};
  Vec2 k[4];
  for (int i = 0; i < 4; ++i) {
    const Vec2 vi = (i == 0) ? v0 : Vec2(v0 + (c[i] * s.h) * k[i - 1]);
    k[i] = projective_drift(s.jet[i].du, vi);
  }
  const Vec2 raw = v0 + (s.h / 6.0) * (k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3]);
  return raw / raw.norm();
}

void variational_substep(const ManifoldSubstep& s, const PerturbationJet* field_jets,
                         Vec2& hx, Vec2& hv) {
  static constexpr double c[4] = {0.0, 0.5, 0.5, 1.0};
  Vec2 kx[4], kv[4];
  for (int i = 0; i < 4; ++i) {
    Vec2 hxi = hx, hvi = hv;
    if (i > 0) {
      hxi += (c[i] * s.h) * kx[i - 1];
      hvi += (c[i] * s.h) * kv[i - 1];
    }
    const FieldJet& J = s.jet[i];
    kx[i] = J.du * hxi;
    kv[i] = projective_drift_dv(J.du, s.v[i], hvi);
    // x-variation of the drift through the Hessian
    Vec2 hxx = hessian_apply(J.d2u, hxi, s.v[i]);
    kv[i] += hxx - s.v[i] * (s.v[i].dot(hxx));
    if (field_jets) {
      const PerturbationJet& P = field_jets[i];
      kx[i] += P.val;
      const Vec2 pv = P.grad * s.v[i];
      kv[i] += pv - s.v[i] * (s.v[i].dot(pv));
    }
  }
  const double w = s.h / 6.0;
  hx += w * (kx[0] + 2.0 * kx[1] + 2.0 * kx[2] + kx[3]);
  Vec2 hv_raw = hv + w * (kv[0] + 2.0 * kv[1] + 2.0 * kv[2] + kv[3]);
  // derivative of v_raw -> v_raw/|v_raw| at the recorded output
  hv = (hv_raw - s.v_out * (s.v_out.dot(hv_raw))) / s.v_len;
}

Vec2 advect(const Vec2& x, const FlowField& f, double dt, int substeps) {
  Vec2 xc = x;
  const double h = dt / substeps;
  for (int i = 0; i < substeps; ++i)
    xc = manifold_substep(f, xc, Vec2(1.0, 0.0), h, false).x_out;
  return xc;
}

Mat2 step_tangent(const Mat2& a, const FlowField& f, const Vec2& x, double dt,
                  int substeps) {
  Vec2 xc = x;
  Mat2 ac = a;
  const double h = dt / substeps;
  for (int i = 0; i < substeps; ++i) {
    ManifoldSubstep s = manifold_substep(f, xc, Vec2(1.0, 0.0), h, false);
    ac = tangent_through(s, ac);
    xc = s.x_out;
  }
  return ac;
}

Vec2 step_projective(const Vec2& v, const FlowField& f, const Vec2& x, double dt,
                     int substeps) {
  Vec2 xc = x, vc = v;
  const double h = dt / substeps;
  for (int i = 0; i < substeps; ++i) {
    ManifoldSubstep s = manifold_substep(f, xc, vc, h, false);
    xc = s.x_out;
    vc = s.v_out;
  }
  return vc;
}

ManifoldStep step_all(const FlowField& f, const Vec2& x, const Vec2& v, const Mat2& a,
                      double dt, int substeps) {
  ManifoldStep out{x, v, a};
  const double h = dt / substeps;
  for (int i = 0; i < substeps; ++i) {
    ManifoldSubstep s = manifold_substep(f, out.x, out.v, h, false);
    out.a = tangent_through(s, out.a);
    out.x = s.x_out;
    out.v = s.v_out;
  }
  return out;
}

}  // namespace lcl
