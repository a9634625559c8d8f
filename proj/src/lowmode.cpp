#include "lcl/lowmode.hpp"

#include <cmath>

namespace lcl {

namespace {

// Trig evaluation of all forced-mode jets at one point:
// val = gamma_j e_j(x), grad = gamma_j tensor j * e_{-j}(x).
void basis_jets(const std::vector<WaveVector>& modes, const Vec2& x,
                std::vector<PerturbationJet>& out) {
  out.resize(modes.size());
  for (size_t j = 0; j < modes.size(); ++j) {
    const WaveVector k = modes[j];
    const Vec2 g = gamma(k);
    const double e = eval_basis(k, x);
    const double de = eval_basis(-k, x);
    out[j].val = g * e;
    out[j].grad(0, 0) = g[0] * k.k1 * de;
    out[j].grad(0, 1) = g[0] * k.k2 * de;
    out[j].grad(1, 0) = g[1] * k.k1 * de;
    out[j].grad(1, 1) = g[1] * k.k2 * de;
  }
}

}  // namespace

LowModeOps::LowModeOps(const ForcingSpec& forcing, double nu)
    : forcing_(forcing),
      nu_(nu),
      table_(forcing.modes(), 4 * forcing.nstar() + 2) {
  if (nu <= 0.0) throw ConfigError("LowModeOps: nu must be > 0");
  lam_.reserve(m());
  for (WaveVector k : forcing_.modes()) lam_.push_back(nu * k.norm2());
}

Eigen::VectorXd LowModeOps::pack(const LowModeVector& h) const {
  if (h.hu.size() != m()) throw ConfigError("pack: velocity block size mismatch");
  Eigen::VectorXd z(dim());
  z.head(m()) = h.hu;
  z[m()] = h.hx[0];
  z[m() + 1] = h.hx[1];
  z[m() + 2] = h.hv[0];
  z[m() + 3] = h.hv[1];
  return z;
}

LowModeVector LowModeOps::unpack(const Eigen::VectorXd& z, const Vec2& v) const {
  LowModeVector h;
  h.hu = z.head(m());
  h.hx = Vec2(z[m()], z[m() + 1]);
  Vec2 hv(z[m() + 2], z[m() + 3]);
  h.hv = hv - v * (v.dot(hv));  // re-project tangent
  return h;
}

SpectralVelocity LowModeOps::field_of(const Eigen::VectorXd& z, int kmax) const {
  SpectralVelocity f(kmax);
  const auto& modes = forcing_.modes();
  for (int i = 0; i < m(); ++i)
    if (z[i] != 0.0) f.set_coeff(modes[i], z[i]);
  return f;
}

Eigen::MatrixXd LowModeOps::tangent_basis(const Vec2& v) const {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dim(), dim() - 1);
  for (int i = 0; i < m() + 2; ++i) w(i, i) = 1.0;
  w(m() + 2, m() + 2) = -v[1];
  w(m() + 3, m() + 2) = v[0];
  return w;
}

Eigen::VectorXd LowModeOps::apply_Q(const Eigen::VectorXd& g) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(dim());
  const auto& q = forcing_.q();
  for (int i = 0; i < m(); ++i) z[i] = q[i] * g[i];
  return z;
}

Eigen::VectorXd LowModeOps::apply_Qt(const Eigen::VectorXd& z) const {
  Eigen::VectorXd g(m());
  const auto& q = forcing_.q();
  for (int i = 0; i < m(); ++i) g[i] = q[i] * z[i];
  return g;
}

void LowModeOps::advection_coupling(const SpectralVelocity& u, Eigen::MatrixXd& out) {
  // only modes within twice the forcing radius can scatter back into it
  const int band = std::min(u.kmax(), 2 * forcing_.nstar());
  SpectralVelocity ut(band);
  u.for_each([&](WaveVector k, double a) {
    if (a != 0.0 && k.norm_inf() <= band) ut.set_coeff(k, a);
  });
  table_.assemble(ut, out);
}

LowModeVector LowModeOps::ltilde_apply(const SpectralVelocity& u, const Vec2& x,
                                       const Vec2& v, const LowModeVector& h) {
  if (std::abs(v.norm() - 1.0) > 1e-9) throw ConfigError("ltilde_apply: |v| != 1");
  const auto& modes = forcing_.modes();
  LowModeVector out;
  out.hu = Eigen::VectorXd::Zero(m());

  // velocity block: dissipation + advection coupling
  advection_coupling(u, coupling_);
  out.hu = coupling_ * h.hu;
  for (int i = 0; i < m(); ++i) out.hu[i] -= lam_[i] * h.hu[i];

  // perturbation field of the velocity block at x
  FieldJet uj;
  eval_jet(u, x, uj, true);
  Vec2 pval = Vec2::Zero();
  Mat2 pgrad = Mat2::Zero();
  for (int i = 0; i < m(); ++i) {
    if (h.hu[i] == 0.0) continue;
    const WaveVector k = modes[i];
    const Vec2 g = gamma(k);
    const double e = eval_basis(k, x);
    const double de = eval_basis(-k, x);
    pval += h.hu[i] * e * g;
    pgrad(0, 0) += h.hu[i] * g[0] * k.k1 * de;
    pgrad(0, 1) += h.hu[i] * g[0] * k.k2 * de;
    pgrad(1, 0) += h.hu[i] * g[1] * k.k1 * de;
    pgrad(1, 1) += h.hu[i] * g[1] * k.k2 * de;
  }

  out.hx = uj.du * h.hx + pval;

  Vec2 kv = projective_drift_dv(uj.du, v, h.hv);
  const Vec2 hxx = hessian_apply(uj.d2u, h.hx, v);
  kv += hxx + pgrad * v;
  out.hv = kv - v * (v.dot(kv));
  return out;
}

Eigen::MatrixXd LowModeOps::step_matrix(const SolverConfig& cfg,
                                        const SpectralVelocity& u, const Vec2& x,
                                        const Vec2& v, Vec2* x_out, Vec2* v_out) {
  const int mm = m();
  const int d = dim();
  const double h = cfg.dt / cfg.flow_substeps;

  advection_coupling(u, coupling_);

  // manifold rows for every embedding column, advanced substep by substep;
  // the velocity block of column j stays phi_j throughout the step (the
  // velocity row updates only at the step boundary)
  Eigen::MatrixXd mb = Eigen::MatrixXd::Zero(4, d);
  mb(0, mm) = 1.0;
  mb(1, mm + 1) = 1.0;
  mb(2, mm + 2) = 1.0;
  mb(3, mm + 3) = 1.0;

  SpectralFlowField field(u);
  std::vector<PerturbationJet> jets[4];
  PerturbationJet column_jets[4];

  Vec2 xc = x, vc = v;
  for (int sub = 0; sub < cfg.flow_substeps; ++sub) {
    ManifoldSubstep s = manifold_substep(field, xc, vc, h, true);
    for (int st = 0; st < 4; ++st) basis_jets(forcing_.modes(), s.x[st], jets[st]);

    for (int col = 0; col < d; ++col) {
      Vec2 hx(mb(0, col), mb(1, col));
      Vec2 hv(mb(2, col), mb(3, col));
      const Vec2 hv_before = hv;
      const PerturbationJet* fj = nullptr;
      if (col < mm) {
        for (int st = 0; st < 4; ++st) column_jets[st] = jets[st][col];
        fj = column_jets;
      }
      variational_substep(s, fj, hx, hv);
      // carry the v-normal direction isometrically so the step matrix
      // stays invertible; tangent inputs are unaffected
      hv += s.v_out * (vc.dot(hv_before));
      mb(0, col) = hx[0];
      mb(1, col) = hx[1];
      mb(2, col) = hv[0];
      mb(3, col) = hv[1];
    }
    xc = s.x_out;
    vc = s.v_out;
  }

  // velocity row: integrating-factor update of the forced block
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(d, d);
  t.topLeftCorner(mm, mm) =
      Eigen::MatrixXd::Identity(mm, mm) + cfg.dt * coupling_;
  for (int r = 0; r < mm; ++r)
    t.row(r).head(mm) *= std::exp(-lam_[r] * cfg.dt);
  t.bottomRows(4) = mb;
  if (x_out) *x_out = xc;
  if (v_out) *v_out = vc;
  return t;
}

PropagatorPath::PropagatorPath(const TrajectoryRecord& rec, LowModeOps& ops, int i0,
                               int i1, int refine) {
  if (i0 < 0 || i1 > rec.steps() || i0 > i1)
    throw ConfigError("PropagatorPath: node range outside the record");
  if (refine < 1) throw ConfigError("PropagatorPath: refine must be >= 1");
  const int d = ops.dim();
  const int nseg = (i1 - i0) * refine;
  t0_ = i0 * rec.dt();
  dt_node_ = rec.dt() / refine;
  r_.reserve(nseg + 1);
  s_.reserve(nseg + 1);
  t_.reserve(nseg);
  v_.reserve(nseg + 1);
  r_.push_back(Eigen::MatrixXd::Identity(d, d));
  s_.push_back(Eigen::MatrixXd::Identity(d, d));
  v_.push_back(rec.v[i0]);

  for (int i = i0; i < i1; ++i) {
    // refine sub-transitions within solver step i (same frozen velocity)
    Vec2 xc = rec.x[i], vc = rec.v[i];
    SolverConfig sub = rec.cfg;
    sub.dt = rec.cfg.dt / refine;
    for (int r = 0; r < refine; ++r) {
      Eigen::MatrixXd t = ops.step_matrix(sub, rec.u[i], xc, vc, &xc, &vc);
      r_.push_back(t * r_.back());
      s_.push_back(t.transpose().partialPivLu().solve(s_.back().transpose()).transpose());
      t_.push_back(std::move(t));
      v_.push_back(vc);
    }
  }
}

namespace {

LowModePropagator evolve_impl(const TrajectoryRecord& rec, LowModeOps& ops, double s,
                              double t, char kind) {
  if (s > t) throw ConfigError("evolve: require s <= t");
  const int i0 = rec.node(s);
  const int i1 = rec.node(t);
  PropagatorPath path(rec, ops, i0, i1);
  LowModePropagator out;
  out.s = s;
  out.t = t;
  out.kind = kind;
  out.mat = (kind == 'R') ? path.R(path.nodes() - 1) : path.S(path.nodes() - 1);

  // conditioning diagnostic on the tangent subspace of the endpoint map
  const Eigen::MatrixXd win = ops.tangent_basis(path.v_at(0));
  const Eigen::MatrixXd wout = ops.tangent_basis(path.v_at(path.nodes() - 1));
  const Eigen::MatrixXd rtan = (kind == 'R')
                                   ? Eigen::MatrixXd(wout.transpose() * out.mat * win)
                                   : Eigen::MatrixXd(win.transpose() * out.mat * wout);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rtan);
  const double smin = svd.singularValues().tail(1)(0);
  const double smax = svd.singularValues()(0);
  if (smin <= 0.0 || smax / smin > 1e12)
    throw NonDegeneracyError(smin, "evolve: low-mode propagator is ill-conditioned");
  return out;
}

}  // namespace

LowModePropagator evolve_R(const TrajectoryRecord& rec, LowModeOps& ops, double s,
                           double t) {
  return evolve_impl(rec, ops, s, t, 'R');
}

LowModePropagator evolve_S(const TrajectoryRecord& rec, LowModeOps& ops, double s,
                           double t) {
  return evolve_impl(rec, ops, s, t, 'S');
}

}  // namespace lcl
