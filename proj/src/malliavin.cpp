#include "lcl/malliavin.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace lcl {

namespace {

// One exact linearized step of the coupled discrete flow along record
// step i: manifold blocks ride the recorded RK4 substeps with the
// perturbation field hu, then hu takes the linearized velocity update.
// Shared by the Jacobian and the forced-response recursions so the error
// algebra cancels exactly.
void step_full_tangent(const TrajectoryRecord& rec, SnsSolver& solver, int i,
                       SpectralVelocity& hu, Vec2& hx, Vec2& hv) {
  const SolverConfig& cfg = rec.cfg;
  SpectralFlowField field(rec.u[i]);
  const double h = cfg.dt / cfg.flow_substeps;
  Vec2 xc = rec.x[i], vc = rec.v[i];
  PerturbationJet pj[4];
  for (int sub = 0; sub < cfg.flow_substeps; ++sub) {
    ManifoldSubstep s = manifold_substep(field, xc, vc, h, true);
    for (int st = 0; st < 4; ++st) {
      FieldJet fj;
      eval_jet(hu, s.x[st], fj, false);
      pj[st].val = fj.u;
      pj[st].grad = fj.du;
    }
    variational_substep(s, pj, hx, hv);
    xc = s.x_out;
    vc = s.v_out;
  }
  solver.step_velocity_tangent(rec.u[i], hu);
}

Eigen::VectorXd pack_low(const LowModeOps& ops, const SpectralVelocity& hu,
                         const Vec2& hx, const Vec2& hv) {
  const auto& modes = ops.forcing().modes();
  Eigen::VectorXd z(ops.dim());
  for (int j = 0; j < ops.m(); ++j) z[j] = hu.coeff(modes[j]);
  z[ops.m()] = hx[0];
  z[ops.m() + 1] = hx[1];
  z[ops.m() + 2] = hv[0];
  z[ops.m() + 3] = hv[1];
  return z;
}

std::vector<double> trapezoid_weights(int nodes, double spacing) {
  std::vector<double> w(nodes, spacing);
  w.front() = 0.5 * spacing;
  w.back() = 0.5 * spacing;
  return w;
}

void tangent_eig_diagnostics(const LowModeOps& ops, PartialMalliavinMatrix& n) {
  const Eigen::MatrixXd w = ops.tangent_basis(n.v_anchor);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w.transpose() * n.mat * w);
  n.tangent_eigs = eig.eigenvalues();
  n.lambda_min = n.tangent_eigs(0);
  n.lambda_max = n.tangent_eigs(n.tangent_eigs.size() - 1);
  n.cond = (n.lambda_min > 0.0) ? n.lambda_max / n.lambda_min
                                : std::numeric_limits<double>::infinity();
}

}  // namespace

double tangent_norm(const FullTangent& h) {
  return std::sqrt(energy(h.hu) + h.hx.squaredNorm() + h.hv.squaredNorm());
}

PartialMalliavinMatrix assemble_N(const TrajectoryRecord& rec, LowModeOps& ops,
                                  double tau0, double T0, double quad_dt,
                                  bool frozen_dynamics) {
  if (!(0.0 < tau0 && tau0 < T0)) throw ConfigError("assemble_N: need 0 < tau0 < T0");
  const int n0 = rec.node(tau0);
  const int n1 = rec.node(T0);

  // quadrature grid: integer refinement or stride of the solver step
  int refine = 1, stride = 1;
  const double ratio = rec.dt() / quad_dt;
  if (ratio >= 1.0 - 1e-9) {
    refine = int(std::lround(ratio));
    if (std::abs(ratio - refine) > 1e-9)
      throw ConfigError("assemble_N: quad_dt must divide the solver step");
  } else {
    stride = int(std::lround(1.0 / ratio));
    if (std::abs(1.0 / ratio - stride) > 1e-9 || (n1 - n0) % stride != 0)
      throw ConfigError("assemble_N: quad_dt must be a multiple of the solver step");
  }

  PartialMalliavinMatrix n;
  n.t0 = tau0;
  n.t1 = T0;
  n.v_anchor = rec.v[n0];
  const int d = ops.dim();
  n.mat = Eigen::MatrixXd::Zero(d, d);

  if (frozen_dynamics) {
    const double span = (n1 - n0) * rec.dt();
    const auto& q = ops.forcing().q();
    for (int i = 0; i < ops.m(); ++i) n.mat(i, i) = span * q[i] * q[i];
    tangent_eig_diagnostics(ops, n);
    return n;
  }

  PropagatorPath path(rec, ops, n0, n1, refine);
  const int qnodes = (path.nodes() - 1) / stride + 1;
  const std::vector<double> w = trapezoid_weights(qnodes, quad_dt);
  Eigen::MatrixXd g(d, ops.m());
  const auto& q = ops.forcing().q();
  for (int j = 0; j < qnodes; ++j) {
    const Eigen::MatrixXd& s = path.S(j * stride);
    for (int c = 0; c < ops.m(); ++c) g.col(c) = q[c] * s.col(c);
    n.mat.noalias() += w[j] * g * g.transpose();
  }
  n.mat = 0.5 * (n.mat + n.mat.transpose()).eval();
  tangent_eig_diagnostics(ops, n);
  return n;
}

std::vector<CcdfRow> min_eig_tail(std::vector<double> lambda_mins,
                                  const std::vector<double>& epsilons) {
  std::sort(lambda_mins.begin(), lambda_mins.end());
  std::vector<CcdfRow> table;
  table.reserve(epsilons.size());
  for (double eps : epsilons) {
    const auto it = std::lower_bound(lambda_mins.begin(), lambda_mins.end(), eps);
    table.push_back({eps, lambda_mins.empty()
                              ? 0.0
                              : double(it - lambda_mins.begin()) / lambda_mins.size()});
  }
  return table;
}

MalliavinPipeline::MalliavinPipeline(const TrajectoryRecord& rec, SnsSolver& solver,
                                     LowModeOps& ops, double tau0, double T0,
                                     bool coupling)
    : rec_(rec),
      solver_(solver),
      ops_(ops),
      tau0_(tau0),
      t1_(T0),
      n0_(rec.node(tau0)),
      n1_(rec.node(T0)),
      coupling_(coupling),
      lead_(rec, ops, 0, rec.node(tau0)),
      path_(rec, ops, rec.node(tau0), rec.node(T0)) {
  if (!(0.0 < tau0 && tau0 < T0)) throw ConfigError("MalliavinPipeline: need 0 < tau0 < T0");
  if (solver_.config().kmax != rec.cfg.kmax || solver_.config().dt != rec.cfg.dt)
    throw ConfigError("MalliavinPipeline: solver/record configuration mismatch");

  const int d = ops_.dim();
  const int nq = path_.nodes() - 1;
  weights_ = trapezoid_weights(nq + 1, rec.dt());

  n_.t0 = tau0;
  n_.t1 = T0;
  n_.v_anchor = rec.v[n0_];
  n_.mat = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd g(d, ops_.m());
  const auto& q = ops_.forcing().q();
  for (int j = 0; j <= nq; ++j) {
    const Eigen::MatrixXd& s = path_.S(j);
    for (int c = 0; c < ops_.m(); ++c) g.col(c) = q[c] * s.col(c);
    n_.mat.noalias() += weights_[j] * g * g.transpose();
  }
  n_.mat = 0.5 * (n_.mat + n_.mat.transpose()).eval();
  tangent_eig_diagnostics(ops_, n_);

  wtan_ = ops_.tangent_basis(n_.v_anchor);
  nfac_.compute(wtan_.transpose() * n_.mat * wtan_);
}

Eigen::VectorXd MalliavinPipeline::solve_N(const Eigen::VectorXd& b) const {
  const Eigen::MatrixXd ntan = wtan_.transpose() * n_.mat * wtan_;
  const Eigen::VectorXd br = wtan_.transpose() * b;
  Eigen::VectorXd y = nfac_.solve(br);
  y -= nfac_.solve(ntan * y - br);  // one refinement pass
  return wtan_ * y;
}

MalliavinPipeline::JacobianTrace MalliavinPipeline::run_jacobian(const FullTangent& h) {
  JacobianTrace tr;
  tr.low.reserve(n1_ - n0_ + 1);
  const int nstar = ops_.forcing().nstar();

  if (coupling_) {
    SpectralVelocity hu = h.hu;
    Vec2 hx = h.hx, hv = h.hv;
    tr.high_at_tau0 = project_high(hu, nstar);  // overwritten unless n0 == 0
    for (int i = 0; i < n1_; ++i) {
      if (i == n0_) tr.high_at_tau0 = project_high(hu, nstar);
      if (i >= n0_) tr.low.push_back(pack_low(ops_, hu, hx, hv));
      step_full_tangent(rec_, solver_, i, hu, hx, hv);
    }
    tr.low.push_back(pack_low(ops_, hu, hx, hv));
    tr.end = FullTangent{hu, hx, hv};
    return tr;
  }

  // Decoupled test system: the embedded low block rides the stored
  // transition chain; the high band evolves with the cross blocks dropped.
  Eigen::VectorXd z = lead_.R(lead_.nodes() - 1) * pack_low(ops_, h.hu, h.hx, h.hv);
  for (int j = 0; j <= n1_ - n0_; ++j) tr.low.push_back(path_.R(j) * z);

  SpectralVelocity xi = project_high(h.hu, nstar);
  for (int i = 0; i < n1_; ++i) {
    if (i == n0_) tr.high_at_tau0 = xi;
    solver_.step_velocity_tangent(rec_.u[i], xi);
    xi = project_high(xi, nstar);
  }
  if (n0_ == 0) tr.high_at_tau0 = project_high(h.hu, nstar);

  const Eigen::VectorXd& zt = tr.low.back();
  FullTangent end;
  end.hu = xi;
  const auto& modes = ops_.forcing().modes();
  for (int j = 0; j < ops_.m(); ++j) end.hu.add_coeff(modes[j], zt[j]);
  end.hx = Vec2(zt[ops_.m()], zt[ops_.m() + 1]);
  end.hv = Vec2(zt[ops_.m() + 2], zt[ops_.m() + 3]);
  tr.end = end;
  return tr;
}

FullTangent MalliavinPipeline::jacobian(const FullTangent& h) {
  return run_jacobian(h).end;
}

ControlPath MalliavinPipeline::control_from_target(const Eigen::VectorXd& low_at_t1) {
  if (!(n_.cond < 1e10))
    throw NonDegeneracyError(n_.lambda_min,
                             "build_control: partial Malliavin matrix is near-singular");
  const int nq = path_.nodes() - 1;
  const Eigen::VectorXd c = path_.S(nq) * low_at_t1;
  const Eigen::VectorXd y = solve_N(c);

  ControlPath g;
  g.t_start = tau0_;
  g.dt = rec_.dt();
  g.g.reserve(nq + 1);
  for (int j = 0; j <= nq; ++j) {
    g.g.push_back(ops_.apply_Qt(path_.S(j).transpose() * y));
    g.cost_l2 += weights_[j] * g.g.back().squaredNorm();
  }
  return g;
}

ControlPath MalliavinPipeline::build_control(const FullTangent& h) {
  return control_from_target(run_jacobian(h).low.back());
}

MalliavinResponse MalliavinPipeline::response(const ControlPath& g) {
  ResponseTrace tr;
  run_response(g, tr);
  return MalliavinResponse{tr.zeta_end, tr.xi_end};
}

void MalliavinPipeline::run_response(const ControlPath& g, ResponseTrace& tr) {
  const int nq = path_.nodes() - 1;
  if (int(g.g.size()) != nq + 1)
    throw ConfigError("response: control samples do not match the quadrature grid");
  const int mm = ops_.m();
  const int nstar = ops_.forcing().nstar();

  Eigen::VectorXd zeta = Eigen::VectorXd::Zero(ops_.dim());
  SpectralVelocity xi(rec_.cfg.kmax);
  tr.zeta_tilde.clear();
  tr.zeta_tilde.reserve(nq);
  tr.bacc = Eigen::VectorXd::Zero(ops_.dim());

  for (int j = 0; j < nq; ++j) {
    zeta += weights_[j] * ops_.apply_Q(g.g[j]);
    tr.zeta_tilde.push_back(zeta);

    if (coupling_) {
      // combine the low field with the high remainder, take one exact
      // linearized step, split back
      SpectralVelocity hu = xi;
      const auto& modes = ops_.forcing().modes();
      for (int c = 0; c < mm; ++c)
        if (zeta[c] != 0.0) hu.add_coeff(modes[c], zeta[c]);
      Vec2 hx(zeta[mm], zeta[mm + 1]);
      Vec2 hv(zeta[mm + 2], zeta[mm + 3]);
      step_full_tangent(rec_, solver_, n0_ + j, hu, hx, hv);

      Eigen::VectorXd znew(ops_.dim());
      for (int c = 0; c < mm; ++c) {
        znew[c] = hu.coeff(modes[c]);
        hu.set_coeff(modes[c], 0.0);
      }
      znew[mm] = hx[0];
      znew[mm + 1] = hx[1];
      znew[mm + 2] = hv[0];
      znew[mm + 3] = hv[1];

      // coupling increment relative to the decoupled transition
      const Eigen::VectorXd b = znew - path_.T(j) * zeta;
      tr.bacc.noalias() += path_.S(j + 1) * b;
      zeta = znew;
      xi = hu;
    } else {
      zeta = path_.T(j) * zeta;
      if (energy(xi) > 0.0) {
        solver_.step_velocity_tangent(rec_.u[n0_ + j], xi);
        xi = project_high(xi, nstar);
      }
    }
  }
  zeta += weights_[nq] * ops_.apply_Q(g.g[nq]);
  tr.zeta_tilde.push_back(zeta);
  tr.zeta_end = zeta;
  tr.xi_end = xi;
}

ResidualReport MalliavinPipeline::residual(const FullTangent& h) {
  const int nq = path_.nodes() - 1;
  const int nstar = ops_.forcing().nstar();
  JacobianTrace jt = run_jacobian(h);
  const Eigen::VectorXd& lt1 = jt.low.back();

  ControlPath g = control_from_target(lt1);
  ResponseTrace rt;
  run_response(g, rt);

  ResidualReport rep;
  rep.cost_l2 = g.cost_l2;
  rep.lambda_min = n_.lambda_min;
  rep.cond_n = n_.cond;
  rep.j_norm = tangent_norm(jt.end);

  // direct: rho = J h - response
  const Eigen::VectorXd rho_l = lt1 - rt.zeta_end;
  SpectralVelocity rho_h = project_high(jt.end.hu, nstar);
  rho_h.axpy(-1.0, rt.xi_end);
  rep.rho_low = rho_l.norm();
  rep.rho_high = std::sqrt(energy(rho_h));
  rep.rho_total = std::hypot(rep.rho_low, rep.rho_high);

  // representation formulas: the low residual is the S-weighted sum of
  // the coupling increments pushed to T0; the high residual propagates
  // the tau0 legacy plus the low-to-high coupling of (J - response)
  const Eigen::VectorXd rho_l_repr = -(path_.R(nq) * rt.bacc);
  rep.discrepancy_low = (rho_l - rho_l_repr).norm();

  SpectralVelocity sigma = jt.high_at_tau0;
  const auto& modes = ops_.forcing().modes();
  for (int j = 0; j < nq; ++j) {
    SpectralVelocity zfield = sigma;
    if (coupling_) {
      const Eigen::VectorXd z = jt.low[j] - rt.zeta_tilde[j];
      for (int c = 0; c < ops_.m(); ++c)
        if (z[c] != 0.0) zfield.add_coeff(modes[c], z[c]);
    }
    solver_.step_velocity_tangent(rec_.u[n0_ + j], zfield);
    sigma = project_high(zfield, nstar);
  }
  SpectralVelocity dh = rho_h;
  dh.axpy(-1.0, sigma);
  rep.discrepancy_high = std::sqrt(energy(dh));

  // matching defect of the quadrature family (Gram identity)
  const Eigen::VectorXd c = path_.S(nq) * lt1;
  const Eigen::VectorXd match = path_.R(nq) * (n_.mat * solve_N(c)) - lt1;
  rep.matching_residual = match.norm();
  return rep;
}

FullTangent jacobian_apply(const TrajectoryRecord& rec, SnsSolver& solver, double s,
                           double t, const FullTangent& h) {
  const int i0 = rec.node(s);
  const int i1 = rec.node(t);
  if (i0 > i1) throw ConfigError("jacobian_apply: require s <= t");
  SpectralVelocity hu = h.hu;
  Vec2 hx = h.hx, hv = h.hv;
  for (int i = i0; i < i1; ++i) step_full_tangent(rec, solver, i, hu, hx, hv);
  return FullTangent{hu, hx, hv};
}

FullTangent random_unit_tangent(int kmax, const Vec2& v, NoiseStream& rng) {
  FullTangent h;
  h.hu = SpectralVelocity(kmax);
  for (double& a : h.hu.raw()) a = rng.gaussian();
  h.hu.raw()[h.hu.index({0, 0})] = 0.0;  // the origin slot stays empty
  h.hx = Vec2(rng.gaussian(), rng.gaussian());
  const Vec2 vperp(-v[1], v[0]);
  h.hv = rng.gaussian() * vperp;
  const double n = tangent_norm(h);
  h.hu.scale(1.0 / n);
  h.hx /= n;
  h.hv /= n;
  return h;
}

}  // namespace lcl
