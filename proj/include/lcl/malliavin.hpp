#pragma once

#include <Eigen/Cholesky>

#include "lcl/lowmode.hpp"
#include "lcl/solver.hpp"

namespace lcl {

/// Tangent vector of the full extended system: a full-band velocity
/// perturbation plus the manifold blocks.
struct FullTangent {
  SpectralVelocity hu;
  Vec2 hx = Vec2::Zero();
  Vec2 hv = Vec2::Zero();
};

double tangent_norm(const FullTangent& h);

/// The partial Malliavin matrix N = int_{tau0}^{T0} (S_s Q)(S_s Q)^T ds
/// on the embedded low-mode space, with eigenvalue diagnostics restricted
/// to the tangent subspace anchored at the direction v(tau0).
struct PartialMalliavinMatrix {
  Eigen::MatrixXd mat;
  double t0 = 0.0, t1 = 0.0;  // tau0, T0 relative to the record start
  Vec2 v_anchor = Vec2(1.0, 0.0);
  Eigen::VectorXd tangent_eigs;  // ascending, dimension m+3
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double cond = 0.0;
};

/// Trapezoidal assembly at spacing quad_dt (the solver step by default;
/// integer refinements/strides of it otherwise).  The frozen-dynamics
/// hook replaces S by the identity, which makes the velocity block exact
/// and the manifold block exactly singular.
PartialMalliavinMatrix assemble_N(const TrajectoryRecord& rec, LowModeOps& ops,
                                  double tau0, double T0, double quad_dt,
                                  bool frozen_dynamics = false);

/// Empirical CCDF of the smallest tangent-subspace eigenvalue over an
/// ensemble: fraction of runs with lambda_min < epsilon, per epsilon.
struct CcdfRow {
  double epsilon;
  double fraction;
};
std::vector<CcdfRow> min_eig_tail(std::vector<double> lambda_mins,
                                  const std::vector<double>& epsilons);

/// Low-frequency control samples on the quadrature grid of [tau0, T0]
/// (zero before tau0), with the L2 cost proxy int |g|^2 dt.
struct ControlPath {
  double t_start = 0.0;
  double dt = 0.0;
  std::vector<Eigen::VectorXd> g;
  double cost_l2 = 0.0;
};

/// Response of the linearized system to a control: the low-mode block and
/// the high-band remainder at T0 (both start from zero at tau0).
struct MalliavinResponse {
  Eigen::VectorXd zeta;
  SpectralVelocity xi;
};

struct ResidualReport {
  double rho_low = 0.0;
  double rho_high = 0.0;
  double rho_total = 0.0;
  double discrepancy_low = 0.0;   // direct vs representation formula
  double discrepancy_high = 0.0;
  double matching_residual = 0.0;  // quadrature-family matching defect
  double j_norm = 0.0;
  double cost_l2 = 0.0;
  double lambda_min = 0.0;
  double cond_n = 0.0;
};

/// One recorded window, everything derived from it: exact low-mode
/// propagators on [0, tau0] and [tau0, T0], the partial Malliavin matrix,
/// the control, the forced response, and both error representations.
/// With coupling disabled the system is the block-decoupled test system
/// (the low/high cross derivatives are dropped on both sides), for which
/// the control matching is exact.
class MalliavinPipeline {
 public:
  MalliavinPipeline(const TrajectoryRecord& rec, SnsSolver& solver, LowModeOps& ops,
                    double tau0, double T0, bool coupling = true);

  const PartialMalliavinMatrix& N() const { return n_; }
  const PropagatorPath& path() const { return path_; }   // [tau0, T0]
  const PropagatorPath& lead() const { return lead_; }   // [0, tau0]

  /// N^{-1} b on the tangent subspace (one refinement iteration).
  Eigen::VectorXd solve_N(const Eigen::VectorXd& b) const;

  /// J_{0,T0} h: exact linearization of the recorded discrete flow (or of
  /// the decoupled test system when coupling is disabled).
  FullTangent jacobian(const FullTangent& h);

  ControlPath build_control(const FullTangent& h);
  MalliavinResponse response(const ControlPath& g);
  ResidualReport residual(const FullTangent& h);

 private:
  struct JacobianTrace {
    std::vector<Eigen::VectorXd> low;  // embedded low parts at nodes [n0, n1]
    SpectralVelocity high_at_tau0;
    FullTangent end;
  };
  struct ResponseTrace {
    std::vector<Eigen::VectorXd> zeta_tilde;  // post-impulse, nodes [n0, n1]
    Eigen::VectorXd bacc;                     // sum of S_{j+1} b_j
    Eigen::VectorXd zeta_end;
    SpectralVelocity xi_end;
  };
  JacobianTrace run_jacobian(const FullTangent& h);
  ControlPath control_from_target(const Eigen::VectorXd& low_at_t1);
  void run_response(const ControlPath& g, ResponseTrace& tr);

  const TrajectoryRecord& rec_;
  SnsSolver& solver_;
  LowModeOps& ops_;
  double tau0_, t1_;
  int n0_, n1_;
  bool coupling_;
  PropagatorPath lead_;
  PropagatorPath path_;
  PartialMalliavinMatrix n_;
  Eigen::MatrixXd wtan_;  // tangent basis at the anchor
  Eigen::LDLT<Eigen::MatrixXd> nfac_;
  std::vector<double> weights_;
};

/// J_{s,t} h along a record, free-standing form of the pipeline's
/// jacobian (always the fully coupled system).
FullTangent jacobian_apply(const TrajectoryRecord& rec, SnsSolver& solver, double s,
                           double t, const FullTangent& h);

/// Isotropic random direction of unit tangent norm; hv is drawn tangent
/// to the given v.
FullTangent random_unit_tangent(int kmax, const Vec2& v, NoiseStream& rng);

}  // namespace lcl
