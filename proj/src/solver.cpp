#include "lcl/solver.hpp"

#include <cmath>

namespace lcl {

void SolverConfig::validate() const {
  if (nu <= 0.0) throw ConfigError("SolverConfig: nu must be > 0");
  if (dt <= 0.0) throw ConfigError("SolverConfig: dt must be > 0");
  if (kmax < 1) throw ConfigError("SolverConfig: kmax must be >= 1");
  if (gridsize < 3 * kmax)
    throw ConfigError("SolverConfig: gridsize must be >= 3*kmax for dealiased products");
  if (dt >= 10.0 / (nu * double(kmax) * kmax))
    throw ConfigError("SolverConfig: dt exceeds the nonlinear stability bound 10/(nu kmax^2)");
  if (flow_substeps < 1) throw ConfigError("SolverConfig: flow_substeps must be >= 1");
}

SnsSolver::SnsSolver(const SolverConfig& cfg, const ForcingSpec& forcing)
    : cfg_(cfg), forcing_(forcing), ws_(std::make_shared<SpectralWorkspace>(cfg.gridsize)) {
  cfg_.validate();
  if (forcing_.nstar() > cfg_.kmax)
    throw ConfigError("SnsSolver: forcing nstar exceeds the Galerkin truncation");

  SpectralVelocity proto(cfg_.kmax);
  exp_factor_.assign(proto.raw().size(), 1.0);
  proto.for_each([&](WaveVector k, double) {
    exp_factor_[proto.index(k)] = std::exp(-cfg_.nu * k.norm2() * cfg_.dt);
  });

  noise_scale_.resize(forcing_.mode_count());
  for (int i = 0; i < forcing_.mode_count(); ++i) {
    const double lam = cfg_.nu * forcing_.modes()[i].norm2();
    // exact OU variance of the integrating-factor step
    const double sigma2 = (1.0 - std::exp(-2.0 * lam * cfg_.dt)) / (2.0 * lam);
    noise_scale_[i] = forcing_.q()[i] * std::sqrt(sigma2);
  }
}

SpectralVelocity SnsSolver::nonlinear_term(const SpectralVelocity& u) {
  SpectralVelocity out(cfg_.kmax);
  ws_->add_advection(u, u, cfg_.dealias, -1.0, out);
  return out;
}

SpectralVelocity SnsSolver::advection_derivative(const SpectralVelocity& u,
                                                 const SpectralVelocity& h) {
  SpectralVelocity out(cfg_.kmax);
  ws_->add_advection(h, u, cfg_.dealias, -1.0, out);
  ws_->add_advection(u, h, cfg_.dealias, -1.0, out);
  return out;
}

void SnsSolver::step(SnsState& state, NoiseStream& rng) {
  SpectralVelocity& u = state.u;
  if (u.kmax() != cfg_.kmax) throw ConfigError("step: state truncation differs from config");

  if (cfg_.enable_nonlinear) {
    SpectralVelocity b = nonlinear_term(u);
    u.axpy(cfg_.dt, b);
  }
  std::vector<double>& a = u.raw();
  for (size_t i = 0; i < a.size(); ++i) a[i] *= exp_factor_[i];

  if (forcing_.amplitude() > 0.0) {
    const auto& modes = forcing_.modes();
    for (size_t i = 0; i < modes.size(); ++i)
      a[u.index(modes[i])] += noise_scale_[i] * rng.gaussian();
  }

  state.t += cfg_.dt;

  const double e = energy(u);
  if (!std::isfinite(e) || e > 1e24)
    throw BlowupError(state.t, std::sqrt(e), "SnsSolver::step: velocity coefficients diverged");
}

void SnsSolver::burn_in(SnsState& state, NoiseStream& rng, double t_burn) {
  if (t_burn < 0.0) throw ConfigError("burn_in: negative horizon");
  const long n = std::lround(t_burn / cfg_.dt);
  for (long i = 0; i < n; ++i) step(state, rng);
}

void SnsSolver::step_velocity_tangent(const SpectralVelocity& u, SpectralVelocity& h) {
  if (cfg_.enable_nonlinear) {
    SpectralVelocity db = advection_derivative(u, h);
    h.axpy(cfg_.dt, db);
  }
  std::vector<double>& a = h.raw();
  for (size_t i = 0; i < a.size(); ++i) a[i] *= exp_factor_[i];
}

double energy(const SpectralVelocity& u) {
  double s = 0.0;
  for (double a : u.raw()) s += a * a;
  return s;
}

double enstrophy(const SpectralVelocity& u) {
  const double n = sobolev_norm(u, 1);
  return n * n;
}

}  // namespace lcl
