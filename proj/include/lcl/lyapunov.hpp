#pragma once

#include "lcl/trajectory.hpp"

namespace lcl {

/// A Lyapunov exponent estimate with batch-means error bar.
struct ExponentEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double horizon = 0.0;
  int batches = 0;
};

/// Stream of linearized dynamics along a trajectory.  Each step advances
/// the underlying state and transports caller-owned tangent matrices and
/// projective directions consistently with it.
class CocycleDriver {
 public:
  virtual ~CocycleDriver() = default;
  virtual double step_dt() const = 0;
  virtual void step(std::span<Mat2* const> tangents,
                    std::span<Vec2* const> directions) = 0;
  /// <v, Du(x_t) v> at the current state.
  virtual double rate(const Vec2& v) const = 0;
};

/// Synthetic driver with a constant velocity gradient (closed-form tests).
class LinearCocycleDriver final : public CocycleDriver {
 public:
  LinearCocycleDriver(const Mat2& g, double dt) : field_(g), g_(g), dt_(dt) {}
  double step_dt() const override { return dt_; }
  void step(std::span<Mat2* const> tangents, std::span<Vec2* const> directions) override;
  double rate(const Vec2& v) const override { return v.dot(g_ * v); }

 private:
  LinearFlowField field_;
  Mat2 g_;
  double dt_;
};

/// Production driver over the coupled stochastic system.
class LagrangianCocycleDriver final : public CocycleDriver {
 public:
  explicit LagrangianCocycleDriver(LagrangianStepper& s) : s_(&s) {}
  double step_dt() const override { return s_->dt(); }
  void step(std::span<Mat2* const> tangents, std::span<Vec2* const> directions) override {
    s_->step(tangents, directions);
  }
  double rate(const Vec2& v) const override { return s_->projective_rate(v); }

 private:
  LagrangianStepper* s_;
};

/// All exponent estimators evaluated in a single pass over one trajectory
/// (shared noise, shared renormalization schedule).
struct ExponentBundle {
  ExponentEstimate norm_top;    // log-norm growth with A <- A/|A| restarts
  ExponentEstimate qr_lambda1;  // Benettin QR, first diagonal
  ExponentEstimate qr_lambda2;  // Benettin QR, second diagonal
  ExponentEstimate projective;  // time average of <v, Du v>
};

/// Engine: runs the trajectory for time T with renormalization every
/// renorm_interval (early restarts when |A| exceeds the overflow guard).
/// Requires T >= 100 * renorm_interval so batch means are meaningful.
ExponentBundle estimate_exponents(CocycleDriver& d, double T, double renorm_interval,
                                  const Vec2& v0 = Vec2(1.0, 0.0));

/// Top exponent from norm growth of the tangent matrix.
ExponentEstimate top_exponent_norm(CocycleDriver& d, double T, double renorm_interval);

/// Both exponents by QR (Benettin) accumulation.
std::pair<ExponentEstimate, ExponentEstimate> spectrum_qr(CocycleDriver& d, double T,
                                                          double renorm_interval);

/// Top exponent as the time average of the projective growth rate.
ExponentEstimate top_exponent_projective(CocycleDriver& d, double T,
                                         const Vec2& v0 = Vec2(1.0, 0.0));

/// Spectral (2-)norm of a 2x2 matrix, closed form.
double spectral_norm(const Mat2& a);

}  // namespace lcl
