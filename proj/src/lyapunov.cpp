#include "lcl/lyapunov.hpp"

#include <cmath>

namespace lcl {

namespace {

constexpr double kOverflowGuard = 1e8;

// 2x2 QR with R11 >= 0: returns Q and the diagonal magnitudes of R.
void qr2(const Mat2& a, Mat2& q, double& r11, double& r22) {
  const double r = std::hypot(a(0, 0), a(1, 0));
  double c = 1.0, s = 0.0;
  if (r > 0.0) {
    c = a(0, 0) / r;
    s = a(1, 0) / r;
  }
  r11 = r;
  r22 = std::abs(-s * a(0, 1) + c * a(1, 1));
  q << c, -s, s, c;
}

struct BatchAccumulator {
  double sum = 0.0, sum2 = 0.0;
  int n = 0;
  void add(double y) {
    sum += y;
    sum2 += y * y;
    ++n;
  }
  ExponentEstimate estimate(double horizon) const {
    ExponentEstimate e;
    e.batches = n;
    e.horizon = horizon;
    if (n > 0) e.value = sum / n;
    if (n > 1) {
      const double var = (sum2 - sum * sum / n) / (n - 1);
      e.stderr_ = std::sqrt(std::max(0.0, var) / n);
    }
    return e;
  }
};

}  // namespace

void LinearCocycleDriver::step(std::span<Mat2* const> tangents,
                               std::span<Vec2* const> directions) {
  // position plays no role for a constant gradient; stage at the origin
  ManifoldSubstep s = manifold_substep(field_, Vec2::Zero(), Vec2(1.0, 0.0), dt_, false);
  for (Mat2* a : tangents) *a = tangent_through(s, *a);
  for (Vec2* v : directions) *v = direction_through(s, *v);
}

double spectral_norm(const Mat2& a) {
  const double p = a(0, 0) * a(0, 0) + a(1, 0) * a(1, 0);
  const double q = a(0, 1) * a(0, 1) + a(1, 1) * a(1, 1);
  const double r = a(0, 0) * a(0, 1) + a(1, 0) * a(1, 1);
  const double mean = 0.5 * (p + q);
  const double disc = std::sqrt(std::max(0.0, 0.25 * (p - q) * (p - q) + r * r));
  return std::sqrt(std::max(0.0, mean + disc));
}

ExponentBundle estimate_exponents(CocycleDriver& d, double T, double renorm_interval,
                                  const Vec2& v0) {
  if (renorm_interval <= 0.0) throw ConfigError("estimate_exponents: interval must be > 0");
  if (T < 100.0 * renorm_interval)
    throw ConfigError("estimate_exponents: horizon must cover at least 100 renormalization windows");

  const double dt = d.step_dt();
  const long steps_per_window = std::lround(renorm_interval / dt);
  if (steps_per_window < 1) throw ConfigError("estimate_exponents: interval below step size");
  const long windows = std::lround(T / renorm_interval);

  Mat2 a_norm = Mat2::Identity();
  Mat2 a_qr = Mat2::Identity();
  Vec2 v = v0 / v0.norm();
  Mat2* tangents[2] = {&a_norm, &a_qr};
  Vec2* dirs[1] = {&v};

  BatchAccumulator acc_norm, acc_qr1, acc_qr2, acc_proj;
  double win_norm = 0.0, win_qr1 = 0.0, win_qr2 = 0.0;

  auto renorm = [&]() {
    const double nn = spectral_norm(a_norm);
    win_norm += std::log(nn);
    a_norm /= nn;
    Mat2 q;
    double r11, r22;
    qr2(a_qr, q, r11, r22);
    win_qr1 += std::log(r11);
    win_qr2 += std::log(r22);
    a_qr = q;
  };

  for (long w = 0; w < windows; ++w) {
    double win_proj = 0.0;
    for (long i = 0; i < steps_per_window; ++i) {
      win_proj += d.rate(v) * dt;
      d.step(tangents, dirs);
      if (a_norm.cwiseAbs().maxCoeff() > kOverflowGuard ||
          a_qr.cwiseAbs().maxCoeff() > kOverflowGuard)
        renorm();
    }
    renorm();
    acc_norm.add(win_norm / renorm_interval);
    acc_qr1.add(win_qr1 / renorm_interval);
    acc_qr2.add(win_qr2 / renorm_interval);
    acc_proj.add(win_proj / renorm_interval);
    win_norm = win_qr1 = win_qr2 = 0.0;
  }

  const double horizon = double(windows) * renorm_interval;
  ExponentBundle out;
  out.norm_top = acc_norm.estimate(horizon);
  out.qr_lambda1 = acc_qr1.estimate(horizon);
  out.qr_lambda2 = acc_qr2.estimate(horizon);
  out.projective = acc_proj.estimate(horizon);
  return out;
}

ExponentEstimate top_exponent_norm(CocycleDriver& d, double T, double renorm_interval) {
  return estimate_exponents(d, T, renorm_interval).norm_top;
}

std::pair<ExponentEstimate, ExponentEstimate> spectrum_qr(CocycleDriver& d, double T,
                                                          double renorm_interval) {
  ExponentBundle b = estimate_exponents(d, T, renorm_interval);
  return {b.qr_lambda1, b.qr_lambda2};
}

ExponentEstimate top_exponent_projective(CocycleDriver& d, double T, const Vec2& v0) {
  return estimate_exponents(d, T, 1.0, v0).projective;
}

}  // namespace lcl
