#include "lcl/wavevector.hpp"

#include <cmath>
#include <cstdlib>

namespace lcl {

double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

Vec2 wrap_torus(const Vec2& x) { return {wrap_angle(x[0]), wrap_angle(x[1])}; }

double WaveVector::norm() const { return std::sqrt(norm2()); }

int WaveVector::norm_inf() const { return std::max(std::abs(k1), std::abs(k2)); }

bool in_positive_class(WaveVector k) {
  return k.k2 > 0 || (k.k2 == 0 && k.k1 > 0);
}

double eval_basis(WaveVector k, const Vec2& x) {
  if (k.is_zero()) throw std::invalid_argument("eval_basis: k = 0 has no basis function");
  const double phase = k.k1 * x[0] + k.k2 * x[1];
  return in_positive_class(k) ? std::sin(phase) : std::cos(phase);
}

Vec2 gamma(WaveVector k) {
  if (k.is_zero()) throw std::invalid_argument("gamma: k = 0");
  const double n2 = k.norm2();
  return {k.k2 / n2, -k.k1 / n2};
}

}  // namespace lcl
