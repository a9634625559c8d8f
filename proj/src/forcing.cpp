#include "lcl/forcing.hpp"

#include <cmath>

namespace lcl {

ForcingSpec::ForcingSpec(int nstar, double alpha, double amplitude)
    : nstar_(nstar), alpha_(alpha), amplitude_(amplitude) {
  if (nstar < 1) throw ConfigError("ForcingSpec: nstar must be >= 1");
  if (amplitude < 0.0) throw ConfigError("ForcingSpec: amplitude must be >= 0");
  const double r2 = double(nstar) * nstar;
  for (int k1 = -nstar; k1 <= nstar; ++k1)
    for (int k2 = -nstar; k2 <= nstar; ++k2) {
      WaveVector k{k1, k2};
      if (k.is_zero() || k.norm2() > r2) continue;
      modes_.push_back(k);
      q_.push_back(amplitude * std::pow(k.norm2(), -0.5 * alpha));
    }
}

double ForcingSpec::q_of(WaveVector k) const {
  if (k.is_zero() || k.norm2() > double(nstar_) * nstar_) return 0.0;
  return amplitude_ * std::pow(k.norm2(), -0.5 * alpha_);
}

double ForcingSpec::total_variance() const {
  double sum = 0.0;
  for (double q : q_) sum += q * q;
  return sum;
}

}  // namespace lcl
