#pragma once

#include <vector>

#include "lcl/wavevector.hpp"

namespace lcl {

/// Power-law noise profile on the low modes: q_k = amplitude * |k|^-alpha
/// for 0 < |k| <= nstar (Euclidean norm), absent elsewhere.
///
/// The forced set and its enumeration order are fixed at construction
/// (lexicographic in (k1,k2)) so noise draws are reproducible and the
/// low-mode linear algebra has a stable coordinate system.
class ForcingSpec {
 public:
  ForcingSpec() = default;
  ForcingSpec(int nstar, double alpha, double amplitude);

  int nstar() const { return nstar_; }
  double alpha() const { return alpha_; }
  double amplitude() const { return amplitude_; }

  /// Forced modes, lexicographically ordered; m = modes().size().
  const std::vector<WaveVector>& modes() const { return modes_; }
  int mode_count() const { return int(modes_.size()); }

  /// q values aligned with modes().
  const std::vector<double>& q() const { return q_; }

  double q_of(WaveVector k) const;

  /// Total injected variance E_0 = sum_k q_k^2, recomputed from fields.
  double total_variance() const;

 private:
  int nstar_ = 0;
  double alpha_ = 0.0;
  double amplitude_ = 0.0;
  std::vector<WaveVector> modes_;
  std::vector<double> q_;
};

}  // namespace lcl
