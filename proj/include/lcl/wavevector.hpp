#pragma once

#include <cstdint>
#include <functional>

#include "lcl/types.hpp"

namespace lcl {

/// Integer wavevector on Z^2 \ {0}.
///
/// The index set splits into two halves: k is in the "sine" half Z2+ when
/// k2 > 0, or k2 = 0 and k1 > 0; the mirrored half Z2- = -Z2+ carries the
/// cosines.  Together {e_k} is a real orthogonal basis of mean-zero
/// functions on the torus [0,2pi]^2.
struct WaveVector {
  int k1 = 0;
  int k2 = 0;

  friend bool operator==(const WaveVector&, const WaveVector&) = default;
  WaveVector operator-() const { return {-k1, -k2}; }

  double norm2() const { return double(k1) * k1 + double(k2) * k2; }
  double norm() const;
  int norm_inf() const;
  bool is_zero() const { return k1 == 0 && k2 == 0; }
};

/// True iff k lies in the sine half Z2+ of the index set.
bool in_positive_class(WaveVector k);

/// e_k(x): sin(k.x) on Z2+, cos(k.x) on Z2-.  k = 0 is a domain violation.
double eval_basis(WaveVector k, const Vec2& x);

/// gamma_k = -k_perp / |k|^2 with the convention k_perp = (-k2, k1),
/// i.e. gamma_k = (k2, -k1)/|k|^2.  Contract: k . gamma_k = 0 and
/// |gamma_k| = 1/|k|; the sign of the perp is a fixed internal convention.
Vec2 gamma(WaveVector k);

/// Lexicographic order by (k1, k2); fixes mode enumeration everywhere.
inline bool lex_less(WaveVector a, WaveVector b) {
  return (a.k1 != b.k1) ? a.k1 < b.k1 : a.k2 < b.k2;
}

}  // namespace lcl
