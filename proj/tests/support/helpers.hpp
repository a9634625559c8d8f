#pragma once

// Shared fixtures for the test suites: small solver configs, random
// fields, and the torus-shift helper used by the equivariance checks.

#include <cmath>

#include "lcl/lab.hpp"

namespace lcl::testing {

// gridsize 28 > 3*kmax keeps the quadratic products strictly alias-free
// (the 3K boundary case lets |k| = 2K products fold onto the corner modes)
inline SolverConfig small_solver(int kmax = 8, int gridsize = 28) {
  SolverConfig cfg;
  cfg.nu = 0.05;
  cfg.dt = 1e-3;
  cfg.kmax = kmax;
  cfg.gridsize = gridsize;
  return cfg;
}

inline SpectralVelocity random_field(int kmax, uint64_t seed, double scale = 1.0) {
  NoiseStream rng(seed, 0);
  SpectralVelocity u(kmax);
  for (double& a : u.raw()) a = scale * rng.gaussian();
  u.raw()[u.index({0, 0})] = 0.0;
  return u;
}

/// u(. + s): each (k, -k) coefficient pair rotates by the phase k.s.
inline SpectralVelocity translate(const SpectralVelocity& u, const Vec2& s) {
  SpectralVelocity out(u.kmax());
  for (int k2 = 0; k2 <= u.kmax(); ++k2) {
    const int k1lo = (k2 == 0) ? 1 : -u.kmax();
    for (int k1 = k1lo; k1 <= u.kmax(); ++k1) {
      const WaveVector k{k1, k2};
      const double ap = u.coeff(k);
      const double am = u.coeff(-k);
      if (ap == 0.0 && am == 0.0) continue;
      const double c = std::cos(k1 * s[0] + k2 * s[1]);
      const double sn = std::sin(k1 * s[0] + k2 * s[1]);
      out.set_coeff(k, c * ap + sn * am);
      out.set_coeff(-k, -sn * ap + c * am);
    }
  }
  return out;
}

}  // namespace lcl::testing
