#pragma once

#include <Eigen/Dense>

#include <vector>

#include "lcl/spectral.hpp"

namespace lcl {

/// Uniform n x n sample of a 2-vector field; row-major, index i1*n + i2,
/// grid point x = (2pi i1/n, 2pi i2/n).
struct PhysicalField {
  int n = 0;
  std::vector<double> ux, uy;

  explicit PhysicalField(int n_ = 0) : n(n_), ux(size_t(n_) * n_, 0.0), uy(size_t(n_) * n_, 0.0) {}
  Vec2 point(int i1, int i2) const { return {kTwoPi * i1 / n, kTwoPi * i2 / n}; }
  Vec2 value(int i1, int i2) const {
    const size_t i = size_t(i1) * n + i2;
    return {ux[i], uy[i]};
  }
};

/// FFT workspace for one grid size: fast synthesis/analysis between the
/// {gamma_k e_k} coefficient basis and the physical grid, plus the
/// pseudo-spectral advection product used by the nonlinear term and all
/// linearized couplings.
///
/// Not thread-safe; each worker owns its own instance.  Plans are created
/// with FFTW_ESTIMATE so plan choice (and hence roundoff) is reproducible
/// run to run.
class SpectralWorkspace {
 public:
  explicit SpectralWorkspace(int gridsize);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  int gridsize() const { return n_; }

  /// Exact synthesis on the grid; requires gridsize >= 2*kmax + 2.
  PhysicalField to_grid(const SpectralVelocity& u);

  /// Analysis followed by Leray projection onto the {gamma_k e_k} basis:
  /// a_k = <field, gamma_k e_k> / ||gamma_k e_k||^2.  Gradient parts are
  /// annihilated.  Exact for band-limited input (kmax <= gridsize/2 - 1).
  SpectralVelocity from_grid(const PhysicalField& f, int kmax);

  /// Accumulate sign * Leray((f . grad) g) into out, with the sharp
  /// Fourier mask |k|_inf <= floor(dealias * gridsize / 2) applied before
  /// the final truncation to out.kmax().  dealias < 0 disables the mask.
  void add_advection(const SpectralVelocity& f, const SpectralVelocity& g,
                     double dealias, double sign, SpectralVelocity& out);

 private:
  friend class AdvectionCouplingTable;
  struct Impl;
  Impl* impl_;
  int n_;
};

/// Batched assembly of the advection coupling restricted to a fixed mode
/// list: column j of the output holds the {gamma_k e_k : k in modes}
/// coefficients of -Leray(B(phi_j, u) + B(u, phi_j)), phi_j = gamma_j e_j.
/// Basis grids are synthesized once at construction; assemble() costs six
/// grid transforms for u plus two per column.  The grid must be alias-free
/// for the given bands: gridsize > |modes|_inf + band_inf(u) + max of both.
class AdvectionCouplingTable {
 public:
  AdvectionCouplingTable(const std::vector<WaveVector>& modes, int gridsize);

  /// u is used as-is; the caller truncates it to the band that can
  /// contribute (Euclidean 2*nstar for an nstar output set).
  void assemble(const SpectralVelocity& u, Eigen::MatrixXd& out);

  int gridsize() const { return ws_.gridsize(); }

 private:
  std::vector<WaveVector> modes_;
  SpectralWorkspace ws_;
  // per mode: phi value grids (2) and gradient grids (4)
  std::vector<std::vector<double>> phi_val_, phi_grad_;
};

}  // namespace lcl
