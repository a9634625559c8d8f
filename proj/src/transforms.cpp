#include "lcl/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace lcl {

namespace {
// FFTW planning is not thread-safe; executing plans on distinct buffers is.
std::mutex g_fftw_plan_mutex;
}  // namespace

// Complex half-spectrum layout (r2c): array n x (n/2+1), entry [i1][i2]
// holds the coefficient of exp(i k.x) with k = (k1, k2), k2 = i2 in
// [0, n/2] and k1 = i1 mapped from [0, n) to (-n/2, n/2].  A real field
// u = sum_k a_k gamma_k e_k corresponds, for k in the sine class, to
//   c(k) = gamma_k (-a_{-k} - i a_k) / 2,   c(-k) = conj(c(k)).
// Modes with k2 = 0 need both halves of that row written explicitly.
struct SpectralWorkspace::Impl {
  int n;
  int nc;  // n/2 + 1
  double *r0, *r1, *g11, *g12, *g21, *g22, *w0, *w1;
  fftw_complex *c0, *c1;
  fftw_plan fwd, bwd;

  explicit Impl(int n_) : n(n_), nc(n_ / 2 + 1) {
    const size_t nr = size_t(n) * n;
    const size_t ncplx = size_t(n) * nc;
    r0 = fftw_alloc_real(nr);
    r1 = fftw_alloc_real(nr);
    g11 = fftw_alloc_real(nr);
    g12 = fftw_alloc_real(nr);
    g21 = fftw_alloc_real(nr);
    g22 = fftw_alloc_real(nr);
    w0 = fftw_alloc_real(nr);
    w1 = fftw_alloc_real(nr);
    c0 = fftw_alloc_complex(ncplx);
    c1 = fftw_alloc_complex(ncplx);
    std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
    fwd = fftw_plan_dft_r2c_2d(n, n, r0, c0, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_2d(n, n, c0, r0, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  }

  ~Impl() {
    {
      std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
      fftw_destroy_plan(fwd);
      fftw_destroy_plan(bwd);
    }
    fftw_free(r0);
    fftw_free(r1);
    fftw_free(g11);
    fftw_free(g12);
    fftw_free(g21);
    fftw_free(g22);
    fftw_free(w0);
    fftw_free(w1);
    fftw_free(c0);
    fftw_free(c1);
  }

  void clear_cplx(fftw_complex* c) { std::memset(c, 0, sizeof(fftw_complex) * size_t(n) * nc); }

  int wrap1(int k1) const { return k1 >= 0 ? k1 : k1 + n; }

  // Deposit a complex coefficient (re, im) for the sine-class mode k into
  // the half array, honoring Hermitian symmetry on the k2 = 0 row.
  inline void put(fftw_complex* c, int k1, int k2, double re, double im) {
    if (k2 > 0) {
      fftw_complex& slot = c[size_t(wrap1(k1)) * nc + k2];
      slot[0] += re;
      slot[1] += im;
    } else {  // k2 == 0, k1 > 0: write both k1 and its mirror
      fftw_complex& s1 = c[size_t(k1) * nc];
      s1[0] += re;
      s1[1] += im;
      fftw_complex& s2 = c[size_t(n - k1) * nc];
      s2[0] += re;
      s2[1] -= im;
    }
  }

  // Synthesize the two velocity components of u onto gx, gy.
  void synth_velocity(const SpectralVelocity& u, double* gx, double* gy) {
    const int kmax = u.kmax();
    for (int comp = 0; comp < 2; ++comp) {
      fftw_complex* c = comp == 0 ? c0 : c1;
      clear_cplx(c);
      for (int k2 = 0; k2 <= kmax; ++k2) {
        const int k1lo = (k2 == 0) ? 1 : -kmax;
        for (int k1 = k1lo; k1 <= kmax; ++k1) {
          const double ap = u.coeff({k1, k2});
          const double am = u.coeff({-k1, -k2});
          if (ap == 0.0 && am == 0.0) continue;
          const double n2 = double(k1) * k1 + double(k2) * k2;
          const double g = (comp == 0 ? k2 : -k1) / n2;  // gamma_k component
          put(c, k1, k2, -0.5 * g * am, -0.5 * g * ap);
        }
      }
      fftw_execute_dft_c2r(bwd, c, comp == 0 ? gx : gy);
    }
  }

  // Synthesize the four gradient components d_j u_i.
  void synth_gradient(const SpectralVelocity& u, double* d11, double* d12,
                      double* d21, double* d22) {
    const int kmax = u.kmax();
    double* outs[4] = {d11, d12, d21, d22};
    for (int comp = 0; comp < 4; ++comp) {
      const int i = comp / 2;  // velocity component
      const int j = comp % 2;  // derivative direction
      fftw_complex* c = c0;
      clear_cplx(c);
      for (int k2 = 0; k2 <= kmax; ++k2) {
        const int k1lo = (k2 == 0) ? 1 : -kmax;
        for (int k1 = k1lo; k1 <= kmax; ++k1) {
          const double ap = u.coeff({k1, k2});
          const double am = u.coeff({-k1, -k2});
          if (ap == 0.0 && am == 0.0) continue;
          const double n2 = double(k1) * k1 + double(k2) * k2;
          const double g = (i == 0 ? k2 : -k1) / n2;
          const double kj = (j == 0) ? k1 : k2;
          // i k_j * (-a_{-k} - i a_k)/2 = (k_j a_k - i k_j a_{-k}) / 2
          put(c, k1, k2, 0.5 * g * kj * ap, -0.5 * g * kj * am);
        }
      }
      fftw_execute_dft_c2r(bwd, c, outs[comp]);
    }
  }

  // Analyze the vector field in (w0, w1): project onto gamma_k e_k and
  // accumulate sign * a_k into out for |k|_inf <= cutoff.
  void analyze_leray(int cutoff, double sign, SpectralVelocity& out) {
    fftw_execute_dft_r2c(fwd, w0, c0);
    fftw_execute_dft_r2c(fwd, w1, c1);
    const double inv_n2 = 1.0 / (double(n) * n);
    for (int k2 = 0; k2 <= cutoff; ++k2) {
      const int k1lo = (k2 == 0) ? 1 : -cutoff;
      for (int k1 = k1lo; k1 <= cutoff; ++k1) {
        const size_t idx = size_t(wrap1(k1)) * nc + k2;
        const double nrm2 = double(k1) * k1 + double(k2) * k2;
        const double nrm = std::sqrt(nrm2);
        // unit vector perpendicular to k (gamma_k direction)
        const double gh1 = k2 / nrm, gh2 = -k1 / nrm;
        const double pre = (c0[idx][0] * gh1 + c1[idx][0] * gh2) * inv_n2;
        const double pim = (c0[idx][1] * gh1 + c1[idx][1] * gh2) * inv_n2;
        out.add_coeff({k1, k2}, sign * (-2.0 * nrm * pim));
        out.add_coeff({-k1, -k2}, sign * (-2.0 * nrm * pre));
      }
    }
  }
};

SpectralWorkspace::SpectralWorkspace(int gridsize) : n_(gridsize) {
  if (gridsize < 4 || gridsize % 2 != 0)
    throw ConfigError("SpectralWorkspace: gridsize must be even and >= 4");
  impl_ = new Impl(gridsize);
}

SpectralWorkspace::~SpectralWorkspace() { delete impl_; }

PhysicalField SpectralWorkspace::to_grid(const SpectralVelocity& u) {
  if (n_ < 2 * u.kmax() + 2)
    throw ConfigError("to_grid: gridsize must be >= 2*kmax + 2");
  PhysicalField f(n_);
  impl_->synth_velocity(u, impl_->r0, impl_->r1);
  std::memcpy(f.ux.data(), impl_->r0, sizeof(double) * f.ux.size());
  std::memcpy(f.uy.data(), impl_->r1, sizeof(double) * f.uy.size());
  return f;
}

SpectralVelocity SpectralWorkspace::from_grid(const PhysicalField& f, int kmax) {
  if (f.n != n_) throw ConfigError("from_grid: field resolution differs from workspace");
  if (n_ < 2 * kmax + 2)
    throw ConfigError("from_grid: gridsize must be >= 2*kmax + 2");
  std::memcpy(impl_->w0, f.ux.data(), sizeof(double) * f.ux.size());
  std::memcpy(impl_->w1, f.uy.data(), sizeof(double) * f.uy.size());
  SpectralVelocity out(kmax);
  impl_->analyze_leray(kmax, 1.0, out);
  return out;
}

AdvectionCouplingTable::AdvectionCouplingTable(const std::vector<WaveVector>& modes,
                                               int gridsize)
    : modes_(modes), ws_(gridsize) {
  const int n = gridsize;
  const size_t nr = size_t(n) * n;
  phi_val_.resize(modes.size());
  phi_grad_.resize(modes.size());
  for (size_t j = 0; j < modes.size(); ++j) {
    phi_val_[j].resize(2 * nr);
    phi_grad_[j].resize(4 * nr);
    const WaveVector k = modes[j];
    const Vec2 g = gamma(k);
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2) {
        const Vec2 x{kTwoPi * i1 / n, kTwoPi * i2 / n};
        const double ek = eval_basis(k, x);
        const double dek = eval_basis(-k, x);  // e_k' = e_{-k}
        const size_t i = size_t(i1) * n + i2;
        phi_val_[j][i] = g[0] * ek;
        phi_val_[j][nr + i] = g[1] * ek;
        phi_grad_[j][i] = g[0] * k.k1 * dek;           // d1 phi_1
        phi_grad_[j][nr + i] = g[0] * k.k2 * dek;      // d2 phi_1
        phi_grad_[j][2 * nr + i] = g[1] * k.k1 * dek;  // d1 phi_2
        phi_grad_[j][3 * nr + i] = g[1] * k.k2 * dek;  // d2 phi_2
      }
  }
}

void AdvectionCouplingTable::assemble(const SpectralVelocity& u, Eigen::MatrixXd& out) {
  SpectralWorkspace::Impl& im = *ws_.impl_;
  const int n = ws_.gridsize();
  const size_t nr = size_t(n) * n;
  const int m = int(modes_.size());
  out.resize(m, m);

  im.synth_velocity(u, im.r0, im.r1);
  im.synth_gradient(u, im.g11, im.g12, im.g21, im.g22);

  int cutoff = 0;
  for (const WaveVector& k : modes_) cutoff = std::max(cutoff, k.norm_inf());

  SpectralVelocity col(cutoff);
  for (int j = 0; j < m; ++j) {
    const double* pv = phi_val_[j].data();
    const double* pg = phi_grad_[j].data();
    for (size_t i = 0; i < nr; ++i) {
      // w = phi_j . grad u + u . grad phi_j
      im.w0[i] = pv[i] * im.g11[i] + pv[nr + i] * im.g12[i] +
                 im.r0[i] * pg[i] + im.r1[i] * pg[nr + i];
      im.w1[i] = pv[i] * im.g21[i] + pv[nr + i] * im.g22[i] +
                 im.r0[i] * pg[2 * nr + i] + im.r1[i] * pg[3 * nr + i];
    }
    col.set_zero();
    im.analyze_leray(cutoff, -1.0, col);
    for (int r = 0; r < m; ++r) out(r, j) = col.coeff(modes_[r]);
  }
}

void SpectralWorkspace::add_advection(const SpectralVelocity& f,
                                      const SpectralVelocity& g, double dealias,
                                      double sign, SpectralVelocity& out) {
  if (n_ < 2 * f.kmax() + 2 || n_ < 2 * g.kmax() + 2)
    throw ConfigError("add_advection: gridsize too small for operands");
  Impl& im = *impl_;
  im.synth_velocity(f, im.r0, im.r1);
  im.synth_gradient(g, im.g11, im.g12, im.g21, im.g22);
  const size_t nr = size_t(n_) * n_;
  for (size_t i = 0; i < nr; ++i) {
    im.w0[i] = im.r0[i] * im.g11[i] + im.r1[i] * im.g12[i];
    im.w1[i] = im.r0[i] * im.g21[i] + im.r1[i] * im.g22[i];
  }
  int cutoff = out.kmax();
  if (dealias > 0.0) {
    const int mask = int(std::floor(dealias * (n_ / 2.0)));
    cutoff = std::min(cutoff, mask);
  }
  cutoff = std::min(cutoff, n_ / 2 - 1);
  im.analyze_leray(cutoff, sign, out);
}

}  // namespace lcl
