#include "lcl/brackets.hpp"

#include <map>
#include <memory>
#include <mutex>

#include "lcl/noise.hpp"
#include "lcl/transforms.hpp"

namespace lcl {

namespace {

// Workspaces for the small-grid advection products, cached per grid size.
SpectralWorkspace& coupling_workspace(int gridsize) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<SpectralWorkspace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[gridsize];
  if (!slot) slot = std::make_unique<SpectralWorkspace>(gridsize);
  return *slot;
}

Vec2 tangent_project(const Vec2& v, const Vec2& w) { return w - v * (v.dot(w)); }

}  // namespace

BundleVector fbar_eval(const SpectralVelocity& u, const ForcingSpec& forcing,
                       const Vec2& x, const Vec2& v) {
  BundleVector out;
  for (WaveVector k : forcing.modes()) {
    const double a = u.coeff(k);
    if (a == 0.0) continue;
    const Vec2 g = gamma(k);
    out.bx += a * eval_basis(k, x) * g;
    const double kv = k.k1 * v[0] + k.k2 * v[1];
    out.bv += a * kv * eval_basis(-k, x) * tangent_project(v, g);
  }
  return out;
}

BundleVector bracket_ek_fbar(const Vec2& x, const Vec2& v, WaveVector k) {
  BundleVector out;
  const Vec2 g = gamma(k);
  out.bx = eval_basis(k, x) * g;
  const double kv = k.k1 * v[0] + k.k2 * v[1];
  out.bv = kv * eval_basis(-k, x) * tangent_project(v, g);
  return out;
}

int spanning_rank(const Vec2& x, const Vec2& v, const std::vector<WaveVector>& K,
                  double tol) {
  if (K.empty()) return 0;
  const Vec2 vperp(-v[1], v[0]);
  Eigen::MatrixXd cols(3, K.size());
  for (size_t j = 0; j < K.size(); ++j) {
    const BundleVector b = bracket_ek_fbar(x, v, K[j]);
    cols(0, j) = b.bx[0];
    cols(1, j) = b.bx[1];
    cols(2, j) = b.bv.dot(vperp);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++rank;
  return rank;
}

LowModeField upsilon_q(const SpectralVelocity& u, const ForcingSpec& forcing,
                       const Vec2& x, const Vec2& v, WaveVector k, double nu) {
  const int nstar = forcing.nstar();
  if (k.is_zero() || k.norm2() > double(nstar) * nstar)
    throw std::invalid_argument("upsilon_q: k outside the forced set");
  const double qk = forcing.q_of(k);

  // velocity block: advection bracket + dissipation bracket
  const int band = std::min(u.kmax(), 2 * nstar);
  SpectralVelocity ut(band);
  u.for_each([&](WaveVector j, double a) {
    if (a != 0.0 && j.norm_inf() <= band) ut.set_coeff(j, a);
  });
  SpectralVelocity phik(band);
  phik.set_coeff(k, 1.0);

  SpectralVelocity adv(nstar);
  SpectralWorkspace& ws = coupling_workspace(4 * nstar + 2);
  ws.add_advection(ut, phik, -1.0, 1.0, adv);
  ws.add_advection(phik, ut, -1.0, 1.0, adv);

  LowModeField out;
  const auto& modes = forcing.modes();
  out.fu = Eigen::VectorXd::Zero(modes.size());
  for (size_t i = 0; i < modes.size(); ++i) out.fu[i] = qk * adv.coeff(modes[i]);
  const int ik = int(std::find_if(modes.begin(), modes.end(),
                                  [&](WaveVector m) { return m == k; }) -
                     modes.begin());
  out.fu[ik] += qk * nu * k.norm2();

  // manifold block: q_k [Fbar, e_k gamma_k] = -q_k [e_k gamma_k, Fbar]
  const BundleVector b = bracket_ek_fbar(x, v, k);
  out.fxv.bx = -qk * b.bx;
  out.fxv.bv = -qk * b.bv;
  return out;
}

LowerBoundReport lower_bound_check(const SpectralVelocity& u, const ForcingSpec& forcing,
                                   const Vec2& x, const Vec2& v, double nu,
                                   int samples, uint64_t seed) {
  const auto& modes = forcing.modes();
  const int m = int(modes.size());
  std::vector<LowModeField> ups;
  ups.reserve(m);
  for (WaveVector k : modes) ups.push_back(upsilon_q(u, forcing, x, v, k, nu));

  const Vec2 vperp(-v[1], v[0]);
  NoiseStream rng(seed, 0);
  LowerBoundReport rep;
  rep.samples = samples;
  rep.min_pairing = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd hu(m);
    for (int i = 0; i < m; ++i) hu[i] = rng.gaussian();
    Vec2 hx(rng.gaussian(), rng.gaussian());
    Vec2 hv = rng.gaussian() * vperp;
    const double nrm = std::sqrt(hu.squaredNorm() + hx.squaredNorm() + hv.squaredNorm());
    hu /= nrm;
    hx /= nrm;
    hv /= nrm;

    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      const double pq = std::abs(forcing.q()[i] * hu[i]);
      const double pu = std::abs(ups[i].fu.dot(hu) + ups[i].fxv.bx.dot(hx) +
                                 ups[i].fxv.bv.dot(hv));
      best = std::max({best, pq, pu});
    }
    rep.min_pairing = std::min(rep.min_pairing, best);
    sum += best;
  }
  rep.mean_pairing = samples > 0 ? sum / samples : 0.0;
  rep.strictly_positive = rep.min_pairing > 0.0;
  return rep;
}

}  // namespace lcl
