#include <doctest.h>

#include "support/helpers.hpp"

using namespace lcl;
using lcl::testing::random_field;
using lcl::testing::small_solver;

TEST_CASE("single shear modes decay at the exact viscous rate") {
  // (u . grad)u vanishes for one mode, so the linear part carries the
  // whole step and the decay is exact for any dt
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(4, 5.5, 0.0);
  SnsSolver solver(cfg, forcing);
  NoiseStream rng(1, 1);
  for (int k1 = -4; k1 <= 4; ++k1)
    for (int k2 = -4; k2 <= 4; ++k2) {
      const WaveVector k{k1, k2};
      if (k.is_zero() || k.norm2() > 16.0) continue;
      SnsState st;
      st.u = SpectralVelocity(cfg.kmax);
      st.u.set_coeff(k, 1.0);
      for (int i = 0; i < 1000; ++i) solver.step(st, rng);
      const double expect = std::exp(-cfg.nu * k.norm2());
      CHECK(std::abs(st.u.coeff(k) - expect) / expect < 1e-10);
    }
}

TEST_CASE("zero field with zero amplitude stays zero") {
  SolverConfig cfg = small_solver();
  SnsSolver solver(cfg, ForcingSpec(2, 5.5, 0.0));
  SnsState st;
  st.u = SpectralVelocity(cfg.kmax);
  NoiseStream rng(1, 1);
  for (int i = 0; i < 100; ++i) solver.step(st, rng);
  CHECK(energy(st.u) == 0.0);
  CHECK(st.t == doctest::Approx(0.1));
}

TEST_CASE("OU stationary variance of a forced mode, advection disabled") {
  SolverConfig cfg = small_solver();
  cfg.nu = 1.0;  // short correlation time so 1e5 steps average well
  cfg.enable_nonlinear = false;
  ForcingSpec forcing(2, 5.5, 1.0);
  SnsSolver solver(cfg, forcing);
  SnsState st;
  st.u = SpectralVelocity(cfg.kmax);
  NoiseStream rng(2024, 1);

  const WaveVector k{1, 0};
  const double q = forcing.q_of(k);
  const double target = q * q / (2.0 * cfg.nu);

  const int nsteps = 300000, nbatch = 100;
  const int per = nsteps / nbatch;
  std::vector<double> batch(nbatch, 0.0);
  for (int b = 0; b < nbatch; ++b) {
    for (int i = 0; i < per; ++i) {
      solver.step(st, rng);
      const double a = st.u.coeff(k);
      batch[b] += a * a;
    }
    batch[b] /= per;
  }
  // discard the first batches as transient, batch means for the error bar
  double mean = 0.0;
  const int skip = 10;
  for (int b = skip; b < nbatch; ++b) mean += batch[b];
  mean /= (nbatch - skip);
  double var = 0.0;
  for (int b = skip; b < nbatch; ++b) var += (batch[b] - mean) * (batch[b] - mean);
  const double stderr_ = std::sqrt(var / (nbatch - skip - 1) / (nbatch - skip));
  CHECK(std::abs(mean - target) < 3.0 * stderr_);
}

TEST_CASE("advection term: shear-mode kernel and energy neutrality") {
  SolverConfig cfg = small_solver();
  SnsSolver solver(cfg, ForcingSpec(2, 5.5, 0.0));

  SpectralVelocity shear(cfg.kmax);
  shear.set_coeff({1, 0}, 1.0);
  CHECK(std::sqrt(energy(solver.nonlinear_term(shear))) < 1e-14);

  CHECK(energy(solver.nonlinear_term(SpectralVelocity(cfg.kmax))) == 0.0);

  for (uint64_t seed : {11u, 12u, 13u}) {
    const SpectralVelocity u = random_field(cfg.kmax, seed, 0.7);
    const SpectralVelocity b = solver.nonlinear_term(u);
    CHECK(std::abs(proxy_dot(b, u)) < 1e-10);
  }
}

TEST_CASE("energy is non-increasing without forcing") {
  SolverConfig cfg = small_solver();
  SnsSolver solver(cfg, ForcingSpec(2, 5.5, 0.0));
  SnsState st;
  st.u = random_field(cfg.kmax, 31, 0.5);
  NoiseStream rng(1, 1);
  double prev = energy(st.u);
  for (int i = 0; i < 200; ++i) {
    solver.step(st, rng);
    const double e = energy(st.u);
    CHECK(e <= prev * (1.0 + 1e-14));
    prev = e;
  }
}

TEST_CASE("noise lands exactly on the forced set") {
  SolverConfig cfg = small_solver();
  cfg.enable_nonlinear = false;
  ForcingSpec forcing(2, 5.5, 1.0);
  SnsSolver solver(cfg, forcing);
  SnsState st;
  st.u = SpectralVelocity(cfg.kmax);
  NoiseStream rng(5, 1);
  for (int i = 0; i < 50; ++i) solver.step(st, rng);
  st.u.for_each([&](WaveVector k, double a) {
    if (k.norm2() <= 4.0)
      CHECK(a != 0.0);  // every forced mode has been hit
    else
      CHECK(a == 0.0);  // nothing outside 0 < |k| <= nstar
  });
}

TEST_CASE("identical seeds give bit-identical trajectories") {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 0.8);
  SnsSolver s1(cfg, forcing), s2(cfg, forcing);
  SnsState a, b;
  a.u = b.u = SpectralVelocity(cfg.kmax);
  NoiseStream r1(7, 3), r2(7, 3);
  for (int i = 0; i < 500; ++i) {
    s1.step(a, r1);
    s2.step(b, r2);
  }
  CHECK(a.u.raw() == b.u.raw());
}

TEST_CASE("burn-in bounds and trajectory blow-up diagnostics") {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 0.5);
  SnsSolver solver(cfg, forcing);
  SnsState st;
  st.u = SpectralVelocity(cfg.kmax);
  NoiseStream rng(3, 1);
  solver.burn_in(st, rng, 0.0);
  CHECK(st.t == 0.0);
  solver.burn_in(st, rng, 2.0);
  CHECK(st.t == doctest::Approx(2.0));
  CHECK(std::isfinite(enstrophy(st.u)));

  st.u.set_coeff({1, 0}, std::nan(""));
  CHECK_THROWS_AS(solver.step(st, rng), BlowupError);
}

TEST_CASE("configuration guards") {
  SolverConfig cfg = small_solver();
  cfg.gridsize = 20;  // < 3 kmax
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_solver();
  cfg.dt = 1e3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_solver();
  ForcingSpec forcing(10, 5.5, 1.0);  // nstar > kmax
  CHECK_THROWS_AS(SnsSolver(cfg, forcing), ConfigError);
}

TEST_CASE("burned-in energy statistics are seed-independent") {
  // two-sample Kolmogorov-Smirnov on energy samples from different seeds;
  // nu = 1 keeps the energy correlation time ~0.5 so samples two time
  // units apart are effectively independent
  SolverConfig cfg = small_solver();
  cfg.nu = 1.0;
  ForcingSpec forcing(2, 5.5, 0.8);
  auto sample = [&](uint64_t stream) {
    SnsSolver solver(cfg, forcing);
    SnsState st;
    st.u = SpectralVelocity(cfg.kmax);
    NoiseStream rng(99, stream);
    solver.burn_in(st, rng, 5.0);
    std::vector<double> es;
    for (int i = 0; i < 100; ++i) {
      solver.burn_in(st, rng, 2.0);  // decorrelate between samples
      es.push_back(energy(st.u));
    }
    std::sort(es.begin(), es.end());
    return es;
  };
  const std::vector<double> a = sample(1), b = sample(2);
  // two-sample KS statistic
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  const double ne = std::sqrt(double(a.size()) * b.size() / double(a.size() + b.size()));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double p = 0.0;
  for (int t = 1; t <= 100; ++t) p += 2.0 * std::pow(-1.0, t - 1) * std::exp(-2.0 * t * t * lambda * lambda);
  CHECK(p > 0.01);
}
