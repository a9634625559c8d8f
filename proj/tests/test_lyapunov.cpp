#include <doctest.h>

#include "support/helpers.hpp"

using namespace lcl;
using lcl::testing::small_solver;

TEST_CASE("constant hyperbolic gradient: all three estimators agree") {
  Mat2 g;
  g << 0.3, 0.0, 0.0, -0.3;
  LinearCocycleDriver d(g, 1e-3);
  const ExponentBundle b = estimate_exponents(d, 150.0, 1.0, Vec2(1.0, 0.0));
  CHECK(std::abs(b.norm_top.value - 0.3) < 1e-6);
  CHECK(std::abs(b.qr_lambda1.value - 0.3) < 1e-6);
  CHECK(std::abs(b.qr_lambda2.value + 0.3) < 1e-6);
  CHECK(std::abs(b.projective.value - 0.3) < 1e-6);
  CHECK(b.norm_top.batches == 150);
}

TEST_CASE("isometric rotation cocycle has zero exponents") {
  Mat2 g;
  g << 0.0, 1.0, -1.0, 0.0;
  LinearCocycleDriver d(g, 1e-3);
  auto [l1, l2] = spectrum_qr(d, 120.0, 1.0);
  CHECK(std::abs(l1.value) < 1e-8);
  CHECK(std::abs(l2.value) < 1e-8);
}

TEST_CASE("zero velocity gives exactly zero") {
  LinearCocycleDriver d(Mat2::Zero(), 1e-2);
  const ExponentEstimate e = top_exponent_norm(d, 110.0, 1.0);
  CHECK(e.value == 0.0);
  CHECK(e.stderr_ == 0.0);
}

TEST_CASE("horizon precondition") {
  LinearCocycleDriver d(Mat2::Zero(), 1e-2);
  CHECK_THROWS_AS(top_exponent_norm(d, 50.0, 1.0), ConfigError);
}

TEST_CASE("overflow guard renormalizes early without bias") {
  Mat2 g;
  g << 5.0, 0.0, 0.0, -5.0;  // |A| passes 1e8 well inside a unit window
  LinearCocycleDriver d(g, 1e-3);
  const ExponentEstimate e = top_exponent_norm(d, 120.0, 1.0);
  CHECK(std::abs(e.value - 5.0) < 1e-5);
}

TEST_CASE("real trajectory: estimator consistency at short horizon") {
  SolverConfig cfg = small_solver();
  ForcingSpec forcing(2, 5.5, 0.8);
  auto run = [&](double interval) {
    LagrangianStepper s(cfg, forcing, NoiseStream(4, 1), Vec2(0.4, 2.7), Vec2(1.0, 0.0));
    s.burn_in(2.0);
    LagrangianCocycleDriver d(s);
    return estimate_exponents(d, 100.0, interval);
  };
  const ExponentBundle a = run(0.5);

  // conservative pairing: lambda1 + lambda2 is the log-det drift, ~0
  CHECK(std::abs(a.qr_lambda1.value + a.qr_lambda2.value) < 1e-6);

  // norm-growth and QR routes see the same top exponent
  const double tol = 2.0 * std::hypot(a.norm_top.stderr_, a.qr_lambda1.stderr_) + 5e-3;
  CHECK(std::abs(a.norm_top.value - a.qr_lambda1.value) < tol);

  // doubling the renormalization interval moves the value within noise
  const ExponentBundle b = run(1.0);
  CHECK(std::abs(a.qr_lambda1.value - b.qr_lambda1.value) <
        a.qr_lambda1.stderr_ + b.qr_lambda1.stderr_ + 1e-9);
}
