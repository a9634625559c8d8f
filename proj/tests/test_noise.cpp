#include <doctest.h>

#include <cmath>

#include "support/helpers.hpp"

using namespace lcl;

TEST_CASE("replaying a (seed, stream) pair is bit-exact") {
  NoiseStream a(42, 7);
  std::vector<double> first;
  for (int i = 0; i < 100; ++i) first.push_back(a.gaussian());
  NoiseStream b(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(b.gaussian() == first[i]);
  // counter addressing gives the same draws
  for (int i = 0; i < 100; ++i) CHECK(NoiseStream::gaussian_at(42, 7, i) == first[i]);
}

TEST_CASE("checkpointed counters resume the path") {
  NoiseStream a(5, 1);
  for (int i = 0; i < 17; ++i) a.gaussian();
  NoiseStream resumed(5, 1, a.counter());
  NoiseStream reference(5, 1);
  for (int i = 0; i < 17; ++i) reference.gaussian();
  for (int i = 0; i < 50; ++i) CHECK(resumed.gaussian() == reference.gaussian());
}

TEST_CASE("distinct streams decorrelate") {
  const int n = 20000;
  NoiseStream a(9, 1), b(9, 2);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xa = a.gaussian(), xb = b.gaussian();
    dot += xa * xb;
    na += xa * xa;
    nb += xb * xb;
  }
  CHECK(std::abs(dot / std::sqrt(na * nb)) < 0.03);
}

TEST_CASE("gaussian moments") {
  NoiseStream a(123, 0);
  const int n = 200000;
  double mean = 0.0, var = 0.0, kurt = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = a.gaussian();
    mean += x;
    var += x * x;
    kurt += x * x * x * x;
  }
  mean /= n;
  var /= n;
  kurt /= n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.01));
  CHECK(kurt == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("uniform draws stay in [0, 1)") {
  NoiseStream a(77, 3);
  double lo = 1.0, hi = 0.0, mean = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = a.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    mean += u;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(mean / n == doctest::Approx(0.5).epsilon(0.01));
}
