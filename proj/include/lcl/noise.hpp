#pragma once

#include <cstdint>

namespace lcl {

/// Counter-based Gaussian stream: every draw is a pure function of
/// (seed, stream_id, counter), so replaying a (seed, stream_id) pair
/// reproduces the path bit-exactly and distinct stream ids give
/// statistically independent streams regardless of scheduling order.
class NoiseStream {
 public:
  NoiseStream() = default;
  NoiseStream(uint64_t seed, uint64_t stream_id, uint64_t counter = 0)
      : seed_(seed), stream_(stream_id), counter_(counter) {}

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_; }
  uint64_t counter() const { return counter_; }
  void set_counter(uint64_t c) { counter_ = c; }

  /// Standard normal draw; advances the counter by one.
  double gaussian();

  /// Uniform draw on [0, 1); advances the counter by one.
  double uniform();

  /// Stateless evaluation at an explicit counter (replay/testing).
  static double gaussian_at(uint64_t seed, uint64_t stream_id, uint64_t counter);

 private:
  uint64_t seed_ = 0;
  uint64_t stream_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace lcl
