#include "lcl/noise.hpp"

#include <cmath>

namespace lcl {

namespace {

// splitmix64 finalizer: full-avalanche 64-bit mixer.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t key_word(uint64_t seed, uint64_t stream, uint64_t counter, uint64_t lane) {
  uint64_t h = mix64(seed);
  h = mix64(h ^ stream);
  h = mix64(h ^ counter);
  return mix64(h ^ lane);
}

// top 53 bits -> (0, 1]; never returns 0 so log() below is safe.
inline double to_unit_open(uint64_t w) {
  return ((w >> 11) + 1) * 0x1.0p-53;
}

inline double gaussian_from(uint64_t seed, uint64_t stream, uint64_t counter) {
  // Box-Muller, cosine branch only: rejection-free, so one draw consumes
  // exactly one counter tick and replay stays addressable.
  const double u1 = to_unit_open(key_word(seed, stream, counter, 1));
  const double u2 = to_unit_open(key_word(seed, stream, counter, 2));
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace

double NoiseStream::gaussian() { return gaussian_from(seed_, stream_, counter_++); }

double NoiseStream::uniform() {
  const uint64_t w = key_word(seed_, stream_, counter_++, 3);
  return double(w >> 11) * 0x1.0p-53;
}

double NoiseStream::gaussian_at(uint64_t seed, uint64_t stream_id, uint64_t counter) {
  return gaussian_from(seed, stream_id, counter);
}

}  // namespace lcl
