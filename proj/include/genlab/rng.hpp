#pragma once
// Deterministic 64-bit RNG used for every random draw in the library.
// The generator is splitmix64; its full update rule, so a run can be
// reproduced from the docs alone:
//
//   state  <- state + 0x9e3779b97f4a7c15
//   z      <- state
//   z      <- (z xor (z >> 30)) * 0xbf58476d1ce4e5b9
//   z      <- (z xor (z >> 27)) * 0x94d049bb133111eb
//   output <- z xor (z >> 31)
//
// Named streams are derived, not shared: child_seed = mix(seed xor
// fnv1a64(name)), where mix is the finalizer above. Same seed + same
// name always yields the same stream.

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace genlab {

inline constexpr double kPi = 3.14159265358979323846;

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t seed, std::string_view name) {
  return mix64(seed ^ fnv1a64(name));
}

inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return mix64(seed ^ (0x9e3779b97f4a7c15ull * (stream + 1)));
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  // uniform in [0, 1)
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }
  float next_float() { return float(next_u64() >> 40) * 0x1.0p-24f; }

  float uniform(float lo, float hi) { return lo + (hi - lo) * next_float(); }

  // unbiased integer in [0, n), multiply-shift reduction
  uint64_t next_below(uint64_t n) {
    return uint64_t((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // standard normal via Box-Muller; the sine half of the pair is discarded
  // so the draw count per call is fixed
  float gaussian() {
    double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = double(next_u64() >> 11) * 0x1.0p-53;
    return float(std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2));
  }

  // child stream derived from the current state and a name; does not
  // advance this generator
  Rng split(std::string_view name) const { return Rng(derive_seed(state_, name)); }
  Rng split(uint64_t stream) const { return Rng(derive_seed(state_, stream)); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = size_t(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

}  // namespace genlab
