#pragma once

#include <cstdint>

// Counter-based pseudorandomness. Every random object in the library is a
// pure function of a 64-bit seed; child streams are derived by folding
// integer labels into a parent seed, so results never depend on call order.
//
// Derivation rule (tests re-derive this independently):
//   mix64(z)        = splitmix64 finalizer (xor-shift-multiply chain)
//   seed_fold(s, v) = mix64((s + kGoldenGamma) ^ mix64(v))
//   stream SplitMix64(s): next() = mix64(s += kGoldenGamma)

namespace forkcode {

inline constexpr uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

constexpr uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr uint64_t seed_fold(uint64_t seed, uint64_t value) {
  return mix64((seed + kGoldenGamma) ^ mix64(value));
}

template <typename... Rest>
constexpr uint64_t seed_fold(uint64_t seed, uint64_t value, Rest... rest) {
  return seed_fold(seed_fold(seed, value), rest...);
}

// Stream labels, folded right after the seed so that the same master seed
// can safely feed unrelated consumers.
namespace stream_tag {
inline constexpr uint64_t kMatrixRow = 0x4D415452ull;     // hash matrix rows
inline constexpr uint64_t kSampleBlock = 0x53414D50ull;   // i.i.d. block sampling
inline constexpr uint64_t kTrialSample = 0x54534D50ull;   // per-trial source data
inline constexpr uint64_t kTrialCode = 0x54434F44ull;     // per-trial encoder seeds
inline constexpr uint64_t kConstructLevel = 0x4C45564Cull; // fork-code level seeds
}  // namespace stream_tag

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(uint64_t seed) : state_(seed) {}

  constexpr uint64_t next() { return mix64(state_ += kGoldenGamma); }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound), bound > 0. Rejection-free is not needed
  // at our scales; modulo bias is < 2^-40 for bound < 2^24.
  uint64_t next_below(uint64_t bound) { return next() % bound; }

 private:
  uint64_t state_;
};

}  // namespace forkcode
