#pragma once

#include <cstdint>
#include <limits>

namespace m2m {

/// SplitMix64 bit generator; satisfies UniformRandomBitGenerator so it
/// plugs into the <random> distributions. Cheap to seed, which matters
/// because every station carries its own stream.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(operator()() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Independent substream `stream` of experiment `seed`.
inline SplitMix64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ULL)));
}

// Stream ids reserved above the per-station range.
inline constexpr std::uint64_t kContentionStream = 1ULL << 40;
inline constexpr std::uint64_t kHypothesisStream = (1ULL << 40) + 1;
inline constexpr std::uint64_t kReplicationStream = 1ULL << 41;

}  // namespace m2m
