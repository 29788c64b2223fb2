#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace erglab {

// SplitMix64 finalizer (Steele, Lea & Flood). Used only to derive stream
// seeds; the streams themselves are std::mt19937_64.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for the child stream `index` of `parent`. Children of distinct
/// parents or indices are decorrelated by two rounds of the finalizer.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::uint64_t index) noexcept {
  return splitmix64(splitmix64(parent) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// A per-replica random stream. Satisfies UniformRandomBitGenerator so the
/// std distributions can draw from it directly.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Child stream derived from (master_seed, index...). Identical inputs
  /// always yield the identical stream, independent of thread layout.
  static Rng stream(std::uint64_t master, std::uint64_t index) {
    return Rng(derive_seed(master, index));
  }
  static Rng stream(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return Rng(derive_seed(derive_seed(master, a), b));
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform variate on the open interval (0,1): midpoints of a 2^-53 grid.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace erglab
