#pragma once

#include <cstdint>
#include <random>

namespace biserial {

/// Deterministic RNG wrapper. mt19937_64 output is fully specified by the
/// standard, and the bounded draw below avoids std::uniform_int_distribution
/// (whose mapping is implementation-defined), so streams are reproducible
/// across platforms for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  /// Uniform-ish draw in [lo, hi]; modulo bias is irrelevant at the ranges
  /// used here (single-digit spans against a 64-bit stream).
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(gen_() % span);
  }

  std::uint64_t seed() const { return seed_; }

  /// Derives an independent child seed; distinct tags give distinct streams.
  std::uint64_t fork(std::uint64_t tag) const {
    // splitmix64 finalizer over seed ^ tag
    std::uint64_t z = seed_ ^ (tag + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

/// Default seed used by every CLI entry point and test generator unless the
/// caller overrides it.
inline constexpr std::uint64_t kDefaultSeed = 1729;

}  // namespace biserial
