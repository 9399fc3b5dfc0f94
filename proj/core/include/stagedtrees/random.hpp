#pragma once

#include <cstdint>
#include <random>

namespace stagedtrees {

/// Seeded generator used by every randomized routine.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distributions are implementation-defined, so the
/// bounded-integer and unit-interval draws are done here to keep results
/// identical across platforms. Independent streams are derived from a base
/// seed with `derive_seed(seed, stream)` (SplitMix64 of seed and stream).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace stagedtrees
