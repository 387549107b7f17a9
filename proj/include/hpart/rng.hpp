#pragma once

#include <cstdint>
#include <random>

namespace hpart {

// Sub-seed scheme: a child seed is splitmix64(splitmix64(seed ^ stream * phi) + index).
// Streams keep unrelated consumers of one parent seed (split sampling,
// repetition runs, held-out edge masks, ...) from ever sharing a sequence.
enum class Stream : std::uint64_t {
  split_retry = 1,
  repetition = 2,
  heldout = 3,
  subspace = 4,
  samples = 5,
  instance = 6,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0) noexcept;

/// Seeded generator with distribution code written out by hand, so draws do
/// not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  /// Standard normal via Box-Muller (one value per call, the pair is cached).
  double normal();
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hpart
