#include "hpart/rng.hpp"

#include <cmath>
#include <numbers>

#include "hpart/error.hpp"

namespace hpart {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "ValidationError";
    case ErrorKind::insufficient_split: return "InsufficientSplit";
    case ErrorKind::coverage_failure: return "CoverageFailure";
    case ErrorKind::merge_conflict: return "MergeConflict";
    case ErrorKind::no_signal: return "NoSignal";
    case ErrorKind::degenerate_gap: return "DegenerateGap";
    case ErrorKind::config: return "ConfigError";
  }
  return "Error";
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept {
  const auto tag = static_cast<std::uint64_t>(stream) * 0x9e3779b97f4a7c15ULL;
  return splitmix64(splitmix64(seed ^ tag) + index);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  // rejection sampling to avoid modulo bias
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return lo + static_cast<std::int64_t>(draw % span);
}

}  // namespace hpart
