#pragma once

// Seeded random streams whose output is identical on every platform: the
// engine is std::mt19937_64 (fully specified by the standard) and the
// floating-point conversions are done here rather than through the
// implementation-defined <random> distributions.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace secdsc {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based hash of (seed, stream, index); used where a value must not
// depend on how many other values were drawn before it.
constexpr std::uint64_t hash64(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t index) noexcept {
  return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream)
      : engine_(mix64(seed ^ mix64(stream))) {}

  std::uint64_t next() { return engine_(); }
  double uniform() { return to_unit(engine_()); }
  // Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n);
  // Index drawn from a probability vector by inversion.
  std::size_t categorical(std::span<const double> probs);
  // Point drawn uniformly from the (k-1)-simplex.
  std::vector<double> simplex_point(std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace secdsc
