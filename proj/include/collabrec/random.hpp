#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace collabrec {

/// Named sub-streams of a master seed. Every random quantity in a run is
/// derived from (master seed, stream, indices), so results do not depend on
/// evaluation order or thread count.
enum class Stream : std::uint64_t {
  Population = 1,
  Sigma = 2,
  Ratings = 3,
  Step = 4,
  Action = 5,
  User = 6,
  Trial = 7,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed) { return seed; }

template <class Tag, class... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t seed, Tag tag, Rest... rest) {
  const auto mixed = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(tag)));
  return derive_seed(mixed, rest...);
}

/// Uniform double in [0, 1) from a single 64-bit value.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return to_unit(engine_()); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, n). Requires n > 0.
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace collabrec
