#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace bcsoftmax {

/// The one PRNG used everywhere: a 64-bit Mersenne Twister keyed by
/// (seed, stream). Distinct streams give independent sequences for the same
/// seed, so each command or worker can own one.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  Rng split(std::uint64_t stream) { return Rng(engine_(), stream); }

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  /// Draws i with probability p_i (p need not be normalized exactly).
  std::size_t categorical(std::span<const double> p) {
    return std::discrete_distribution<std::size_t>(p.begin(), p.end())(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bcsoftmax
