#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace smm {

// SplitMix64 finalizer. Used to turn (base seed, replica index) into
// well-separated engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of replica `index` under `base`: base xor index, then mixed.
constexpr std::uint64_t replica_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(base ^ index);
}

// Seeded 64-bit Mersenne Twister with the few draws the generators need.
// Uniform and binomial(d, 1/2) draws are computed from raw engine output so
// they do not depend on the standard library's distribution algorithms.
class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  engine_type& engine() noexcept { return engine_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Binomial(trials, 1/2) as the popcount of `trials` fair bits.
  int fair_binomial(int trials) {
    int count = 0;
    while (trials > 0) {
      const int take = trials < 64 ? trials : 64;
      std::uint64_t bits = engine_();
      if (take < 64) bits &= (std::uint64_t{1} << take) - 1;
      count += std::popcount(bits);
      trials -= take;
    }
    return count;
  }

  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(engine_);
  }

 private:
  std::uint64_t seed_;
  engine_type engine_;
};

}  // namespace smm
