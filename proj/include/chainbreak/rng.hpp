#pragma once

// Seedable, splittable random streams.
//
// Every random quantity in the library is drawn from a substream identified
// by (master seed, purpose tag, index a, index b).  Substreams are derived by
// hashing, so a read's draws do not depend on which thread runs it or on how
// many other reads ran before it.

#include <array>
#include <cstdint>
#include <limits>

namespace chainbreak {

/// SplitMix64 finalizer.  Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// xoshiro256** by Blackman and Vigna.  Satisfies UniformRandomBitGenerator,
/// so it plugs into the <random> distributions.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit Xoshiro256(std::uint64_t seed = 0) noexcept { reseed(seed); }

  constexpr void reseed(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& word : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      word = mix64(x);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  friend constexpr bool operator==(const Xoshiro256&, const Xoshiro256&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

/// Purpose tags keep the streams for different jobs disjoint even when they
/// share a master seed and indices.
enum class StreamTag : std::uint64_t {
  qubo = 1,
  chain_jitter = 2,
  perturb = 3,
  anneal = 4,
  margin = 5,
  tie_break = 6,
  chain_error = 7,
  experiment = 8,
};

constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag,
                                    std::uint64_t a = 0,
                                    std::uint64_t b = 0) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(tag));
  h = mix64(h ^ mix64(a + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ mix64(b + 0x85157af5ULL));
  return h;
}

constexpr Xoshiro256 substream(std::uint64_t seed, StreamTag tag,
                               std::uint64_t a = 0, std::uint64_t b = 0) noexcept {
  return Xoshiro256{derive_seed(seed, tag, a, b)};
}

}  // namespace chainbreak
