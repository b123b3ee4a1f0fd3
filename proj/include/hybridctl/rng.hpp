#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hybridctl {

/// xoshiro256++ seeded through SplitMix64. Cheap enough to construct one per
/// replicate, which is how substreams are keyed: the generator for a
/// replicate depends only on (seed, domain, outer, inner), never on the
/// worker that happens to run it.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  /// Stream domains keep data draws and bootstrap draws disjoint.
  enum class Domain : std::uint64_t { kData = 1, kBootstrap = 2, kOracle = 3 };

  StreamRng(std::uint64_t seed, Domain domain, std::uint64_t outer,
            std::uint64_t inner = 0) {
    std::uint64_t sm = seed;
    sm = mix(sm ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(domain)));
    sm = mix(sm ^ (outer + 0xD1B54A32D192ED03ULL));
    sm = mix(sm ^ (inner + 0x8CB92BA72F3D8DD7ULL));
    for (auto& word : state_) word = splitmix(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    return mix(x);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace hybridctl
