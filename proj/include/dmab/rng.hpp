#pragma once

#include <cstdint>

// Deterministic, platform-independent randomness. Streams are xoshiro256++
// seeded through splitmix64; run seeds are derived with mix_seed so that
// distinct run indices always map to distinct stream seeds (the splitmix
// state walk is a bijection on 64-bit words).

namespace dmab {

inline constexpr std::uint64_t kSplitmixGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += kSplitmixGamma);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for run j of an experiment with the given base seed. Injective in j.
inline std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t index) {
  std::uint64_t state = base_seed + index * kSplitmixGamma;
  return splitmix64(state);
}

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed = 1) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double next_in(double lo, double hi) { return lo + next_unit() * (hi - lo); }

  // Uniform on {0, ..., n-1} (Lemire rejection; n > 0).
  std::uint64_t next_below(std::uint64_t n) {
    unsigned __int128 mul =
        static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
    auto low = static_cast<std::uint64_t>(mul);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        mul = static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
        low = static_cast<std::uint64_t>(mul);
      }
    }
    return static_cast<std::uint64_t>(mul >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4]{};
};

}  // namespace dmab
