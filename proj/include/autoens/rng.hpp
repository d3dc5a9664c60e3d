#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace autoens {

// splitmix64 (Steele, Lea, Flood 2014). Used for seeding and key mixing.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a 64-bit hash. Keys per-subnetwork RNG streams and checkpoint digests.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// xoshiro256** (Blackman & Vigna 2018), seeded through splitmix64.
// Pure 64-bit integer arithmetic, so streams are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
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

  // Uniform in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [-scale, scale).
  double symmetric(double scale) { return (2.0 * uniform() - 1.0) * scale; }

  // Uniform index in [0, n). Modulo reduction; the bias is negligible for the
  // dataset sizes this library targets and keeps the draw count fixed.
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % n);
  }

  // Standard normal via Box-Muller. Consumes two uniforms per draw.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Derives an independent stream from a base seed and a list of keys
// (subnetwork id hash, purpose tag, step index, ...). The mapping is a pure
// function of its inputs, which is what makes training placement-independent:
// a subnetwork gets the same stream no matter which worker owns it.
inline Rng make_stream(std::uint64_t seed,
                       std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = seed;
  for (std::uint64_t k : keys) {
    std::uint64_t mixed = h ^ k;
    h = splitmix64(mixed);
  }
  return Rng(h);
}

// Purpose tags for stream derivation.
enum class StreamPurpose : std::uint64_t {
  kInit = 0x90a1b2c3d4e5f601ULL,
  kBatch = 0x1f2e3d4c5b6a7988ULL,
  kData = 0x77665544332211aaULL,
};

inline Rng subnetwork_stream(std::uint64_t seed, std::string_view subnetwork_id,
                             StreamPurpose purpose, std::uint64_t step = 0) {
  return make_stream(
      seed, {fnv1a64(subnetwork_id), static_cast<std::uint64_t>(purpose), step});
}

}  // namespace autoens
