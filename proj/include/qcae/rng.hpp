#pragma once

#include <cmath>
#include <cstdint>

namespace qcae {

// SplitMix64: a counter-based generator (the state advances by a fixed
// increment, the output is a bijective hash of the state). All randomness in
// the project flows through this engine so that every run is reproducible
// bit-for-bit across platforms and independent of threading.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, 2*pi).
  double uniform_angle() { return uniform() * 6.283185307179586476925286766559; }

  // Uniform integer in [0, n); n must be positive.
  int uniform_int(int n) {
    const auto wide = static_cast<unsigned __int128>(next_u64()) *
                      static_cast<unsigned __int128>(n);
    return static_cast<int>(wide >> 64);
  }

  // Standard normal via Box-Muller. std::normal_distribution is not
  // reproducible across standard library implementations; this is.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(t);
    have_cached_ = true;
    return r * std::cos(t);
  }

 private:
  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

// Derives an independent substream seed from a master seed and up to three
// tag words (e.g. purpose, step index, sample index). Substreams for
// distinct tags are decorrelated by the SplitMix64 finalizer.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  Rng h(master ^ 0x6A09E667F3BCC908ULL);
  std::uint64_t s = h.next_u64();
  s ^= a + 0x9E3779B97F4A7C15ULL + (s << 6) + (s >> 2);
  s = Rng(s).next_u64();
  s ^= b + 0x9E3779B97F4A7C15ULL + (s << 6) + (s >> 2);
  s = Rng(s).next_u64();
  s ^= c + 0x9E3779B97F4A7C15ULL + (s << 6) + (s >> 2);
  return Rng(s).next_u64();
}

}  // namespace qcae
