#pragma once

#include <cmath>
#include <cstdint>

namespace tasep::rng {

/// SplitMix64 finaliser (Steele, Lea, Flood 2014). Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stateless draw keyed by (seed, a, b, c). Independent of evaluation order.
constexpr std::uint64_t counter_hash(std::uint64_t seed, std::int64_t a, std::int64_t b,
                                     std::uint64_t c = 0) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ static_cast<std::uint64_t>(a));
  h = mix64(h ^ static_cast<std::uint64_t>(b));
  return mix64(h ^ c);
}

/// Sequential SplitMix64 stream; a UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}
  void seed(std::uint64_t s) { state_ = s; }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    const std::uint64_t z = state_;
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(z);
  }

 private:
  std::uint64_t state_;
};

/// Uniform on (0, 1]: never 0, so -log(u) stays finite.
inline double open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Exp(1) by inversion.
inline double exp1(std::uint64_t bits) { return -std::log(open_unit(bits)); }

}  // namespace tasep::rng
