#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace finito::rng {

// Portable random streams. The standard library distributions are
// implementation-defined, so everything that feeds an index stream or a
// synthetic dataset goes through these instead.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent key from a parent key and a counter.
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t counter) {
  return splitmix64(splitmix64(key) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

/// Sequential splitmix64 generator. Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// Unbiased integer in [0, bound) by Lemire's multiply-and-reject method.
template <class Gen>
std::uint64_t bounded(Gen& gen, std::uint64_t bound) {
  std::uint64_t x = gen();
  unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = gen();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Gen>
double uniform01(Gen& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller (one value per call, two uniforms consumed).
template <class Gen>
double normal(Gen& gen) {
  const double u1 = 1.0 - uniform01(gen);  // (0, 1]
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace finito::rng
