#pragma once

#include <cstdint>
#include <string_view>

namespace gubm {

// Fixed-algorithm generator so logs and splits reproduce byte-for-byte on
// any platform; the standard engines leave distribution details unspecified.
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) by rejection; bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % bound;
  }
};

inline std::uint64_t fnv1a_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Independent stream per (seed, a, b); consecutive indices give unrelated
// streams.
inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b) {
  SplitMix64 outer{seed};
  const std::uint64_t s1 = outer.next() ^ (a * 0x9e3779b97f4a7c15ULL);
  SplitMix64 middle{s1};
  const std::uint64_t s2 = middle.next() ^ (b * 0xbf58476d1ce4e5b9ULL);
  SplitMix64 inner{s2};
  return SplitMix64{inner.next()};
}

}  // namespace gubm
