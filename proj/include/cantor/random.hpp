#pragma once

#include <cstdint>

namespace cantor {

/// Counter-based stream: draw i of stream s under seed k is a pure function
/// of (k, s, i), so results do not depend on scheduling.
class CounterStream {
public:
  CounterStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t next() {
    std::uint64_t x = mix(seed_ ^ mix(stream_ + 0x632be59bd9b4e019ULL));
    return mix(x + (counter_++) * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform on {0, ..., n-1}, by rejection (no modulo bias).
  std::uint64_t uniform(std::uint64_t n) {
    if (n <= 1)
      return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
      const auto r = next();
      if (r < limit)
        return r % n;
    }
  }

  std::uint64_t draws() const { return counter_; }

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

} // namespace cantor
