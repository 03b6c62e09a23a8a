#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace declip {

// Counter-based RNG: every draw is a pure function of (key, counter), so
// streams keyed on (seed, agent, iteration) are reproducible regardless of
// evaluation order or thread count.
class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t s0 = 0, std::uint64_t s1 = 0, std::uint64_t s2 = 0) {
    key_ = mix(mix(mix(mix(0x9e3779b97f4a7c15ULL ^ seed) + s0) + s1) + s2);
  }

  std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // Standard normal via Box-Muller; consumes two uniforms per draw.
  double next_gaussian() {
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // First `count` entries of a Fisher-Yates shuffle of {0, ..., n-1},
  // i.e. a uniform sample without replacement.
  std::vector<int> sample_without_replacement(int n, int count) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < count; ++i) {
      const int j = i + static_cast<int>(next_below(static_cast<std::uint64_t>(n - i)));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    return idx;
  }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace declip
