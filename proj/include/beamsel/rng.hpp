#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "beamsel/types.hpp"

namespace beamsel {

/// FNV-1a 64-bit hash. Used for deriving per-stage seeds from names and for
/// cheap content fingerprints in the run manifest.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
  return fnv1a64(std::string_view(static_cast<const char*>(data), n));
}

/// One splitmix64 step. Good enough as a seed mixer; not used as a stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// mt19937_64 wrapper with our own distribution code. The standard
/// distributions are implementation-defined, so results would differ across
/// standard libraries; these draws are bit-identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [lo, hi).
  double next_double(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Uniform integer in [0, n) by rejection, no modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(next_below(i))]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Seed for a named pipeline stage, derived from the master seed so stages
/// are decoupled: changing one stage's draws never shifts another's.
inline std::uint64_t stage_seed(std::uint64_t master, std::string_view stage) {
  return splitmix64(master ^ fnv1a64(stage));
}

}  // namespace beamsel
