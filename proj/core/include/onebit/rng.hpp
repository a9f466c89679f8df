#pragma once

#include "onebit/types.hpp"

#include <random>
#include <string_view>

namespace onebit {

// All randomness in the project flows through this generator so that runs are
// reproducible from a single base seed. Streams are keyed by (seed, tag, index):
// the key is mixed with splitmix64 and seeds a std::mt19937_64. Normal draws use
// a non-caching Box-Muller transform on 53-bit uniforms, so the whole pipeline
// is specified by the C++ standard plus this file.
inline constexpr const char* kRngAlgorithm = "mt19937_64+boxmuller/v1";

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

/// Mixes (base seed, stream tag, stream index) into one generator seed.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}
  Rng(std::uint64_t base, std::string_view tag, std::uint64_t index)
      : gen_(derive_seed(base, tag, index)) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53 significant bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (two uniforms per draw, no caching).
  double normal();

  Vec normal_vec(long n);

  /// Uniform integer in [0, n), unbiased (rejection sampling).
  std::uint64_t uniform_int(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
};

}  // namespace onebit
