#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace cabo {

// Every consumer of randomness gets its own named substream. A policy that
// skips one consumer entirely (cts_query never samples feature models) must
// not perturb the draws seen by the others, or trajectory-equality tests
// would be impossible.
enum class Stream : std::uint64_t {
  FeatureSampling = 0x66656174,  // "feat"
  ArmSampling = 0x61726d73,      // "arms"
  Environment = 0x656e7669,      // "envi"
  DataPrep = 0x64617461,         // "data"
};

inline std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(stream))};
  return std::mt19937_64(seq);
}

/// The three per-run substreams, all derived from one run seed.
struct RunRngs {
  std::mt19937_64 feature;
  std::mt19937_64 arm;
  std::mt19937_64 env;

  explicit RunRngs(std::uint64_t seed)
      : feature(make_stream(seed, Stream::FeatureSampling)),
        arm(make_stream(seed, Stream::ArmSampling)),
        env(make_stream(seed, Stream::Environment)) {}
};

/// Unbiased draw from {0, ..., bound-1} by rejection. Keeps results
/// independent of standard-library distribution internals.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

/// Uniform double in (0, 1).
inline double uniform_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

/// Standard normal via Box-Muller. Stateless: consumes exactly two
/// engine draws per pair of values requested.
inline void fill_standard_normal(std::mt19937_64& rng, double* out, std::size_t n) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  for (std::size_t i = 0; i < n; i += 2) {
    const double u1 = uniform_unit(rng);
    const double u2 = uniform_unit(rng);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    out[i] = radius * std::cos(two_pi * u2);
    if (i + 1 < n) out[i + 1] = radius * std::sin(two_pi * u2);
  }
}

inline double standard_normal(std::mt19937_64& rng) {
  double z;
  fill_standard_normal(rng, &z, 1);
  return z;
}

/// Fisher-Yates with the rejection sampler above.
template <typename T>
void shuffle(std::vector<T>& values, std::mt19937_64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[uniform_below(rng, i)]);
  }
}

}  // namespace cabo
