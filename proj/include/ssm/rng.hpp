// Deterministic, splittable random streams.
//
// Engine: xoshiro256** with its 256-bit state filled from SplitMix64.
//   seeded_rng(seed)      -> SplitMix64 started at `seed`
//   substream(seed, i)    -> SplitMix64 started at seed ^ splitmix64_mix(i + 1)
// Normal variates use the Marsaglia polar method with a cached spare.
// Changing any of this changes every simulated dataset; keep it fixed.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>

namespace ssm {

/// The SplitMix64 output function applied to a single word.
std::uint64_t splitmix64_mix(std::uint64_t x);

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::array<std::uint64_t, 4> s_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Rng seeded_rng(std::uint64_t seed);
Rng substream(std::uint64_t seed, std::uint64_t stream);

/// Trials per independent sub-stream in the batch samplers.
inline constexpr std::size_t kSampleBlock = 4096;

/// Runs body(block) for block in [0, n_blocks) on up to `threads` workers.
/// Each block must write to disjoint output; the first exception thrown is
/// rethrown on the calling thread.
void parallel_blocks(std::size_t n_blocks, unsigned threads,
                     const std::function<void(std::size_t)>& body);

}  // namespace ssm
