#pragma once

#include <cstdint>

namespace sbmlab {

/// Identifies one reproducible random stream: a base seed plus a stream
/// index. Experiments use one stream per Monte Carlo trial so trials can
/// be regenerated independently of execution order.
struct Seed {
  std::uint64_t value = 0;
  std::uint64_t stream = 0;
};

/// Substreams split one (seed, stream) pair into independent sources so
/// that drawing more latent positions never shifts the edge coin flips.
inline constexpr std::uint64_t kSubstreamLatents = 0;
inline constexpr std::uint64_t kSubstreamEdges = 1;

/// Counter-based pseudo-random generator.
///
/// Output i is a fixed 64-bit finalizer applied to key + i*odd_constant,
/// where the key is derived by mixing (seed.value, seed.stream, substream).
/// The sequence is a pure function of those three integers: same binary,
/// same seed, same draws, on any platform with 64-bit integers.
class Rng {
 public:
  explicit Rng(Seed seed, std::uint64_t substream = 0);

  std::uint64_t next_u64();

  /// Uniform in [0, 1) using the top 53 bits of next_u64().
  double next_double();

  /// Standard normal via the Marsaglia polar method. Generates two values
  /// per acceptance round and caches the second.
  double next_normal();

  /// True with probability p (p outside [0, 1] clamps naturally: p <= 0
  /// is never, p >= 1 is always).
  bool bernoulli(double p) { return next_double() < p; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace sbmlab
