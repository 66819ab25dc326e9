#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace seqdec {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a hash of a byte string, used to fold stream purposes into seeds.
std::uint64_t fnv1a64(std::string_view s);

/// Derives the seed of a named substream from a master seed.
///
/// Mixing: master is first combined with the replication index through one
/// SplitMix64 round, then XORed with the FNV-1a hash of the purpose label and
/// finalized with a second SplitMix64 round. The map is fixed; identical
/// (master, replication, purpose) triples give identical seeds on every
/// platform and every run.
std::uint64_t derive_stream(std::uint64_t master_seed, std::uint64_t replication,
                            std::string_view purpose);

/// Seeded random stream. All randomness in the library flows through this
/// class so that runs are reproducible bit for bit. Distribution transforms
/// are written out here rather than taken from <random>, whose distribution
/// objects are not pinned down by the standard.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform draw on (0, 1].
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller. Consumes exactly two uniforms per call;
  /// no state is cached between calls.
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);

  /// Uniform draw on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
  std::mt19937_64 eng_;
};

} // namespace seqdec
