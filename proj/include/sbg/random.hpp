#pragma once

#include <cstdint>

namespace sbg {

/// Deterministic random stream (xoshiro256++ core, splitmix64 seeding).
///
/// Streams are derived from a root seed and up to three integer keys via
/// derive() below. The derivation is a fixed function of (root, keys), so
/// serial and parallel runs that assign the same keys to the same work items
/// produce bit-identical output. Distribution samplers are implemented here
/// (rather than via <random>) so results do not depend on the standard
/// library implementation.
class RngStream {
 public:
  RngStream() : RngStream(0x9e3779b97f4a7c15ULL) {}
  explicit RngStream(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform01();

  /// Uniform on (0, hi).
  double uniform(double hi) { return hi * uniform01(); }

  /// Standard normal via Box-Muller (no cached spare, for reproducibility).
  double normal01();
  double normal(double mean, double stddev) { return mean + stddev * normal01(); }

  /// Exp(1).
  double exponential();

  /// Poisson with arbitrary mean >= 0 (inversion for small means,
  /// Hormann's PTRS transformed rejection for large ones).
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t s_[4];
};

/// Child-stream derivation: hashes (root, k1, k2, k3) into a fresh seed.
/// Used by the estimators with k1 = level index and k2 = sample index.
RngStream derive_stream(std::uint64_t root, std::uint64_t k1,
                        std::uint64_t k2 = 0, std::uint64_t k3 = 0);

}  // namespace sbg
