#pragma once

#include <cstdint>

namespace qcor {

/// Deterministic random stream based on SplitMix64 (Steele, Lea & Vigna).
///
/// Every stochastic call site in the library draws from an explicitly passed
/// Rng, and all derived distributions (uniform, normal, Poisson) are pinned
/// to documented algorithms rather than std:: distributions, so a seed
/// reproduces the same trajectory bit-for-bit on any platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  /// Stream `stream` derived from `seed`; distinct streams are independent.
  Rng(uint64_t seed, uint64_t stream);

  uint64_t next_u64();

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  /// Uniform integer in [0, n). Unbiased (rejection on the wraparound band).
  int uniform_int(int n);

  /// Gaussian via the Box-Muller transform; consumes exactly two uniforms.
  double normal(double mean, double stddev);

  /// Exact Poisson draw: Knuth multiplication below mean 10, Hormann's PTRS
  /// transformed rejection above.
  long poisson(double mean);

  /// Derive an independent stream (standard SplitMix64 splitting).
  Rng split() { return Rng(next_u64()); }

 private:
  uint64_t state_;
};

}  // namespace qcor
