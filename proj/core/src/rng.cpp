#include "qcor/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace qcor {

namespace {
constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
constexpr uint64_t kStreamSalt = 0xD2B74407B1CE6E93ULL;
}  // namespace

Rng::Rng(uint64_t seed, uint64_t stream) : state_(seed) {
  uint64_t base = next_u64();
  state_ = base ^ (stream * kGamma + kStreamSalt);
}

uint64_t Rng::next_u64() {
  state_ += kGamma;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int Rng::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
  const uint64_t un = static_cast<uint64_t>(n);
  const uint64_t threshold = (0 - un) % un;  // 2^64 mod n
  for (;;) {
    uint64_t x = next_u64();
    if (x >= threshold) return static_cast<int>(x % un);
  }
}

double Rng::normal(double mean, double stddev) {
  double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * M_PI * u2);
}

long Rng::poisson(double mean) {
  if (mean < 0 || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson: mean must be finite and nonnegative");
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    // Knuth's multiplication method
    const double limit = std::exp(-mean);
    long k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }
  // PTRS transformed rejection (Hormann 1993), exact for mean >= 10
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = uniform() - 0.5;
    double v = uniform();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<long>(kf);
    if (kf < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        kf * loglam - mean - std::lgamma(kf + 1.0)) {
      return static_cast<long>(kf);
    }
  }
}

}  // namespace qcor
