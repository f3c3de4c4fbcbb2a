#pragma once

#include <cmath>
#include <cstdint>

#include "phasemm/types.hpp"

namespace phasemm {

/// splitmix64: tiny deterministic 64-bit generator with a fully specified
/// output sequence, so seeded runs reproduce bit-for-bit everywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform deviate in [0, 1).
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform deviate in (0, 1], safe as a log argument.
  double next_unit_open() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Standard-normal sampler: Box-Muller over SplitMix64.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : gen_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = gen_.next_unit_open();
    const double u2 = gen_.next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Complex deviate with independent standard-normal real/imaginary parts.
  Complex next_complex() {
    const double re = next();
    const double im = next();
    return {re, im};
  }

 private:
  SplitMix64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Combines a seed with a stream tag; used to derive independent per-cell
/// seeds from (master_seed, trial, N, algorithm) in any order of evaluation.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  SplitMix64 g(seed ^ (0xA0761D6478BD642FULL + tag * 0xE7037ED1A0B428DBULL));
  return g.next();
}

/// Unit-norm complex Gaussian signal of length k.
inline ComplexVector random_unit_signal(int k, std::uint64_t seed) {
  NormalSampler normal(seed);
  ComplexVector x(k);
  for (int i = 0; i < k; ++i) x[i] = normal.next_complex();
  const double n = x.norm();
  if (n > 0) x /= n;
  return x;
}

}  // namespace phasemm
