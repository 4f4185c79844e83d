#pragma once

#include <cmath>
#include <cstdint>

namespace covo {

/// Counter-based generator: output i of stream (key) is mix64(key + i*gamma),
/// the SplitMix64 finalizer over a Weyl sequence. Every output file records
/// the generator name ("splitmix64-counter") and the seed, and replicate r of
/// a run draws from the derived stream derive_stream(seed, r), so runs are
/// replicable independent of evaluation order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0)
      : key_(key), counter_(counter) {}

  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static CounterRng derive_stream(std::uint64_t seed, std::uint64_t stream) {
    return CounterRng(mix64(seed + 0x9E3779B97F4A7C15ULL * (stream + 1)));
  }

  std::uint64_t next_u64() {
    counter_ += 0x9E3779B97F4A7C15ULL;
    return mix64(key_ + counter_);
  }

  /// Uniform in [0,1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  double next_exponential(double rate) {
    return -std::log1p(-next_double()) / rate;
  }

  /// Exact Poisson count by uniform products. Means above 500 are split into
  /// chunks so exp(-mean) never underflows; counts add exactly.
  std::uint64_t next_poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 500.0) {
      total += poisson_small(500.0);
      mean -= 500.0;
    }
    if (mean > 0.0) total += poisson_small(mean);
    return total;
  }

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return UINT64_MAX; }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t poisson_small(double mean) {
    const double threshold = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= next_double();
    } while (p > threshold);
    return k - 1;
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

inline constexpr const char* kRngName = "splitmix64-counter";

/// Neumaier compensated sum; reductions over replicates use this so the
/// estimate does not depend on how partial sums would be grouped.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace covo
