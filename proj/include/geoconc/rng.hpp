#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random streams.  A (master_seed, replication_index) pair maps
// statelessly to an independent substream, so Monte Carlo replications can be
// generated in any order (or in parallel) and still reproduce bit-identically.
// Distribution sampling is implemented here rather than via <random> because
// the standard distributions are implementation-defined and would break
// cross-platform reproducibility.

namespace geoconc {

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t replication_index = 0;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  // splitmix64 finalizer
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class SubstreamRng {
 public:
  explicit SubstreamRng(SeedSpec seed)
      : key_(detail::mix64(seed.master_seed ^
                           detail::mix64(seed.replication_index + 0x51a2b3c4d5e6f708ULL))),
        counter_(0) {}

  SubstreamRng(std::uint64_t master_seed, std::uint64_t replication_index)
      : SubstreamRng(SeedSpec{master_seed, replication_index}) {}

  std::uint64_t next_u64() {
    return detail::mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
  }

  // Uniform on [0, 1).
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double next_positive_double() { return 1.0 - next_double(); }

  double uniform(double a, double b) { return a + (b - a) * next_double(); }

  // Standard normal via Box-Muller.
  double normal() {
    const double u = next_positive_double();
    const double v = next_double();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586477 * v);
  }

  // Exact Poisson by uniform-product inversion.  Means above the chunk size
  // are split into independent pieces to avoid exp() underflow; total cost is
  // O(mean) uniforms.
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0)) return 0;
    std::uint64_t total = 0;
    while (mean > 0) {
      const double m = mean > 500.0 ? 500.0 : mean;
      mean -= m;
      const double limit = std::exp(-m);
      double prod = 1.0;
      std::uint64_t k = 0;
      for (;;) {
        prod *= next_positive_double();
        if (prod <= limit) break;
        ++k;
      }
      total += k;
    }
    return total;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace geoconc
