#pragma once

// Portable seeded generator: splitmix64 expands the seed into the 256-bit
// state of xoshiro256**. Every distribution below is built from raw 64-bit
// outputs with fixed arithmetic, so a seed reproduces the same stream on any
// platform (std:: distributions are implementation-defined and avoided).

#include <array>
#include <cstdint>
#include <limits>

namespace padbench {

/// Advances `state` and returns the next splitmix64 output.
std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  /// Independent stream keyed by (seed, a, b); used to give each
  /// (run, trial) its own generator so trials can be simulated in any order.
  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform integer in [0, n); n must be positive. Unbiased (Lemire).
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p);
  /// Box-Muller, two uniforms per call, no cached spare.
  double normal(double mean, double sd);
  double exponential(double mean);

  /// Child generator seeded from this stream's next output.
  Rng split();

  const std::array<std::uint64_t, 4>& state() const { return s_; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace padbench
