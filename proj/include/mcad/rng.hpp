// SPDX-License-Identifier: Apache-2.0
#pragma once

// Portable pseudo-random generation. xoshiro256** seeded through splitmix64;
// every derived distribution is implemented here so that a seed produces the
// same stream on every platform and standard library.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace mcad {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n); n must be nonzero.
  std::uint64_t below(std::uint64_t n);
  // Standard normal via Box-Muller (pairs are cached).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Independent child stream, e.g. one per subsystem, so that consumption in
  // one subsystem never perturbs another.
  Rng fork(std::uint64_t stream_id) const;

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mcad
