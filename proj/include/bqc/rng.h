// Copyright 2026 The blindnet Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BQC_RNG_H_
#define BQC_RNG_H_

#include <cstdint>
#include <limits>

namespace bqc {

// Counter-based generator: word k of a stream is splitmix64(key + k * golden).
// Streams for individual shots are derived as key = hash(seed, shot), so a
// shot's draws depend only on (seed, shot index) and never on scheduling.
// Satisfies UniformRandomBitGenerator for use with <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key) : key_(key) {}
  static Rng for_shot(std::uint64_t seed, std::uint64_t shot);
  // Independent child stream, e.g. one per protocol stage.
  Rng substream(std::uint64_t tag) const;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  double uniform();  // [0, 1)
  double normal(double mean, double stddev);
  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

}  // namespace bqc

#endif  // BQC_RNG_H_
