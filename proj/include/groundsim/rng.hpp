/*
 * Copyright (c) 2026 groundsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace groundsim {

// All randomness in a run derives from (run seed, stream tag[, index]).
// Components draw from independent streams so that ablations with the
// same seed differ only where intended. Draw helpers avoid the standard
// <random> distributions, whose output is implementation-defined.
uint64_t splitmix64(uint64_t x);

uint64_t stream_key(uint64_t seed, std::string_view tag, uint64_t index = 0);

class RngStream {
 public:
  RngStream() : eng_(0) {}
  RngStream(uint64_t seed, std::string_view tag, uint64_t index = 0)
      : eng_(stream_key(seed, tag, index)) {}

  uint64_t next_u64() { return eng_(); }

  // [0,1), 53-bit resolution
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0,n); modulo bias is irrelevant for the small n used here
  uint32_t uniform_int(uint32_t n) {
    return n == 0 ? 0 : static_cast<uint32_t>(next_u64() % n);
  }

  // Knuth inversion; fine for the small means used by arrival flows
  int poisson(double mean);

 private:
  std::mt19937_64 eng_;
};

}  // namespace groundsim
