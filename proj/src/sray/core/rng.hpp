// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

namespace sray {

// Counter-based generator (splitmix64 chain). The whole state is two 64-bit
// words, so streams are trivially serializable into checkpoints and the
// sequence does not depend on the standard library. All randomness in the
// project flows from instances of this class; sub-streams are derived with
// fork() using fixed indices.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0)
      : state_(mix(seed + 0x9E3779B97F4A7C15ULL * (stream + 1))), stream_(stream) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(next_u64() % span);
  }

  // Standard normal via Box-Muller; consumes two uniforms, keeps no spare.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  Rng fork(uint64_t index) const { return Rng(mix(state_ ^ mix(index + 1)), stream_ ^ index); }

  uint64_t state() const { return state_; }
  uint64_t stream() const { return stream_; }
  static Rng restore(uint64_t state, uint64_t stream) {
    Rng r(0);
    r.state_ = state;
    r.stream_ = stream;
    return r;
  }

 private:
  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  uint64_t state_;
  uint64_t stream_;
};

}  // namespace sray
