// Copyright 2026 The sparseray Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>

namespace sray::diff::fastmath {

// Polynomial float transcendentals for the 32-bit training path. They are
// pure arithmetic, so the compiler can vectorize the elementwise loops; the
// 64-bit gradient-check path keeps libm accuracy via the double overloads.
// Relative error: exp ~1e-7, sin/cos ~1e-5 after pi-based range reduction.

// Branch-free float min/max via |x| (compare-select on floats tends to turn
// into real branches, which mispredict badly on random activations).
inline float fmin0(float a, float b) { return 0.5f * (a + b - std::fabs(a - b)); }
inline float fmax0(float a, float b) { return 0.5f * (a + b + std::fabs(a - b)); }

inline float exp(float x) {
  x = fmin0(fmax0(x, -87.0f), 88.0f);
  const float t = x * 1.44269504089f;  // x / ln 2
  const float f = std::floor(t);
  const float r = t - f;
  // 2^r on [0, 1), degree-5 minimax
  float p = 1.3333558146e-3f;
  p = p * r + 9.6180209424e-3f;
  p = p * r + 5.5503406821e-2f;
  p = p * r + 2.4022651101e-1f;
  p = p * r + 6.9314720004e-1f;
  p = p * r + 1.0f;
  const int32_t e = static_cast<int32_t>(f) + 127;
  return p * std::bit_cast<float>(e << 23);
}

namespace detail {
inline float sin_core(float x) {
  // round(x / pi) quadrant reduction; two-step pi subtraction keeps the
  // reduced argument accurate for the frequencies positional encoding uses.
  const float k = std::floor(x * 0.318309886f + 0.5f);
  float r = x - k * 3.140625f;
  r -= k * 9.67653589793e-4f;
  const float r2 = r * r;
  float p = -1.9515295891e-4f;
  p = p * r2 + 8.3321608736e-3f;
  p = p * r2 - 1.6666654611e-1f;
  p = p * r2 * r + r;
  // odd quadrants flip the sign (xor on the sign bit, no branch)
  const uint32_t flip = (static_cast<uint32_t>(static_cast<int32_t>(k)) & 1u) << 31;
  return std::bit_cast<float>(std::bit_cast<uint32_t>(p) ^ flip);
}
}  // namespace detail

inline float sin(float x) { return detail::sin_core(x); }
inline float cos(float x) { return detail::sin_core(x + 1.57079632679f); }

inline double exp(double x) { return std::exp(x); }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }

}  // namespace sray::diff::fastmath
