#pragma once

// Shared scalar pieces used by the reference kernels and the tails of the
// vector variants, so both paths evaluate identical expressions.

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace polarcut::simd {

inline std::uint32_t argmax_dot_tail(const float* dx, const float* dy, const float* dz,
                                     std::size_t begin, std::size_t end, float x, float y,
                                     float z, float best, std::uint32_t best_index) {
  for (std::size_t r = begin; r < end; ++r) {
    const float d = dx[r] * x + dy[r] * y + dz[r] * z;
    if (d > best) {
      best = d;
      best_index = static_cast<std::uint32_t>(r);
    }
  }
  return best_index;
}

inline std::uint8_t window_one(float value, float lo, float scale) {
  float v = (value - lo) * scale;
  v = v > 0.0f ? v : 0.0f;
  v = v < 255.0f ? v : 255.0f;
  return static_cast<std::uint8_t>(std::nearbyint(v));
}

}  // namespace polarcut::simd
