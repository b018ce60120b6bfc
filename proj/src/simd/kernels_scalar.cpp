#include <cmath>

#include "polarcut/simd/kernels.hpp"
#include "simd/kernels_internal.hpp"

namespace polarcut::simd {

namespace {

void abs_diff_scalar(const float* in, float center, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(in[i] - center);
}

struct Axis {
  std::int32_t i0, i1;
  float t;
};

Axis axis_setup(float f, std::int32_t n) {
  if (n == 1) return {0, 0, 0.0f};
  std::int32_t i0 = static_cast<std::int32_t>(std::floor(f));
  if (i0 > n - 2) i0 = n - 2;
  if (i0 < 0) i0 = 0;
  return {i0, i0 + 1, f - static_cast<float>(i0)};
}

void trilinear_scalar(const GridView& g, const float* x, const float* y, const float* z,
                      float* out, std::size_t n) {
  for (std::size_t s = 0; s < n; ++s) {
    const Axis ax = axis_setup(x[s], g.nx);
    const Axis ay = axis_setup(y[s], g.ny);
    const Axis az = axis_setup(z[s], g.nz);
    auto at = [&](std::int32_t i, std::int32_t j, std::int32_t k) {
      return g.data[i + g.nx * (j + g.ny * k)];
    };
    const float v000 = at(ax.i0, ay.i0, az.i0), v100 = at(ax.i1, ay.i0, az.i0);
    const float v010 = at(ax.i0, ay.i1, az.i0), v110 = at(ax.i1, ay.i1, az.i0);
    const float v001 = at(ax.i0, ay.i0, az.i1), v101 = at(ax.i1, ay.i0, az.i1);
    const float v011 = at(ax.i0, ay.i1, az.i1), v111 = at(ax.i1, ay.i1, az.i1);
    const float c00 = v000 + ax.t * (v100 - v000);
    const float c10 = v010 + ax.t * (v110 - v010);
    const float c01 = v001 + ax.t * (v101 - v001);
    const float c11 = v011 + ax.t * (v111 - v011);
    const float c0 = c00 + ay.t * (c10 - c00);
    const float c1 = c01 + ay.t * (c11 - c01);
    out[s] = c0 + az.t * (c1 - c0);
  }
}

std::uint32_t argmax_dot_scalar(const float* dx, const float* dy, const float* dz,
                                std::size_t n, float x, float y, float z) {
  return argmax_dot_tail(dx, dy, dz, 0, n, x, y, z, -INFINITY, 0);
}

OverlapCounts overlap_scalar(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  OverlapCounts c;
  for (std::size_t i = 0; i < n; ++i) {
    const bool in_a = a[i] != 0, in_b = b[i] != 0;
    c.a += in_a;
    c.b += in_b;
    c.both += in_a && in_b;
  }
  return c;
}

void window_u8_scalar(const float* in, std::size_t n, float lo, float hi, std::uint8_t* out) {
  if (!(hi > lo)) {
    for (std::size_t i = 0; i < n; ++i) out[i] = in[i] >= hi ? 255 : 0;
    return;
  }
  const float scale = 255.0f / (hi - lo);
  for (std::size_t i = 0; i < n; ++i) out[i] = window_one(in[i], lo, scale);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{"scalar",         abs_diff_scalar, trilinear_scalar,
                         argmax_dot_scalar, overlap_scalar, window_u8_scalar};
  return k;
}

}  // namespace polarcut::simd
