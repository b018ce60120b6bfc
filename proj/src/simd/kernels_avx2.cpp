// Compiled with -mavx2 (no FMA) so every lane evaluates the same rounded
// expression as the scalar reference.

#include <immintrin.h>

#include <cmath>

#include "polarcut/simd/kernels.hpp"
#include "simd/kernels_internal.hpp"

namespace polarcut::simd {

namespace {

void abs_diff_avx2(const float* in, float center, float* out, std::size_t n) {
  const __m256 c = _mm256_set1_ps(center);
  const __m256 sign = _mm256_set1_ps(-0.0f);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(in + i), c);
    _mm256_storeu_ps(out + i, _mm256_andnot_ps(sign, d));
  }
  for (; i < n; ++i) out[i] = std::fabs(in[i] - center);
}

struct AxisV {
  __m256i i0, i1;
  __m256 t;
};

AxisV axis_setup(__m256 f, std::int32_t n) {
  if (n == 1) return {_mm256_setzero_si256(), _mm256_setzero_si256(), _mm256_setzero_ps()};
  __m256i i0 = _mm256_cvttps_epi32(_mm256_floor_ps(f));
  i0 = _mm256_min_epi32(i0, _mm256_set1_epi32(n - 2));
  i0 = _mm256_max_epi32(i0, _mm256_setzero_si256());
  const __m256i i1 = _mm256_add_epi32(i0, _mm256_set1_epi32(1));
  return {i0, i1, _mm256_sub_ps(f, _mm256_cvtepi32_ps(i0))};
}

inline __m256 lerp(__m256 a, __m256 b, __m256 t) {
  return _mm256_add_ps(a, _mm256_mul_ps(t, _mm256_sub_ps(b, a)));
}

void trilinear_avx2(const GridView& g, const float* x, const float* y, const float* z,
                    float* out, std::size_t n) {
  const __m256i nx = _mm256_set1_epi32(g.nx);
  const __m256i ny = _mm256_set1_epi32(g.ny);
  std::size_t s = 0;
  for (; s + 8 <= n; s += 8) {
    const AxisV ax = axis_setup(_mm256_loadu_ps(x + s), g.nx);
    const AxisV ay = axis_setup(_mm256_loadu_ps(y + s), g.ny);
    const AxisV az = axis_setup(_mm256_loadu_ps(z + s), g.nz);
    auto gather = [&](__m256i i, __m256i j, __m256i k) {
      const __m256i plane = _mm256_mullo_epi32(ny, k);
      const __m256i row = _mm256_mullo_epi32(nx, _mm256_add_epi32(j, plane));
      return _mm256_i32gather_ps(g.data, _mm256_add_epi32(i, row), 4);
    };
    const __m256 v000 = gather(ax.i0, ay.i0, az.i0), v100 = gather(ax.i1, ay.i0, az.i0);
    const __m256 v010 = gather(ax.i0, ay.i1, az.i0), v110 = gather(ax.i1, ay.i1, az.i0);
    const __m256 v001 = gather(ax.i0, ay.i0, az.i1), v101 = gather(ax.i1, ay.i0, az.i1);
    const __m256 v011 = gather(ax.i0, ay.i1, az.i1), v111 = gather(ax.i1, ay.i1, az.i1);
    const __m256 c00 = lerp(v000, v100, ax.t);
    const __m256 c10 = lerp(v010, v110, ax.t);
    const __m256 c01 = lerp(v001, v101, ax.t);
    const __m256 c11 = lerp(v011, v111, ax.t);
    const __m256 c0 = lerp(c00, c10, ay.t);
    const __m256 c1 = lerp(c01, c11, ay.t);
    _mm256_storeu_ps(out + s, lerp(c0, c1, az.t));
  }
  if (s < n) scalar_kernels().trilinear(g, x + s, y + s, z + s, out + s, n - s);
}

std::uint32_t argmax_dot_avx2(const float* dx, const float* dy, const float* dz,
                              std::size_t n, float x, float y, float z) {
  const __m256 vx = _mm256_set1_ps(x), vy = _mm256_set1_ps(y), vz = _mm256_set1_ps(z);
  __m256 best = _mm256_set1_ps(-INFINITY);
  __m256i best_idx = _mm256_setzero_si256();
  __m256i idx = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
  const __m256i step = _mm256_set1_epi32(8);
  std::size_t r = 0;
  for (; r + 8 <= n; r += 8) {
    const __m256 d = _mm256_add_ps(
        _mm256_add_ps(_mm256_mul_ps(_mm256_loadu_ps(dx + r), vx),
                      _mm256_mul_ps(_mm256_loadu_ps(dy + r), vy)),
        _mm256_mul_ps(_mm256_loadu_ps(dz + r), vz));
    const __m256 gt = _mm256_cmp_ps(d, best, _CMP_GT_OQ);
    best = _mm256_blendv_ps(best, d, gt);
    best_idx = _mm256_castps_si256(
        _mm256_blendv_ps(_mm256_castsi256_ps(best_idx), _mm256_castsi256_ps(idx), gt));
    idx = _mm256_add_epi32(idx, step);
  }
  alignas(32) float lane_best[8];
  alignas(32) std::int32_t lane_idx[8];
  _mm256_store_ps(lane_best, best);
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane_idx), best_idx);
  float b = -INFINITY;
  std::uint32_t bi = 0;
  if (r > 0) {
    b = lane_best[0];
    bi = static_cast<std::uint32_t>(lane_idx[0]);
    for (int l = 1; l < 8; ++l) {
      const auto li = static_cast<std::uint32_t>(lane_idx[l]);
      if (lane_best[l] > b || (lane_best[l] == b && li < bi)) {
        b = lane_best[l];
        bi = li;
      }
    }
  }
  return argmax_dot_tail(dx, dy, dz, r, n, x, y, z, b, bi);
}

OverlapCounts overlap_avx2(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
  OverlapCounts c;
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const auto za = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(va, zero)));
    const auto zb = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(vb, zero)));
    c.a += static_cast<std::uint64_t>(__builtin_popcount(~za));
    c.b += static_cast<std::uint64_t>(__builtin_popcount(~zb));
    c.both += static_cast<std::uint64_t>(__builtin_popcount(~za & ~zb));
  }
  const OverlapCounts tail = scalar_kernels().overlap(a + i, b + i, n - i);
  c.a += tail.a;
  c.b += tail.b;
  c.both += tail.both;
  return c;
}

void window_u8_avx2(const float* in, std::size_t n, float lo, float hi, std::uint8_t* out) {
  if (!(hi > lo)) {
    scalar_kernels().window_u8(in, n, lo, hi, out);
    return;
  }
  const float scale = 255.0f / (hi - lo);
  const __m256 vlo = _mm256_set1_ps(lo), vscale = _mm256_set1_ps(scale);
  const __m256 zero = _mm256_setzero_ps(), top = _mm256_set1_ps(255.0f);
  std::size_t i = 0;
  alignas(32) std::int32_t tmp[8];
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_mul_ps(_mm256_sub_ps(_mm256_loadu_ps(in + i), vlo), vscale);
    v = _mm256_max_ps(v, zero);
    v = _mm256_min_ps(v, top);
    v = _mm256_round_ps(v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    _mm256_store_si256(reinterpret_cast<__m256i*>(tmp), _mm256_cvtps_epi32(v));
    for (int l = 0; l < 8; ++l) out[i + l] = static_cast<std::uint8_t>(tmp[l]);
  }
  for (; i < n; ++i) out[i] = window_one(in[i], lo, scale);
}

}  // namespace

const Kernels* avx2_kernels_compiled() {
  static const Kernels k{"avx2",         abs_diff_avx2, trilinear_avx2,
                         argmax_dot_avx2, overlap_avx2, window_u8_avx2};
  return &k;
}

}  // namespace polarcut::simd
