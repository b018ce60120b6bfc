#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace polarcut::simd {

struct OverlapCounts {
  std::uint64_t a = 0;     // nonzero in a
  std::uint64_t b = 0;     // nonzero in b
  std::uint64_t both = 0;  // nonzero in both

  bool operator==(const OverlapCounts&) const = default;
};

/// Grid descriptor for the trilinear kernel.
struct GridView {
  const float* data;
  std::int32_t nx, ny, nz;
};

/// Table of data-parallel inner loops. Every variant must return results
/// bit-identical to the scalar reference (checked by the equivalence tests);
/// kernels are compiled without FMA contraction so this holds for floats too.
struct Kernels {
  std::string_view name;

  /// out[i] = |in[i] - center|
  void (*abs_diff)(const float* in, float center, float* out, std::size_t n);

  /// Trilinear samples at voxel coordinates. Each coordinate must lie in
  /// [0, n-1] on its axis; callers guarantee this.
  void (*trilinear)(const GridView& grid, const float* x, const float* y, const float* z,
                    float* out, std::size_t n);

  /// Index of the direction with the largest dot product against (x, y, z),
  /// lowest index on ties. Directions stored as separate component arrays.
  std::uint32_t (*argmax_dot)(const float* dx, const float* dy, const float* dz,
                              std::size_t n, float x, float y, float z);

  OverlapCounts (*overlap)(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);

  /// Linear window lo -> 0, hi -> 255, clamped and rounded to nearest even.
  /// When hi <= lo, values >= hi map to 255 and the rest to 0.
  void (*window_u8)(const float* in, std::size_t n, float lo, float hi, std::uint8_t* out);
};

const Kernels& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const Kernels* avx2_kernels();

/// Selected once per process: AVX2 when available unless the environment
/// variable POLARCUT_SIMD=scalar forces the reference path.
const Kernels& active();

}  // namespace polarcut::simd
