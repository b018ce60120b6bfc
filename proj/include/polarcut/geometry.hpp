#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace polarcut {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    const double n = norm();
    return {x / n, y / n, z / n};
  }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Voxel counts along x, y, z.
struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  constexpr std::size_t voxel_count() const { return nx * ny * nz; }
  constexpr std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return i + nx * (j + ny * k);
  }
  constexpr bool operator==(const Dims&) const = default;
};

/// Millimetres per voxel along x, y, z.
struct Spacing {
  double sx = 1.0;
  double sy = 1.0;
  double sz = 1.0;

  constexpr double voxel_volume_mm3() const { return sx * sy * sz; }
  constexpr double min() const { return sx < sy ? (sx < sz ? sx : sz) : (sy < sz ? sy : sz); }
  constexpr bool operator==(const Spacing&) const = default;
};

}  // namespace polarcut
