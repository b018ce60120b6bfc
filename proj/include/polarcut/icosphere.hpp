#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "polarcut/geometry.hpp"

namespace polarcut {

/// Unit-sphere polyhedron whose vertices are the ray directions.
struct Polyhedron {
  int level = 0;
  std::vector<Vec3> directions;
  /// Undirected edges (i < j), sorted.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  /// Triangles, counter-clockwise seen from outside.
  std::vector<std::array<std::uint32_t, 3>> faces;
  /// Sorted neighbor lists derived from `edges`.
  std::vector<std::vector<std::uint32_t>> neighbors;

  std::size_t size() const { return directions.size(); }
};

/// Icosahedron subdivided `level` times (0..6), new vertices projected onto
/// the unit sphere. Vertex count is 10 * 4^level + 2.
Polyhedron build_icosphere(int level);

}  // namespace polarcut
