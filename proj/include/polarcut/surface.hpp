#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "polarcut/icosphere.hpp"
#include "polarcut/mask.hpp"
#include "polarcut/mincut.hpp"
#include "polarcut/spheregraph.hpp"

namespace polarcut {

/// Boundary sample per ray.
struct BoundaryField {
  std::vector<std::uint32_t> index;
  double delta_r = 0.0;

  double radius(std::size_t r) const { return static_cast<double>(index[r] + 1) * delta_r; }
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;
};

using Polyline = std::vector<std::array<double, 2>>;

struct SliceContours {
  int slice = 0;
  std::vector<Polyline> polylines;
};

/// b(r) = largest k whose node is on the source side. Throws internal_error
/// if a ray's source-side nodes are not a prefix starting at k = 0.
BoundaryField extract_boundary(const RayGrid& grid, const CutResult& cut);

/// One vertex per ray at its boundary radius, faces from the polyhedron.
TriangleMesh build_mesh(const RayGrid& grid, const BoundaryField& bf, const Polyhedron& poly);

/// A voxel is set when its distance from the grid center is within the
/// boundary radius of the ray closest in direction (largest dot product,
/// lowest ray index on ties).
BinaryMask rasterize_mask(const RayGrid& grid, const BoundaryField& bf, const Polyhedron& poly,
                          const Dims& dims, const Spacing& spacing);

/// Closed polylines where the mesh meets the axial plane through slice `z`,
/// in voxel coordinates; the first point is repeated at the end.
std::vector<Polyline> slice_contours(const TriangleMesh& mesh, int z, const Spacing& spacing);

/// Contours for every slice of `dims` the mesh intersects.
std::vector<SliceContours> all_slice_contours(const TriangleMesh& mesh, const Dims& dims,
                                              const Spacing& spacing);

double mesh_volume_mm3(const TriangleMesh& mesh);
/// Number of undirected edges not shared by exactly two triangles.
std::size_t open_edge_count(const TriangleMesh& mesh);
long euler_characteristic(const TriangleMesh& mesh);

/// Signed shoelace area of a closed polyline in voxel coordinates, in mm^2.
double polyline_area_mm2(const Polyline& line, const Spacing& spacing);

void write_obj(const TriangleMesh& mesh, std::ostream& out);
nlohmann::json to_json(const SliceContours& c);

}  // namespace polarcut
