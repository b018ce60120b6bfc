#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "polarcut/icosphere.hpp"
#include "polarcut/mincut.hpp"
#include "polarcut/volume.hpp"

namespace polarcut {

/// R rays x K samples taken outward from a center. Node (r, k) sits at
/// center + (k + 1) * delta_r * directions[r]; storage is ray-major.
struct RayGrid {
  Vec3 center;
  std::size_t rays = 0;
  std::size_t samples = 0;
  double delta_r = 0.0;
  std::vector<float> intensity;
  std::vector<Vec3> positions;
  /// 1 where the sample fell outside the volume and repeats the last
  /// in-bounds value of its ray.
  std::vector<std::uint8_t> clamped;

  std::size_t index(std::size_t r, std::size_t k) const { return r * samples + k; }
  double radius(std::size_t k) const { return static_cast<double>(k + 1) * delta_r; }
};

struct GraphParams {
  int level = 4;
  int samples = 60;
  /// <= 0 selects the volume's smallest voxel spacing.
  double delta_r_mm = 0.0;
  int smoothness = 2;
  int cube_d = 3;

  void validate() const;
  double resolved_delta_r(const Volume& v) const { return delta_r_mm > 0 ? delta_r_mm : v.spacing().min(); }
};

GraphParams graph_params_from_json(const nlohmann::json& j, GraphParams defaults = {});
nlohmann::json to_json(const GraphParams& p);

/// Boundary pinned to sample `sample` on ray `ray`.
struct RayConstraint {
  std::uint32_t ray = 0;
  std::uint32_t sample = 0;
  bool operator==(const RayConstraint&) const = default;
};

RayGrid sample_rays(const Volume& v, const Vec3& seed, const Polyhedron& poly, int samples,
                    double delta_r);

/// |intensity - mean_gray|
inline double node_cost(double intensity, double mean_gray) {
  return intensity > mean_gray ? intensity - mean_gray : mean_gray - intensity;
}

/// node_cost for every grid node (ray-major).
std::vector<double> node_costs(const RayGrid& grid, double mean_gray);

/// Cost of the surface passing through (r, k): node_cost(r, k - 1) minus
/// node_cost(r, k + 1), the negated central difference of the dissimilarity
/// along the ray, lowest where the ray leaves the object's gray value. The
/// end samples repeat their neighbor.
std::vector<double> surface_costs(const RayGrid& grid, double mean_gray);

/// Flow network of the spherical graph plus what is needed to add constraints.
struct SphereGraph {
  FlowNetwork net;
  std::size_t rays = 0;
  std::size_t samples = 0;
  int smoothness = 0;
  /// Capacity used for arcs that no minimum cut may sever.
  double maxw = 0.0;
  /// Terminal weight per node; negative binds to the source.
  std::vector<double> weights;
  /// Constraint per fixed ray.
  std::map<std::uint32_t, std::uint32_t> fixed;

  std::uint32_t node(std::size_t r, std::size_t k) const {
    return static_cast<std::uint32_t>(r * samples + k);
  }
};

/// Terminal arcs from w(r,k) = s(r,k) - s(r,k-1) (w(r,0) = -MAXW), infinite
/// downward arcs along each ray and infinite arcs (r,k) -> (r', max(0, k - delta))
/// for every polyhedron edge in both directions. Arcs are emitted ray by ray,
/// sample by sample.
SphereGraph build_graph(const RayGrid& grid, const Polyhedron& poly, double mean_gray,
                        const GraphParams& params);

/// Grid node closest to `p`; ties go to the lower ray, then the lower sample.
RayConstraint nearest_node(const RayGrid& grid, const Vec3& p);

/// Binds samples k <= k* to the source and k > k* to the sink with MAXW arcs.
/// Throws conflicting_constraint when the ray is already fixed elsewhere.
void fix_ray(SphereGraph& graph, const RayConstraint& c);

}  // namespace polarcut
