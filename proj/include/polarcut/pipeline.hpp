#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "polarcut/icosphere.hpp"
#include "polarcut/mask.hpp"
#include "polarcut/spheregraph.hpp"
#include "polarcut/surface.hpp"
#include "polarcut/volume.hpp"

namespace polarcut {

struct SegmentationRequest {
  SeedSet seeds;
  GraphParams params;
  /// Replaces the seed-cube estimate when set.
  std::optional<double> mean_gray;
};

struct PhaseTimings {
  double sampling_ms = 0.0;
  double graph_ms = 0.0;
  double maxflow_ms = 0.0;
  double rasterize_ms = 0.0;
  double total_ms = 0.0;
};

struct SegmentationResult {
  std::shared_ptr<const Polyhedron> polyhedron;
  RayGrid grid;
  double mean_gray = 0.0;
  std::vector<RayConstraint> constraints;
  std::size_t node_count = 0;  // including source and sink
  std::size_t arc_count = 0;
  double max_flow = 0.0;
  double cut_capacity = 0.0;
  BoundaryField boundary;
  TriangleMesh mesh;
  BinaryMask mask;
  PhaseTimings timings;
};

/// Icosphere for `level`, built once per process and shared.
std::shared_ptr<const Polyhedron> icosphere(int level);

/// Full run: seed-cube mean over all seeds, ray sampling around the primary
/// seed, graph construction, one fixed ray per extra seed, max-flow, boundary
/// extraction, mesh and mask. Throws seed_out_of_bounds for seeds outside the
/// volume and conflicting_constraint when the extra seeds cannot all hold at
/// once under the smoothness limit.
SegmentationResult segment(const Volume& volume, const SegmentationRequest& request);

/// Stats blob: boundary radii, cut cost, node/arc counts, phase timings.
nlohmann::json stats_json(const SegmentationResult& r);

/// Batch job description read from JSON. Relative paths resolve against
/// `base_dir`.
struct JobConfig {
  std::filesystem::path volume;
  std::optional<VolumeFormat> format;
  SegmentationRequest request;
  bool voxel_coords = false;
  std::optional<std::filesystem::path> reference;
  std::optional<std::filesystem::path> mask_out;
  std::optional<std::filesystem::path> mesh_out;
  std::optional<std::filesystem::path> contours_out;
  std::optional<std::filesystem::path> stats_out;
  std::optional<std::filesystem::path> dimacs_out;
};

JobConfig job_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

/// Converts seeds given in voxel indices to world millimetres.
void seeds_to_world(SeedSet& seeds, const Volume& v);

/// Contours JSON array for all slices the mesh intersects.
nlohmann::json contours_json(const SegmentationResult& r, const Volume& v);

/// Sphere graph for a finished request, exposed for the DIMACS dump.
SphereGraph rebuild_graph(const SegmentationResult& r, const GraphParams& params);

}  // namespace polarcut
