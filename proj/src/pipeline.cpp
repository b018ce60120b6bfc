#include "polarcut/pipeline.hpp"

#include <array>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>

#include <nlohmann/json.hpp>

#include "polarcut/error.hpp"
#include "polarcut/mincut.hpp"

namespace polarcut {

using nlohmann::json;
namespace fs = std::filesystem;

std::shared_ptr<const Polyhedron> icosphere(int level) {
  static std::mutex mu;
  static std::array<std::shared_ptr<const Polyhedron>, 7> cache;
  if (level < 0 || level > 6) throw Error(errc::bad_config, "level must be in [0, 6]");
  std::lock_guard lock(mu);
  auto& slot = cache[static_cast<std::size_t>(level)];
  if (!slot) slot = std::make_shared<const Polyhedron>(build_icosphere(level));
  return slot;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

SphereGraph rebuild_graph(const SegmentationResult& r, const GraphParams& params) {
  SphereGraph g = build_graph(r.grid, *r.polyhedron, r.mean_gray, params);
  for (const RayConstraint& c : r.constraints) fix_ray(g, c);
  return g;
}

SegmentationResult segment(const Volume& volume, const SegmentationRequest& req) {
  req.params.validate();
  req.seeds.validate(volume);
  const auto t_start = Clock::now();

  SegmentationResult res;
  res.polyhedron = icosphere(req.params.level);
  const Polyhedron& poly = *res.polyhedron;

  auto t0 = Clock::now();
  res.mean_gray = req.mean_gray ? *req.mean_gray
                                : mean_gray_around_seeds(volume, req.seeds, req.params.cube_d);
  res.grid = sample_rays(volume, req.seeds.primary, poly, req.params.samples,
                         req.params.resolved_delta_r(volume));
  res.timings.sampling_ms = ms_since(t0);

  t0 = Clock::now();
  SphereGraph graph = build_graph(res.grid, poly, res.mean_gray, req.params);
  for (const Vec3& extra : req.seeds.extras) {
    const RayConstraint c = nearest_node(res.grid, extra);
    fix_ray(graph, c);
    if (std::find(res.constraints.begin(), res.constraints.end(), c) == res.constraints.end())
      res.constraints.push_back(c);
  }
  res.node_count = graph.net.node_count() + 2ull;
  res.arc_count = graph.net.arcs().size();
  res.timings.graph_ms = ms_since(t0);

  t0 = Clock::now();
  const CutResult cut = max_flow(graph.net);
  res.timings.maxflow_ms = ms_since(t0);
  res.max_flow = cut.max_flow_value;
  res.cut_capacity = cut.cut_capacity;
  if (cut.cut_capacity >= graph.maxw)
    throw Error(errc::conflicting_constraint,
                "extra seeds cannot all lie on one surface within the smoothness limit");

  t0 = Clock::now();
  res.boundary = extract_boundary(res.grid, cut);
  for (const RayConstraint& c : res.constraints)
    if (res.boundary.index[c.ray] != c.sample)
      throw Error(errc::internal, "fixed ray does not honor its constraint");
  res.mesh = build_mesh(res.grid, res.boundary, poly);
  res.mask = rasterize_mask(res.grid, res.boundary, poly, volume.dims(), volume.spacing());
  res.timings.rasterize_ms = ms_since(t0);
  res.timings.total_ms = ms_since(t_start);
  return res;
}

json stats_json(const SegmentationResult& r) {
  double rmin = INFINITY, rmax = 0.0;
  for (std::size_t i = 0; i < r.boundary.index.size(); ++i) {
    rmin = std::min(rmin, r.boundary.radius(i));
    rmax = std::max(rmax, r.boundary.radius(i));
  }
  json constraints = json::array();
  for (const auto& c : r.constraints) constraints.push_back({{"ray", c.ray}, {"sample", c.sample}});
  const std::size_t voxels = r.mask.count();
  return {{"boundary_radius_mm", {{"min", rmin}, {"max", rmax}}},
          {"cut_cost", r.cut_capacity},
          {"max_flow", r.max_flow},
          {"mean_gray", r.mean_gray},
          {"rays", r.grid.rays},
          {"samples", r.grid.samples},
          {"nodes", r.node_count},
          {"arcs", r.arc_count},
          {"constraints", constraints},
          {"mask_voxels", voxels},
          {"mask_volume_cm3", static_cast<double>(voxels) * r.mask.spacing().voxel_volume_mm3() / 1000.0},
          {"mesh_volume_cm3", mesh_volume_mm3(r.mesh) / 1000.0},
          {"timings_ms",
           {{"sampling", r.timings.sampling_ms},
            {"graph_build", r.timings.graph_ms},
            {"max_flow", r.timings.maxflow_ms},
            {"rasterize", r.timings.rasterize_ms},
            {"total", r.timings.total_ms}}}};
}

namespace {

Vec3 point_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw Error(errc::bad_config, "points need three coordinates");
  return {v[0], v[1], v[2]};
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

JobConfig job_config_from_json(const json& j, const fs::path& base) {
  JobConfig cfg;
  try {
    if (!j.is_object()) throw Error(errc::bad_config, "job config must be a JSON object");
    cfg.volume = resolve(base, j.at("volume").get<std::string>());
    if (j.contains("format")) {
      const auto f = j.at("format").get<std::string>();
      if (f == "native") cfg.format = VolumeFormat::native;
      else if (f == "nifti1") cfg.format = VolumeFormat::nifti1;
      else throw Error(errc::bad_config, "format must be native or nifti1");
    }
    cfg.request.seeds.primary = point_from_json(j.at("seed"));
    if (j.contains("extra_seeds"))
      for (const auto& p : j.at("extra_seeds")) cfg.request.seeds.extras.push_back(point_from_json(p));
    cfg.request.params = graph_params_from_json(j);
    if (j.contains("mean_gray")) cfg.request.mean_gray = j.at("mean_gray").get<double>();
    cfg.voxel_coords = j.value("voxel_coords", false);
    auto opt_path = [&](const char* key, std::optional<fs::path>& out) {
      if (j.contains(key)) out = resolve(base, j.at(key).get<std::string>());
    };
    opt_path("reference", cfg.reference);
    opt_path("mask", cfg.mask_out);
    opt_path("mesh", cfg.mesh_out);
    opt_path("contours", cfg.contours_out);
    opt_path("stats", cfg.stats_out);
    opt_path("dimacs", cfg.dimacs_out);
  } catch (const json::exception& e) {
    throw Error(errc::bad_config, std::string("bad job config: ") + e.what());
  }
  return cfg;
}

void seeds_to_world(SeedSet& seeds, const Volume& v) {
  seeds.primary = v.to_world(seeds.primary);
  for (Vec3& e : seeds.extras) e = v.to_world(e);
}

json contours_json(const SegmentationResult& r, const Volume& v) {
  json out = json::array();
  for (const auto& c : all_slice_contours(r.mesh, v.dims(), v.spacing())) out.push_back(to_json(c));
  return out;
}

}  // namespace polarcut
