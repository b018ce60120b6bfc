#include "polarcut/spheregraph.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "polarcut/error.hpp"
#include "polarcut/simd/kernels.hpp"

namespace polarcut {

using nlohmann::json;

void GraphParams::validate() const {
  if (level < 0 || level > 6) throw Error(errc::bad_config, "level must be in [0, 6]");
  if (samples < 2) throw Error(errc::bad_config, "samples must be >= 2");
  if (smoothness < 0 || smoothness > samples - 1)
    throw Error(errc::bad_config, "smoothness must be in [0, samples - 1]");
  if (!std::isfinite(delta_r_mm)) throw Error(errc::bad_config, "delta_r_mm must be finite");
  if (cube_d < 1) throw Error(errc::bad_config, "cube_d must be >= 1");
}

GraphParams graph_params_from_json(const json& j, GraphParams p) {
  try {
    p.level = j.value("level", p.level);
    p.samples = j.value("samples", p.samples);
    p.delta_r_mm = j.value("delta_r_mm", p.delta_r_mm);
    p.smoothness = j.value("smoothness", p.smoothness);
    p.cube_d = j.value("cube_d", p.cube_d);
  } catch (const json::exception& e) {
    throw Error(errc::bad_config, std::string("bad graph parameters: ") + e.what());
  }
  p.validate();
  return p;
}

json to_json(const GraphParams& p) {
  return {{"level", p.level},
          {"samples", p.samples},
          {"delta_r_mm", p.delta_r_mm},
          {"smoothness", p.smoothness},
          {"cube_d", p.cube_d}};
}

RayGrid sample_rays(const Volume& v, const Vec3& seed, const Polyhedron& poly, int samples,
                    double delta_r) {
  if (!v.contains(seed)) throw Error(errc::seed_out_of_bounds, "seed outside volume");
  if (samples < 1 || !(delta_r > 0)) throw Error(errc::invalid_argument, "bad ray sampling parameters");

  RayGrid g;
  g.center = seed;
  g.rays = poly.size();
  g.samples = static_cast<std::size_t>(samples);
  g.delta_r = delta_r;
  const std::size_t n = g.rays * g.samples;
  g.intensity.assign(n, 0.0f);
  g.positions.resize(n);
  g.clamped.assign(n, 0);

  // Gather in-bounds samples into one batch for the trilinear kernel.
  std::vector<float> bx, by, bz;
  std::vector<std::size_t> slot;
  bx.reserve(n);
  by.reserve(n);
  bz.reserve(n);
  slot.reserve(n);
  for (std::size_t r = 0; r < g.rays; ++r) {
    bool outside = false;
    for (std::size_t k = 0; k < g.samples; ++k) {
      const std::size_t idx = g.index(r, k);
      g.positions[idx] = seed + poly.directions[r] * g.radius(k);
      // Once a ray leaves the volume it stays clamped.
      outside = outside || !v.contains(g.positions[idx]);
      g.clamped[idx] = outside;
      if (!outside) {
        const Vec3 f = v.to_voxel(g.positions[idx]);
        bx.push_back(static_cast<float>(f.x));
        by.push_back(static_cast<float>(f.y));
        bz.push_back(static_cast<float>(f.z));
        slot.push_back(idx);
      }
    }
  }
  std::vector<float> values(slot.size());
  const simd::GridView view{v.data().data(), static_cast<std::int32_t>(v.dims().nx),
                            static_cast<std::int32_t>(v.dims().ny),
                            static_cast<std::int32_t>(v.dims().nz)};
  simd::active().trilinear(view, bx.data(), by.data(), bz.data(), values.data(), values.size());
  for (std::size_t i = 0; i < slot.size(); ++i) g.intensity[slot[i]] = values[i];

  const float seed_value = sample_trilinear(v, seed);
  for (std::size_t r = 0; r < g.rays; ++r) {
    float last = seed_value;
    for (std::size_t k = 0; k < g.samples; ++k) {
      const std::size_t idx = g.index(r, k);
      if (g.clamped[idx]) g.intensity[idx] = last;
      else last = g.intensity[idx];
    }
  }
  return g;
}

std::vector<double> node_costs(const RayGrid& grid, double mean_gray) {
  std::vector<float> out(grid.intensity.size());
  simd::active().abs_diff(grid.intensity.data(), static_cast<float>(mean_gray), out.data(), out.size());
  return {out.begin(), out.end()};
}

std::vector<double> surface_costs(const RayGrid& grid, double mean_gray) {
  const std::vector<double> c = node_costs(grid, mean_gray);
  std::vector<double> s(c.size(), 0.0);
  const std::size_t K = grid.samples;
  for (std::size_t r = 0; r < grid.rays; ++r)
    for (std::size_t k = 0; k < K; ++k) {
      const double before = c[grid.index(r, k > 0 ? k - 1 : 0)];
      const double after = c[grid.index(r, k + 1 < K ? k + 1 : K - 1)];
      s[grid.index(r, k)] = before - after;
    }
  return s;
}

SphereGraph build_graph(const RayGrid& grid, const Polyhedron& poly, double mean_gray,
                        const GraphParams& params) {
  if (grid.rays != poly.size()) throw Error(errc::invalid_argument, "grid and polyhedron disagree on ray count");
  if (static_cast<int>(grid.samples) != params.samples)
    throw Error(errc::invalid_argument, "grid and parameters disagree on sample count");
  if (params.smoothness < 0 || params.smoothness > params.samples - 1)
    throw Error(errc::invalid_argument, "smoothness must be in [0, samples - 1]");

  SphereGraph g;
  g.rays = grid.rays;
  g.samples = grid.samples;
  g.smoothness = params.smoothness;
  const std::size_t R = g.rays, K = g.samples;
  const auto delta = static_cast<std::size_t>(params.smoothness);

  const std::vector<double> s = surface_costs(grid, mean_gray);
  g.weights.assign(R * K, 0.0);
  double finite_total = 0.0;
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t k = 1; k < K; ++k) {
      const double w = s[grid.index(r, k)] - s[grid.index(r, k - 1)];
      g.weights[grid.index(r, k)] = w;
      finite_total += std::fabs(w);
    }
  g.maxw = 1.0 + finite_total;
  for (std::size_t r = 0; r < R; ++r) g.weights[grid.index(r, 0)] = -g.maxw;

  g.net = FlowNetwork(static_cast<std::uint32_t>(R * K));
  g.net.reserve(R * K * 2 + 2 * poly.edges.size() * K);
  const std::uint32_t src = g.net.source(), snk = g.net.sink();
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t k = 0; k < K; ++k) {
      const std::uint32_t v = g.node(r, k);
      const double w = g.weights[v];
      if (w < 0) g.net.add_arc(src, v, -w);
      else g.net.add_arc(v, snk, w);
      if (k >= 1) g.net.add_arc(v, g.node(r, k - 1), g.maxw);
      const std::size_t lower = k >= delta ? k - delta : 0;
      for (std::uint32_t nb : poly.neighbors[r]) g.net.add_arc(v, g.node(nb, lower), g.maxw);
    }
  return g;
}

RayConstraint nearest_node(const RayGrid& grid, const Vec3& p) {
  RayConstraint best;
  double best_d2 = INFINITY;
  for (std::size_t r = 0; r < grid.rays; ++r)
    for (std::size_t k = 0; k < grid.samples; ++k) {
      const Vec3 d = grid.positions[grid.index(r, k)] - p;
      const double d2 = d.dot(d);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = {static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(k)};
      }
    }
  return best;
}

void fix_ray(SphereGraph& g, const RayConstraint& c) {
  if (c.ray >= g.rays || c.sample >= g.samples)
    throw Error(errc::invalid_argument, "constraint outside the grid");
  if (const auto it = g.fixed.find(c.ray); it != g.fixed.end()) {
    if (it->second != c.sample)
      throw Error(errc::conflicting_constraint,
                  "ray " + std::to_string(c.ray) + " already fixed at sample " + std::to_string(it->second));
    return;
  }
  g.fixed.emplace(c.ray, c.sample);
  for (std::size_t k = 0; k < g.samples; ++k) {
    const std::uint32_t v = g.node(c.ray, k);
    if (k <= c.sample) g.net.add_arc(g.net.source(), v, g.maxw);
    else g.net.add_arc(v, g.net.sink(), g.maxw);
  }
}

}  // namespace polarcut
