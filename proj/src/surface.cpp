#include "polarcut/surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "polarcut/error.hpp"
#include "polarcut/simd/kernels.hpp"

namespace polarcut {

BoundaryField extract_boundary(const RayGrid& grid, const CutResult& cut) {
  if (cut.source_side.size() < grid.rays * grid.samples)
    throw Error(errc::invalid_argument, "cut does not cover the grid");
  BoundaryField bf;
  bf.delta_r = grid.delta_r;
  bf.index.resize(grid.rays);
  for (std::size_t r = 0; r < grid.rays; ++r) {
    std::size_t k = 0;
    while (k < grid.samples && cut.source_side[grid.index(r, k)]) ++k;
    if (k == 0) throw Error(errc::internal, "ray without a source-side node");
    for (std::size_t j = k; j < grid.samples; ++j)
      if (cut.source_side[grid.index(r, j)]) throw Error(errc::internal, "cut is not monotone along a ray");
    bf.index[r] = static_cast<std::uint32_t>(k - 1);
  }
  return bf;
}

TriangleMesh build_mesh(const RayGrid& grid, const BoundaryField& bf, const Polyhedron& poly) {
  TriangleMesh m;
  m.vertices.reserve(poly.size());
  for (std::size_t r = 0; r < poly.size(); ++r)
    m.vertices.push_back(grid.center + poly.directions[r] * bf.radius(r));
  m.triangles = poly.faces;
  return m;
}

BinaryMask rasterize_mask(const RayGrid& grid, const BoundaryField& bf, const Polyhedron& poly,
                          const Dims& dims, const Spacing& spacing) {
  BinaryMask mask(dims, spacing);
  const std::size_t R = poly.size();
  std::vector<float> dx(R), dy(R), dz(R);
  double rmin = INFINITY, rmax = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    dx[r] = static_cast<float>(poly.directions[r].x);
    dy[r] = static_cast<float>(poly.directions[r].y);
    dz[r] = static_cast<float>(poly.directions[r].z);
    rmin = std::min(rmin, bf.radius(r));
    rmax = std::max(rmax, bf.radius(r));
  }
  auto span = [](double c, double s, double r, std::size_t n) {
    const double lo = std::max(0.0, std::ceil((c - r) / s));
    const double hi = std::min(static_cast<double>(n) - 1.0, std::floor((c + r) / s));
    return std::pair<long, long>{static_cast<long>(lo), static_cast<long>(hi)};
  };
  const Vec3& c = grid.center;
  const auto [i0, i1] = span(c.x, spacing.sx, rmax, dims.nx);
  const auto [j0, j1] = span(c.y, spacing.sy, rmax, dims.ny);
  const auto [k0, k1] = span(c.z, spacing.sz, rmax, dims.nz);
  const simd::Kernels& kern = simd::active();
  for (long k = k0; k <= k1; ++k)
    for (long j = j0; j <= j1; ++j)
      for (long i = i0; i <= i1; ++i) {
        const Vec3 d = Vec3{i * spacing.sx, j * spacing.sy, k * spacing.sz} - c;
        const double dist = d.norm();
        bool in = false;
        if (dist <= rmin) {
          in = true;
        } else if (dist <= rmax) {
          const std::uint32_t r = kern.argmax_dot(dx.data(), dy.data(), dz.data(), R,
                                                  static_cast<float>(d.x), static_cast<float>(d.y),
                                                  static_cast<float>(d.z));
          in = dist <= bf.radius(r);
        }
        if (in) mask.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k));
      }
  // The voxel containing the center always belongs to the object.
  const auto nearest = [](double p, double s, std::size_t n) {
    return static_cast<std::size_t>(std::clamp(std::floor(p / s + 0.5), 0.0, static_cast<double>(n - 1)));
  };
  mask.set(nearest(c.x, spacing.sx, dims.nx), nearest(c.y, spacing.sy, dims.ny),
           nearest(c.z, spacing.sz, dims.nz));
  return mask;
}

std::vector<Polyline> slice_contours(const TriangleMesh& mesh, int z, const Spacing& spacing) {
  const double plane = z * spacing.sz;
  const auto above = [&](std::uint32_t v) { return mesh.vertices[v].z >= plane; };
  using EdgeKey = std::pair<std::uint32_t, std::uint32_t>;
  const auto key = [](std::uint32_t a, std::uint32_t b) { return EdgeKey{std::min(a, b), std::max(a, b)}; };

  // Each straddling triangle contributes one directed segment from the edge
  // it crosses downward to the edge it crosses upward.
  std::map<EdgeKey, EdgeKey> next;
  for (const auto& t : mesh.triangles) {
    EdgeKey down{}, up{};
    int crossings = 0;
    for (int e = 0; e < 3; ++e) {
      const std::uint32_t a = t[e], b = t[(e + 1) % 3];
      if (above(a) && !above(b)) {
        down = key(a, b);
        ++crossings;
      } else if (!above(a) && above(b)) {
        up = key(a, b);
        ++crossings;
      }
    }
    if (crossings == 2) next[down] = up;
  }

  const auto point = [&](const EdgeKey& e) {
    const Vec3& a = mesh.vertices[e.first];
    const Vec3& b = mesh.vertices[e.second];
    const double t = (plane - a.z) / (b.z - a.z);
    const Vec3 p = a + (b - a) * t;
    return std::array<double, 2>{p.x / spacing.sx, p.y / spacing.sy};
  };

  std::vector<Polyline> lines;
  while (!next.empty()) {
    const EdgeKey start = next.begin()->first;
    Polyline line;
    EdgeKey cur = start;
    for (;;) {
      line.push_back(point(cur));
      const auto it = next.find(cur);
      if (it == next.end()) break;  // open chain on a non-manifold mesh
      cur = it->second;
      next.erase(it);
      if (cur == start) break;
    }
    line.push_back(line.front());
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<SliceContours> all_slice_contours(const TriangleMesh& mesh, const Dims& dims,
                                              const Spacing& spacing) {
  std::vector<SliceContours> out;
  if (mesh.vertices.empty()) return out;
  double zmin = INFINITY, zmax = -INFINITY;
  for (const Vec3& v : mesh.vertices) {
    zmin = std::min(zmin, v.z);
    zmax = std::max(zmax, v.z);
  }
  const int first = std::max(0, static_cast<int>(std::ceil(zmin / spacing.sz)));
  const int last = std::min(static_cast<int>(dims.nz) - 1, static_cast<int>(std::floor(zmax / spacing.sz)));
  for (int z = first; z <= last; ++z) {
    auto lines = slice_contours(mesh, z, spacing);
    if (!lines.empty()) out.push_back({z, std::move(lines)});
  }
  return out;
}

double mesh_volume_mm3(const TriangleMesh& mesh) {
  double six_v = 0.0;
  for (const auto& t : mesh.triangles)
    six_v += mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]]));
  return six_v / 6.0;
}

namespace {

std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_uses(const TriangleMesh& mesh) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> uses;
  for (const auto& t : mesh.triangles)
    for (int e = 0; e < 3; ++e) ++uses[std::minmax(t[e], t[(e + 1) % 3])];
  return uses;
}

}  // namespace

std::size_t open_edge_count(const TriangleMesh& mesh) {
  std::size_t open = 0;
  for (const auto& [edge, n] : edge_uses(mesh))
    if (n != 2) ++open;
  return open;
}

long euler_characteristic(const TriangleMesh& mesh) {
  return static_cast<long>(mesh.vertices.size()) - static_cast<long>(edge_uses(mesh).size()) +
         static_cast<long>(mesh.triangles.size());
}

double polyline_area_mm2(const Polyline& line, const Spacing& spacing) {
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i)
    twice += line[i][0] * line[i + 1][1] - line[i + 1][0] * line[i][1];
  return twice / 2.0 * spacing.sx * spacing.sy;
}

void write_obj(const TriangleMesh& mesh, std::ostream& out) {
  char buf[128];
  for (const Vec3& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.6f %.6f %.6f\n", v.x, v.y, v.z);
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

nlohmann::json to_json(const SliceContours& c) {
  nlohmann::json lines = nlohmann::json::array();
  for (const Polyline& l : c.polylines) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : l) pts.push_back({p[0], p[1]});
    lines.push_back(std::move(pts));
  }
  return {{"slice", c.slice}, {"polylines", std::move(lines)}};
}

}  // namespace polarcut
