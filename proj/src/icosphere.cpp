#include "polarcut/icosphere.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "polarcut/error.hpp"

namespace polarcut {

namespace {

using Face = std::array<std::uint32_t, 3>;

void orient_outward(const std::vector<Vec3>& v, std::vector<Face>& faces) {
  for (Face& f : faces) {
    const Vec3 n = (v[f[1]] - v[f[0]]).cross(v[f[2]] - v[f[0]]);
    if (n.dot(v[f[0]] + v[f[1]] + v[f[2]]) < 0) std::swap(f[1], f[2]);
  }
}

}  // namespace

Polyhedron build_icosphere(int level) {
  if (level < 0 || level > 6) throw Error(errc::invalid_argument, "icosphere level must be in [0, 6]");

  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
  };
  for (Vec3& v : verts) v = v.normalized();
  std::vector<Face> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  orient_outward(verts, faces);

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      const auto [it, inserted] = midpoint.try_emplace(key, static_cast<std::uint32_t>(verts.size()));
      if (inserted) verts.push_back(((verts[a] + verts[b]) * 0.5).normalized());
      return it->second;
    };
    std::vector<Face> next;
    next.reserve(faces.size() * 4);
    for (const Face& f : faces) {
      const std::uint32_t ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  Polyhedron p;
  p.level = level;
  p.directions = std::move(verts);
  p.faces = std::move(faces);
  for (const Face& f : p.faces)
    for (int e = 0; e < 3; ++e) {
      const auto [a, b] = std::minmax(f[e], f[(e + 1) % 3]);
      p.edges.emplace_back(a, b);
    }
  std::sort(p.edges.begin(), p.edges.end());
  p.edges.erase(std::unique(p.edges.begin(), p.edges.end()), p.edges.end());
  p.neighbors.resize(p.directions.size());
  for (const auto& [a, b] : p.edges) {
    p.neighbors[a].push_back(b);
    p.neighbors[b].push_back(a);
  }
  for (auto& n : p.neighbors) std::sort(n.begin(), n.end());
  return p;
}

}  // namespace polarcut
