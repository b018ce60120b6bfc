#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polarcut/error.hpp"
#include "polarcut/icosphere.hpp"
#include "polarcut/spheregraph.hpp"
#include "polarcut/surface.hpp"

using namespace polarcut;

namespace {

struct Setup {
  Polyhedron poly;
  Volume volume;
  RayGrid grid;
};

Setup make_setup(int level, Vec3 center, int samples, double delta_r, Dims dims = {40, 40, 40},
                 Spacing spacing = {}) {
  Setup s{build_icosphere(level), Volume(dims, spacing, std::vector<float>(dims.voxel_count(), 0.0f)), {}};
  s.grid = sample_rays(s.volume, center, s.poly, samples, delta_r);
  return s;
}

BoundaryField uniform(const Setup& s, std::uint32_t k) {
  return {std::vector<std::uint32_t>(s.grid.rays, k), s.grid.delta_r};
}

std::size_t lattice_ball(const Vec3& c, double radius, const Dims& d, const Spacing& sp) {
  std::size_t n = 0;
  for (std::size_t k = 0; k < d.nz; ++k)
    for (std::size_t j = 0; j < d.ny; ++j)
      for (std::size_t i = 0; i < d.nx; ++i) {
        const Vec3 p{i * sp.sx - c.x, j * sp.sy - c.y, k * sp.sz - c.z};
        if (p.dot(p) <= radius * radius) ++n;
      }
  return n;
}

CutResult cut_from_boundary(const RayGrid& g, const std::vector<std::uint32_t>& b) {
  CutResult c;
  c.source_side.assign(g.rays * g.samples + 2, 0);
  c.source_side[g.rays * g.samples] = 1;
  for (std::size_t r = 0; r < g.rays; ++r)
    for (std::size_t k = 0; k <= b[r]; ++k) c.source_side[g.index(r, k)] = 1;
  return c;
}

}  // namespace

TEST_CASE("boundary extraction") {
  const Setup s = make_setup(1, {20, 20, 20}, 6, 1.0);
  SUBCASE("everything source side") {
    CutResult c;
    c.source_side.assign(s.grid.rays * 6 + 2, 1);
    c.source_side.back() = 0;
    for (auto b : extract_boundary(s.grid, c).index) CHECK(b == 5);
  }
  SUBCASE("prefixes map to their last index") {
    std::mt19937_64 rng(1);
    std::vector<std::uint32_t> b(s.grid.rays);
    for (auto& x : b) x = static_cast<std::uint32_t>(rng() % 6);
    const BoundaryField bf = extract_boundary(s.grid, cut_from_boundary(s.grid, b));
    CHECK(bf.index == b);
    CHECK(bf.radius(0) == (b[0] + 1) * 1.0);
  }
  SUBCASE("non-monotone rays are an internal error") {
    CutResult c = cut_from_boundary(s.grid, std::vector<std::uint32_t>(s.grid.rays, 2));
    c.source_side[s.grid.index(3, 4)] = 1;
    try {
      extract_boundary(s.grid, c);
      FAIL("expected internal_error");
    } catch (const Error& e) {
      CHECK(e.kind() == "internal_error");
    }
    c = cut_from_boundary(s.grid, std::vector<std::uint32_t>(s.grid.rays, 2));
    for (std::size_t k = 0; k < 6; ++k) c.source_side[s.grid.index(5, k)] = 0;
    CHECK_THROWS_AS(extract_boundary(s.grid, c), Error);
  }
}

TEST_CASE("mesh of a full ball at level 0 is the icosahedron") {
  const Vec3 c{20, 20, 20};
  const Setup s = make_setup(0, c, 5, 1.5);
  const TriangleMesh m = build_mesh(s.grid, uniform(s, 4), s.poly);
  CHECK(m.vertices.size() == 12);
  CHECK(m.triangles.size() == 20);
  for (const Vec3& v : m.vertices) CHECK((v - c).norm() == doctest::Approx(7.5));
  CHECK(open_edge_count(m) == 0);
  CHECK(euler_characteristic(m) == 2);
  // Regular icosahedron of circumradius R has volume (5/12)(3+sqrt5) a^3.
  const double a = 7.5 / std::sin(2 * std::numbers::pi / 5);
  CHECK(mesh_volume_mm3(m) == doctest::Approx(5.0 / 12.0 * (3 + std::sqrt(5.0)) * a * a * a));
}

TEST_CASE("mesh volume approaches the sphere") {
  const Setup s = make_setup(3, {20, 20, 20}, 12, 1.0);
  const TriangleMesh m = build_mesh(s.grid, uniform(s, 9), s.poly);
  const double sphere = 4.0 / 3.0 * std::numbers::pi * 1000.0;
  CHECK(std::abs(mesh_volume_mm3(m) - sphere) / sphere < 0.05);
  CHECK(open_edge_count(m) == 0);
}

TEST_CASE("rasterized ball matches the lattice count") {
  const Vec3 c{20.3, 19.6, 20.1};
  const Setup s = make_setup(4, c, 12, 1.0);
  const BinaryMask m = rasterize_mask(s.grid, uniform(s, 11), s.poly, s.volume.dims(), s.volume.spacing());
  const double lattice = static_cast<double>(lattice_ball(c, 12.0, s.volume.dims(), s.volume.spacing()));
  CHECK(std::abs(m.count() - lattice) / lattice < 0.02);
}

TEST_CASE("anisotropic spacing keeps the rasterized ball in millimetres") {
  const Spacing sp{0.8, 1.0, 2.0};
  const Vec3 c{16, 20, 30};
  const Setup s = make_setup(4, c, 10, 1.0, {40, 40, 30}, sp);
  const BinaryMask m = rasterize_mask(s.grid, uniform(s, 9), s.poly, s.volume.dims(), sp);
  const double lattice = static_cast<double>(lattice_ball(c, 10.0, s.volume.dims(), sp));
  CHECK(std::abs(m.count() - lattice) / lattice < 0.03);
}

TEST_CASE("degenerate boundary still contains the seed voxel") {
  const Vec3 c{10.3, 10.7, 10.2};
  const Setup s = make_setup(1, c, 3, 0.2, {20, 20, 20});
  const BinaryMask m = rasterize_mask(s.grid, uniform(s, 0), s.poly, {20, 20, 20}, {});
  CHECK(m.at(10, 11, 10));
  CHECK(m.count() >= 1);
}

TEST_CASE("raising a boundary never clears a voxel") {
  std::mt19937_64 rng(2);
  const Setup s = make_setup(2, {20, 20, 20}, 14, 1.0);
  std::vector<std::uint32_t> b(s.grid.rays);
  for (auto& x : b) x = static_cast<std::uint32_t>(3 + rng() % 8);
  BoundaryField bf{b, 1.0};
  BinaryMask before = rasterize_mask(s.grid, bf, s.poly, s.volume.dims(), s.volume.spacing());
  for (int step = 0; step < 20; ++step) {
    const std::size_t r = rng() % s.grid.rays;
    if (bf.index[r] < 13) ++bf.index[r];
    const BinaryMask after = rasterize_mask(s.grid, bf, s.poly, s.volume.dims(), s.volume.spacing());
    for (std::size_t i = 0; i < after.bits().size(); ++i)
      if (before.bits()[i]) REQUIRE(after.bits()[i]);
    before = after;
  }
}

TEST_CASE("slice contours") {
  const Vec3 c{20, 20, 20};
  SUBCASE("icosahedron through its center gives one closed loop") {
    const Setup s = make_setup(0, c, 5, 2.0);
    const TriangleMesh m = build_mesh(s.grid, uniform(s, 4), s.poly);
    const auto lines = slice_contours(m, 20, {});
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].front() == lines[0].back());
    CHECK(lines[0].size() >= 4);
    CHECK(slice_contours(m, 31, {}).empty());
    CHECK(slice_contours(m, 0, {}).empty());
  }
  SUBCASE("loops are counter-clockwise and the area is positive") {
    const Setup s = make_setup(2, c, 8, 1.0);
    const TriangleMesh m = build_mesh(s.grid, uniform(s, 7), s.poly);
    const auto lines = slice_contours(m, 20, {});
    REQUIRE(lines.size() == 1);
    const double area = polyline_area_mm2(lines[0], {});
    CHECK(area > 0.9 * std::numbers::pi * 64.0);
    CHECK(area < std::numbers::pi * 64.0);
  }
  SUBCASE("Cavalieri: slice areas times thickness give the mesh volume") {
    const Spacing sp{1.0, 1.0, 0.5};
    const Setup s = make_setup(3, {20, 20, 20}, 12, 1.0, {40, 40, 80}, sp);
    const TriangleMesh m = build_mesh(s.grid, uniform(s, 10), s.poly);
    double total = 0.0;
    for (const auto& sc : all_slice_contours(m, s.volume.dims(), sp))
      for (const auto& line : sc.polylines) total += polyline_area_mm2(line, sp) * sp.sz;
    const double v = mesh_volume_mm3(m);
    CHECK(std::abs(total - v) / v < 0.05);
  }
  SUBCASE("contours follow the boundary through the pinned point") {
    const Setup s = make_setup(3, c, 15, 1.0);
    BoundaryField bf = uniform(s, 7);
    // Find a ray in the z = 20 plane and push it out.
    std::size_t ray = 0;
    for (std::size_t r = 0; r < s.grid.rays; ++r)
      if (std::abs(s.poly.directions[r].z) < 1e-9) {
        ray = r;
        break;
      }
    bf.index[ray] = 12;
    const TriangleMesh m = build_mesh(s.grid, bf, s.poly);
    const Vec3 tip = c + s.poly.directions[ray] * 13.0;
    double best = 1e9;
    for (const auto& line : slice_contours(m, 20, {}))
      for (const auto& p : line) best = std::min(best, std::hypot(p[0] - tip.x, p[1] - tip.y));
    CHECK(best < 1e-9);
  }
}

TEST_CASE("polyline area units") {
  const Polyline square{{0, 0}, {2, 0}, {2, 2}, {0, 2}, {0, 0}};
  CHECK(polyline_area_mm2(square, {}) == 4.0);
  CHECK(polyline_area_mm2(square, {0.5, 3.0, 9.0}) == 6.0);
  const Polyline reversed{{0, 0}, {0, 2}, {2, 2}, {2, 0}, {0, 0}};
  CHECK(polyline_area_mm2(reversed, {}) == -4.0);
}

TEST_CASE("OBJ and contour JSON output") {
  const Setup s = make_setup(0, {20, 20, 20}, 3, 1.0);
  const TriangleMesh m = build_mesh(s.grid, uniform(s, 2), s.poly);
  std::ostringstream out;
  write_obj(m, out);
  std::istringstream in(out.str());
  std::string tag;
  std::size_t v = 0, f = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    ls >> tag;
    if (tag == "v") {
      double x, y, z;
      REQUIRE(static_cast<bool>(ls >> x >> y >> z));
      ++v;
    } else if (tag == "f") {
      long a, b, c;
      REQUIRE(static_cast<bool>(ls >> a >> b >> c));
      REQUIRE(a >= 1);
      REQUIRE(a <= 12);
      REQUIRE(b <= 12);
      REQUIRE(c <= 12);
      ++f;
    }
  }
  CHECK(v == 12);
  CHECK(f == 20);

  const SliceContours sc{20, slice_contours(m, 20, {})};
  const nlohmann::json j = to_json(sc);
  CHECK(j.at("slice") == 20);
  REQUIRE(j.at("polylines").size() == 1);
  CHECK(j.at("polylines")[0][0].size() == 2);
}
