#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "polarcut/error.hpp"
#include "polarcut/metrics.hpp"

using namespace polarcut;

namespace {

BinaryMask mask_with(Dims d, Spacing s, std::initializer_list<std::size_t> on) {
  BinaryMask m(d, s);
  for (std::size_t i : on) m.bits()[i] = 1;
  return m;
}

BinaryMask range_mask(std::size_t n, std::size_t from, std::size_t to) {
  BinaryMask m(Dims{n, 1, 1}, Spacing{});
  for (std::size_t i = from; i < to; ++i) m.bits()[i] = 1;
  return m;
}

}  // namespace

TEST_CASE("dice examples") {
  const BinaryMask a = range_mask(300, 0, 100);
  CHECK(dsc(a, a) == 1.0);
  CHECK(dsc(a, range_mask(300, 150, 250)) == 0.0);
  CHECK(dsc(a, range_mask(300, 20, 120)) == doctest::Approx(0.8));
  const BinaryMask empty(Dims{300, 1, 1}, Spacing{});
  CHECK(dsc(empty, empty) == 1.0);
  CHECK(dsc(a, empty) == 0.0);
}

TEST_CASE("dice requires matching geometry") {
  const BinaryMask a(Dims{4, 4, 4}, Spacing{});
  try {
    dsc(a, BinaryMask(Dims{4, 4, 5}, Spacing{}));
    FAIL("expected dims_mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == "dims_mismatch");
  }
  CHECK_THROWS_AS(dsc(a, BinaryMask(Dims{4, 4, 4}, Spacing{1, 1, 2})), Error);
}

TEST_CASE("dice properties on random masks") {
  std::mt19937_64 rng(1);
  const Dims d{9, 7, 5};
  for (int t = 0; t < 100; ++t) {
    BinaryMask a(d, {}), b(d, {});
    const unsigned pa = rng() % 100, pb = rng() % 100;
    for (auto& x : a.bits()) x = rng() % 100 < pa;
    for (auto& x : b.bits()) x = rng() % 100 < pb;
    const double ab = dsc(a, b);
    REQUIRE(ab == dsc(b, a));
    REQUIRE(ab >= 0.0);
    REQUIRE(ab <= 1.0);
    if (a.count() > 0) REQUIRE(dsc(a, a) == 1.0);

    // Same relabeling of voxels in both masks.
    std::vector<std::size_t> perm(d.voxel_count());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    BinaryMask pa_(d, {}), pb_(d, {});
    for (std::size_t i = 0; i < perm.size(); ++i) {
      pa_.bits()[perm[i]] = a.bits()[i];
      pb_.bits()[perm[i]] = b.bits()[i];
    }
    REQUIRE(dsc(pa_, pb_) == ab);
  }
}

TEST_CASE("volume from voxel counts") {
  CHECK(volume_cm3(BinaryMask(Dims{10, 10, 10}, Spacing{})) == 0.0);
  BinaryMask full(Dims{10, 10, 10}, Spacing{});
  std::fill(full.bits().begin(), full.bits().end(), 1);
  CHECK(volume_cm3(full) == 1.0);
  CHECK(volume_cm3(2, Spacing{0.5, 2.0, 3.0}) == doctest::Approx(0.006));
  const BinaryMask m = mask_with({3, 3, 3}, {2, 2, 2}, {0, 5, 26});
  CHECK(volume_cm3(m) == doctest::Approx(0.024));
}

TEST_CASE("reference table minimum row implies a sub-millimetre voxel") {
  // 2.38 cm^3 from 2694 voxels.
  const double voxel_mm3 = 2.38 * 1000.0 / 2694.0;
  CHECK(std::abs(voxel_mm3 - 0.8834) / 0.8834 < 0.01);
  const double side = std::cbrt(voxel_mm3);
  const Spacing iso{side, side, side};
  CHECK(std::abs(volume_cm3(2694, iso) - 2.38) / 2.38 < 0.01);
  CaseStats c;
  c.spacing = iso;
  c.vox_manual = 2694;
  CHECK(c.vol_manual_cm3() == volume_cm3(2694, iso));
}

TEST_CASE("case CSV schema") {
  CHECK(case_csv_header() ==
        "case,vol_manual_cm3,vol_oneclick_cm3,vol_semi_cm3,vox_manual,vox_oneclick,vox_semi,dsc_oneclick,dsc_semi");
  CHECK(case_csv_columns().size() == 9);
  CaseStats c{"p01", Spacing{}, 3000, 2500, 2800, 0.75, 0.85};
  const std::string row = case_csv_row(c);
  CHECK(row.rfind("p01,3", 0) == 0);
  CHECK(std::count(row.begin(), row.end(), ',') == 8);
  CHECK(row.find(",3000,2500,2800,") != std::string::npos);
}

TEST_CASE("summaries") {
  SUBCASE("single case") {
    CaseStats c{"a", Spacing{}, 1000, 900, 950, 0.6, 0.7};
    const Report r = summarize({c});
    for (const auto& col : r.columns) {
      CHECK(col.min == col.max);
      CHECK(col.min == col.mean);
      CHECK(col.stddev == 0.0);
    }
  }
  SUBCASE("two cases use the population deviation") {
    CaseStats a{"a", Spacing{}, 1000, 900, 950, 0.6, 0.7};
    CaseStats b{"b", Spacing{}, 2000, 1900, 1950, 0.8, 0.9};
    const Report r = summarize({a, b});
    const auto col = std::find_if(r.columns.begin(), r.columns.end(),
                                  [](const ColumnSummary& c) { return c.name == "dsc_oneclick"; });
    REQUIRE(col != r.columns.end());
    CHECK(col->mean == doctest::Approx(0.7));
    CHECK(col->stddev == doctest::Approx(0.1));
    CHECK(col->min == 0.6);
    CHECK(col->max == 0.8);
  }
  SUBCASE("columns follow the case schema") {
    const Report r = summarize({CaseStats{"a", Spacing{}, 1, 1, 1, 1, 1}});
    std::vector<std::string> names;
    for (const auto& c : r.columns) names.push_back(c.name);
    const auto& all = case_csv_columns();
    CHECK(names == std::vector<std::string>(all.begin() + 1, all.end()));
    CHECK(r.to_csv().rfind("stat,vol_manual_cm3,", 0) == 0);
    CHECK(r.to_csv().find("\nstd,") != std::string::npos);
    CHECK(r.to_text().find("population") != std::string::npos);
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(summarize({}), Error);
  }
}
