#include "polarcut/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "polarcut/error.hpp"
#include "polarcut/simd/kernels.hpp"

namespace polarcut {

double dsc(const BinaryMask& a, const BinaryMask& r) {
  if (!(a.dims() == r.dims()) || !(a.spacing() == r.spacing()))
    throw Error(errc::dims_mismatch, "masks differ in dims or spacing");
  const auto c = simd::active().overlap(a.bits().data(), r.bits().data(), a.bits().size());
  if (c.a + c.b == 0) return 1.0;
  return 2.0 * static_cast<double>(c.both) / static_cast<double>(c.a + c.b);
}

double volume_cm3(std::size_t voxels, const Spacing& s) {
  return static_cast<double>(voxels) * s.voxel_volume_mm3() / 1000.0;
}

double volume_cm3(const BinaryMask& m) { return volume_cm3(m.count(), m.spacing()); }

const std::vector<std::string>& case_csv_columns() {
  static const std::vector<std::string> cols = {
      "case",       "vol_manual_cm3", "vol_oneclick_cm3", "vol_semi_cm3", "vox_manual",
      "vox_oneclick", "vox_semi",     "dsc_oneclick",     "dsc_semi"};
  return cols;
}

std::string case_csv_header() {
  std::string h;
  for (const auto& c : case_csv_columns()) h += (h.empty() ? "" : ",") + c;
  return h;
}

namespace {

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<double> numeric_row(const CaseStats& c) {
  return {c.vol_manual_cm3(),
          c.vol_oneclick_cm3(),
          c.vol_semi_cm3(),
          static_cast<double>(c.vox_manual),
          static_cast<double>(c.vox_oneclick),
          static_cast<double>(c.vox_semi),
          c.dsc_oneclick,
          c.dsc_semi};
}

}  // namespace

std::string case_csv_row(const CaseStats& c) {
  return c.id + "," + fmt(c.vol_manual_cm3()) + "," + fmt(c.vol_oneclick_cm3()) + "," +
         fmt(c.vol_semi_cm3()) + "," + std::to_string(c.vox_manual) + "," +
         std::to_string(c.vox_oneclick) + "," + std::to_string(c.vox_semi) + "," +
         fmt(c.dsc_oneclick) + "," + fmt(c.dsc_semi);
}

Report summarize(const std::vector<CaseStats>& cases) {
  if (cases.empty()) throw Error(errc::invalid_argument, "summary needs at least one case");
  const auto& names = case_csv_columns();
  Report rep;
  for (std::size_t col = 0; col + 1 < names.size(); ++col) {
    ColumnSummary s;
    s.name = names[col + 1];
    s.min = INFINITY;
    s.max = -INFINITY;
    double sum = 0.0;
    for (const auto& c : cases) {
      const double v = numeric_row(c)[col];
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
      sum += v;
    }
    s.mean = sum / static_cast<double>(cases.size());
    double ss = 0.0;
    for (const auto& c : cases) {
      const double d = numeric_row(c)[col] - s.mean;
      ss += d * d;
    }
    s.stddev = std::sqrt(ss / static_cast<double>(cases.size()));
    rep.columns.push_back(s);
  }
  return rep;
}

std::string Report::to_csv() const {
  std::ostringstream out;
  out << "stat";
  for (const auto& c : columns) out << ',' << c.name;
  out << '\n';
  const char* rows[] = {"min", "max", "mean", "std"};
  for (int r = 0; r < 4; ++r) {
    out << rows[r];
    for (const auto& c : columns) {
      const double v = r == 0 ? c.min : r == 1 ? c.max : r == 2 ? c.mean : c.stddev;
      out << ',' << fmt(v);
    }
    out << '\n';
  }
  return out.str();
}

std::string Report::to_text() const {
  std::size_t width = 6;
  for (const auto& c : columns) width = std::max(width, c.name.size());
  std::ostringstream out;
  auto cell = [&](const std::string& s) {
    out << s;
    for (std::size_t i = s.size(); i < width + 2; ++i) out << ' ';
  };
  cell("");
  for (const auto& c : columns) cell(c.name);
  out << '\n';
  const char* rows[] = {"min", "max", "mean±sd"};
  for (int r = 0; r < 3; ++r) {
    cell(rows[r]);
    for (const auto& c : columns) {
      const std::string v = r == 0 ? fmt(c.min, 4) : r == 1 ? fmt(c.max, 4)
                                                           : fmt(c.mean, 4) + "±" + fmt(c.stddev, 4);
      cell(v);
    }
    out << '\n';
  }
  out << "std-dev is the population standard deviation (divide by N)\n";
  return out.str();
}

}  // namespace polarcut
