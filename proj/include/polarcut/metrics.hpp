#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polarcut/mask.hpp"

namespace polarcut {

/// 2|A∩R| / (|A| + |R|); 1.0 when both masks are empty. Throws dims_mismatch
/// when dims or spacing differ.
double dsc(const BinaryMask& a, const BinaryMask& r);

/// Voxel count times voxel volume, in cm^3.
double volume_cm3(const BinaryMask& m);
double volume_cm3(std::size_t voxels, const Spacing& spacing);

/// One evaluated case: reference (manual), one-click and semi-automatic
/// results. Volumes are always derived from voxel counts.
struct CaseStats {
  std::string id;
  Spacing spacing;
  std::size_t vox_manual = 0;
  std::size_t vox_oneclick = 0;
  std::size_t vox_semi = 0;
  double dsc_oneclick = 0.0;
  double dsc_semi = 0.0;

  double vol_manual_cm3() const { return volume_cm3(vox_manual, spacing); }
  double vol_oneclick_cm3() const { return volume_cm3(vox_oneclick, spacing); }
  double vol_semi_cm3() const { return volume_cm3(vox_semi, spacing); }
};

struct ColumnSummary {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // population (divide by N)
};

struct Report {
  std::vector<ColumnSummary> columns;

  std::string to_csv() const;
  std::string to_text() const;
};

/// Column names of the per-case CSV, in order.
const std::vector<std::string>& case_csv_columns();
std::string case_csv_header();
std::string case_csv_row(const CaseStats& c);

/// min/max/mean/population std-dev per numeric column. Throws on an empty list.
Report summarize(const std::vector<CaseStats>& cases);

}  // namespace polarcut
