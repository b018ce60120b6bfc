#pragma once

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "polarcut/geometry.hpp"
#include "polarcut/mask.hpp"

namespace polarcut {

/// Scalar intensity grid. Voxel (i, j, k) has its center at world position
/// (i*sx, j*sy, k*sz) millimetres; data is x-fastest, z-slowest.
class Volume {
public:
  Volume() = default;
  Volume(Dims dims, Spacing spacing, std::vector<float> data);

  const Dims& dims() const { return dims_; }
  const Spacing& spacing() const { return spacing_; }
  std::span<const float> data() const { return data_; }

  float at(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[dims_.index(i, j, k)];
  }

  /// (min, max) of all intensities.
  std::pair<float, float> intensity_range() const { return range_; }

  Vec3 to_voxel(const Vec3& world_mm) const {
    return {world_mm.x / spacing_.sx, world_mm.y / spacing_.sy, world_mm.z / spacing_.sz};
  }
  Vec3 to_world(const Vec3& voxel) const {
    return {voxel.x * spacing_.sx, voxel.y * spacing_.sy, voxel.z * spacing_.sz};
  }

  /// True when the world point lies in the closed box spanned by the voxel centers.
  bool contains(const Vec3& world_mm) const;

private:
  Dims dims_;
  Spacing spacing_;
  std::vector<float> data_;
  std::pair<float, float> range_{0.0f, 0.0f};
};

/// Primary seed plus extra constraint seeds, all in world millimetres.
struct SeedSet {
  Vec3 primary;
  std::vector<Vec3> extras;

  std::size_t count() const { return 1 + extras.size(); }

  /// Throws seed_out_of_bounds when any seed lies outside `v`.
  void validate(const Volume& v) const;
};

enum class VolumeFormat { native, nifti1 };

/// ".nii" selects NIfTI-1, anything else the raw + JSON sidecar format.
VolumeFormat detect_format(const std::filesystem::path& path);

Volume load_volume(const std::filesystem::path& path, VolumeFormat format);
inline Volume load_volume(const std::filesystem::path& path) {
  return load_volume(path, detect_format(path));
}

/// Loads a 0/1 mask from either format; any non-0/1 value is an error.
BinaryMask load_mask(const std::filesystem::path& path);

/// Writes `<path>` (raw float32 LE) and `<path>.json`.
void save_volume_native(const Volume& v, const std::filesystem::path& path);
/// Writes `<path>` (raw uint8) and `<path>.json` with dtype "u8".
void save_mask_native(const BinaryMask& m, const std::filesystem::path& path);

void save_volume_nifti(const Volume& v, const std::filesystem::path& path);
void save_mask_nifti(const BinaryMask& m, const std::filesystem::path& path);
std::vector<char> encode_mask_nifti(const BinaryMask& m);

/// Trilinear interpolation at a world point. Reproduces voxel values exactly
/// at voxel centers. Throws out_of_bounds outside `contains()`.
float sample_trilinear(const Volume& v, const Vec3& world_mm);

/// Discretized seed-cube mean: for each seed, average the voxels whose centers
/// fall in the half-open axis-aligned cube of edge `cube_d` voxels centered on
/// it (clipped to the volume), then average those per-seed means.
double mean_gray_around_seeds(const Volume& v, const SeedSet& seeds, int cube_d);
double mean_gray_around_seeds(const Volume& v, std::span<const Vec3> seeds, int cube_d);

}  // namespace polarcut
