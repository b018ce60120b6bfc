#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "polarcut/geometry.hpp"

namespace polarcut {

/// Voxelized segmentation: one byte per voxel holding 0 or 1, x-fastest.
class BinaryMask {
public:
  BinaryMask() = default;
  BinaryMask(Dims dims, Spacing spacing);
  BinaryMask(Dims dims, Spacing spacing, std::vector<std::uint8_t> bits);

  const Dims& dims() const { return dims_; }
  const Spacing& spacing() const { return spacing_; }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> bits() { return bits_; }

  bool at(std::size_t i, std::size_t j, std::size_t k) const {
    return bits_[dims_.index(i, j, k)] != 0;
  }
  void set(std::size_t i, std::size_t j, std::size_t k, bool on = true) {
    bits_[dims_.index(i, j, k)] = on ? 1 : 0;
  }

  std::size_t count() const;

  bool operator==(const BinaryMask&) const = default;

private:
  Dims dims_;
  Spacing spacing_;
  std::vector<std::uint8_t> bits_;
};

}  // namespace polarcut
