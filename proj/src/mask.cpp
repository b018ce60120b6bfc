#include "polarcut/mask.hpp"

#include "polarcut/error.hpp"
#include "polarcut/simd/kernels.hpp"

namespace polarcut {

BinaryMask::BinaryMask(Dims dims, Spacing spacing)
    : dims_(dims), spacing_(spacing), bits_(dims.voxel_count(), 0) {}

BinaryMask::BinaryMask(Dims dims, Spacing spacing, std::vector<std::uint8_t> bits)
    : dims_(dims), spacing_(spacing), bits_(std::move(bits)) {
  if (bits_.size() != dims_.voxel_count())
    throw Error(errc::payload_mismatch, "payload length mismatch");
  for (std::uint8_t b : bits_)
    if (b > 1) throw Error(errc::bad_header, "mask values must be 0 or 1");
}

std::size_t BinaryMask::count() const {
  const auto c = simd::active().overlap(bits_.data(), bits_.data(), bits_.size());
  return static_cast<std::size_t>(c.a);
}

}  // namespace polarcut
