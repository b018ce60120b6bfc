#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace polarcut {

struct GrayImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

/// 8-bit grayscale PNG bytes.
std::string encode_png(const GrayImage& img);
GrayImage decode_png(std::span<const std::uint8_t> bytes);

}  // namespace polarcut
