#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rocap/errors.hpp"

namespace rocap {

/// 8-bit interleaved image, 1 (grayscale) or 3 (RGB) channels.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> data;  // row-major, interleaved

  static Image rgb(int width, int height, std::uint8_t r = 0, std::uint8_t g = 0,
                   std::uint8_t b = 0);
  static Image gray(int width, int height, std::uint8_t value = 0);

  std::uint8_t& at(int x, int y, int c) {
    return data[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
};

/// Writes PPM (P6) / PGM (P5) / PNG depending on the file extension
/// (.ppm/.pgm/.png). PGM requires a single-channel image.
void write_image(const Image& img, const std::filesystem::path& path);

/// Reads PPM (P6), PGM (P5), or PNG (8-bit gray or RGB, non-interlaced),
/// sniffing the format from the file magic.
Image read_image(const std::filesystem::path& path);

}  // namespace rocap
