#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "crosscooc/common.hpp"

namespace ccooc {

// Single 8-bit channel, row-major.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Plane() = default;
  Plane(int w, int h) : width(w), height(h), data(std::size_t(w) * h, 0) {}

  std::uint8_t at(int row, int col) const {
    return data[std::size_t(row) * width + col];
  }
  std::uint8_t& at(int row, int col) {
    return data[std::size_t(row) * width + col];
  }
  const std::uint8_t* row(int r) const { return data.data() + std::size_t(r) * width; }
  std::uint8_t* row(int r) { return data.data() + std::size_t(r) * width; }
};

// 8-bit RGB raster, row-major, interleaved R,G,B.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(std::size_t(3) * w * h, 0) {}

  // channel is 0-based here; the 1-based naming lives in channel().
  std::uint8_t at(int row, int col, int channel) const {
    return data[(std::size_t(row) * width + col) * 3 + channel];
  }
  std::uint8_t& at(int row, int col, int channel) {
    return data[(std::size_t(row) * width + col) * 3 + channel];
  }

  bool same_dims(const RgbImage& o) const {
    return width == o.width && height == o.height;
  }
};

enum class ImageFormat { kPng, kPpm };

// Decodes PNG (8-bit RGB/RGBA/gray/palette; alpha dropped, gray and palette
// expanded to RGB) or binary PPM (P6, maxval 255). Format is sniffed from the
// file's magic bytes, not the extension.
RgbImage load_image(const std::filesystem::path& path);

void save_image(const RgbImage& img, const std::filesystem::path& path,
                ImageFormat format);

// index is 1-based: 1=Red 2=Green 3=Blue.
Plane channel(const RgbImage& img, int index);

// Reassembles three planes of equal dimensions into an interleaved image.
RgbImage from_planes(const Plane& red, const Plane& green, const Plane& blue);

// Writes a binary PGM (P5, maxval 255); used for heatmaps.
void save_pgm(const Plane& plane, const std::filesystem::path& path);

}  // namespace ccooc
