#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "crosscooc/raster.hpp"

namespace ccooc {

// Quality factor in [1,100], IJG convention.
struct QualityFactor {
  int value = 95;
};

// 8x8 quantization tables in natural (row-major) order, entries in [1,255].
struct QuantTables {
  std::array<int, 64> luminance;
  std::array<int, 64> chrominance;
};

enum class ChromaMode {
  k444,  // no chroma subsampling (default; see README)
  k420,  // 2x2 box-averaged chroma
};

// ITU-T T.81 Annex K base tables (Tables K.1 / K.2).
const std::array<int, 64>& annex_k_luminance();
const std::array<int, 64>& annex_k_chrominance();

// Scales the Annex K bases by the IJG quality curve:
//   scale = qf < 50 ? 5000/qf : 200 - 2*qf
//   entry = clamp(floor((base*scale + 50)/100), 1, 255)
QuantTables quality_scale(QualityFactor qf);

// Baseline sequential JFIF: BT.601 color transform, 8x8 level-shifted DCT,
// Annex K Huffman tables, no restart markers.
std::vector<std::uint8_t> jpeg_encode(const RgbImage& img, QualityFactor qf,
                                      ChromaMode chroma = ChromaMode::k444);

// Decodes baseline sequential Huffman JFIF streams. Progressive or
// arithmetic-coded streams and restart intervals raise UnsupportedMode;
// malformed data raises CorruptStream.
RgbImage jpeg_decode(const std::vector<std::uint8_t>& bytes);

RgbImage jpeg_roundtrip(const RgbImage& img, QualityFactor qf,
                        ChromaMode chroma = ChromaMode::k444);

}  // namespace ccooc
