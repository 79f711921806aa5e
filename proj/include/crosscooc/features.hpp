#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "crosscooc/raster.hpp"

namespace ccooc {

inline constexpr int kCoocBins = 256;
inline constexpr std::size_t kCoocCells = std::size_t(kCoocBins) * kCoocBins;

// Pixel displacement (row shift, column shift). Used both intra-channel
// (tau) and across bands (tau prime).
struct Offset {
  int da = 0;
  int db = 0;

  bool operator==(const Offset&) const = default;
};

std::string to_string(const Offset& o);
Offset parse_offset(const std::string& text);  // "dr,dc"

enum class CoocSource { kRed, kGreen, kBlue, kRG, kGB, kRB };

const char* to_string(CoocSource s);

// 256x256 grid of pair counts for one (channel or channel pair, offset).
struct CoocMatrix {
  std::vector<std::uint32_t> counts;  // row-major, counts[x*256 + y]
  CoocSource source = CoocSource::kRed;
  Offset offset;

  CoocMatrix() : counts(kCoocCells, 0) {}

  std::uint32_t at(int x, int y) const { return counts[std::size_t(x) * kCoocBins + y]; }
  std::uint64_t total() const;
};

// Stack of 3 (Co-Net) or 6 (Cross-Co-Net) normalized co-occurrence planes.
// Plane order for 6: [Red, Green, Blue, RG, RB, GB]; for 3: [Red, Green, Blue].
struct FeatureTensor {
  int plane_count = 0;
  std::vector<float> data;  // plane-major, each plane 256x256 row-major

  std::span<const float> plane(int i) const {
    return {data.data() + std::size_t(i) * kCoocCells, kCoocCells};
  }
  std::span<float> plane(int i) {
    return {data.data() + std::size_t(i) * kCoocCells, kCoocCells};
  }

  // View of the first n planes (Co-Net input is the spatial prefix of the
  // Cross-Co-Net tensor).
  FeatureTensor prefix(int n) const;
};

// counts[x][y] = #{(a,b) : plane(a,b)=x and plane(a+da, b+db)=y} over all
// in-bounds positions; the pair count sums to (H-|da|)*(V-|db|).
CoocMatrix spatial_cooc(const Plane& plane, Offset offset);

// Cross-band variant: the first value comes from channel c1 of the pair, the
// second from channel c2 displaced by the offset. Pairs: RG=(1,2), GB=(2,3),
// RB=(1,3) with 1-based channels (1=R, 2=G, 3=B).
CoocMatrix cross_cooc(const RgbImage& img, CoocSource pair, Offset offset);

// Probability normalization: entry = count / total pair count.
std::vector<float> normalize(const CoocMatrix& m);

FeatureTensor assemble_conet(const RgbImage& img, Offset tau);
FeatureTensor assemble_crossconet(const RgbImage& img, Offset tau,
                                  Offset tau_prime);

// Log-scaled grayscale rendering: intensity = round(255*log1p(count)/log1p(max)).
void emit_heatmap(const CoocMatrix& m, const std::filesystem::path& path);

// Feature-file format "CBCO": magic, 1-byte version (=1), 1-byte plane count,
// 2 reserved zero bytes, then plane-count x 256 x 256 little-endian f32,
// plane-major, row-major within plane.
void write_feature_file(const FeatureTensor& t, const std::filesystem::path& path);

// expected_planes = 0 accepts any plane count; otherwise a mismatch raises
// ChannelCountMismatch.
FeatureTensor read_feature_file(const std::filesystem::path& path,
                                int expected_planes = 0);

}  // namespace ccooc
