#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crosscooc/raster.hpp"

namespace ccooc {

enum class AttackKind {
  kResize,
  kZoom,
  kRotate,
  kCropCenter,
  kMedianFilter,
  kAverageBlur,
  kGaussianNoise,
  kGammaCorrect,
  kClahe,
  kBlurThenSharpen,
  kJpegCompress,
};

// One post-processing operation with its parameters. Serialized as
// "kind:param[:param...]" strings, e.g. resize:0.8, noise:2.0:seed=7,
// jpeg:85, crop:880x880, blursharpen.
struct AttackSpec {
  AttackKind kind = AttackKind::kResize;
  double scale = 1.0;       // resize / zoom factor
  double angle = 0.0;       // rotate, degrees
  int crop_w = 0, crop_h = 0;
  int window = 3;           // median / average filter
  double sigma = 0.0;       // gaussian noise
  std::uint64_t seed = 0;   // gaussian noise stream
  double gamma = 1.0;
  double clip = 1.0;        // clahe
  int tiles_x = 8, tiles_y = 8;
  int quality = 95;         // jpeg

  std::string to_string() const;
  // Short human label pair used in report rows, e.g. ("Median filter", "3 x 3").
  std::string operation_label() const;
  std::string parameter_label() const;
};

AttackSpec parse_attack(const std::string& text);
std::vector<AttackSpec> parse_attack_list(const std::string& csv);

// Validates parameter ranges (scale in (0,8], window in {3,5}, angle in
// (-360,360), gamma > 0, sigma >= 0, quality in [1,100]).
void validate(const AttackSpec& spec);

// --- individual operations -------------------------------------------------

// Bicubic (Catmull-Rom, a = -0.5) resampling to round(factor*dim), min 1.
// Out-of-range taps use reflect-101 borders; samples are clamped to [0,255]
// and rounded half away from zero.
RgbImage resize(const RgbImage& img, double factor);

// Bicubic upscale by factor >= 1, then center-crop back to the original
// dimensions.
RgbImage zoom(const RgbImage& img, double factor);

// Rotation about the image center, bicubic sampling, reflect-101 borders;
// output dimensions unchanged.
RgbImage rotate(const RgbImage& img, double degrees);

// Central window with offsets floor((dim-target)/2); bit-exact copy.
RgbImage crop_center(const RgbImage& img, int w, int h);

RgbImage median_filter(const RgbImage& img, int window);
RgbImage average_blur(const RgbImage& img, int window);

// Adds i.i.d. zero-mean normal noise per sample; deterministic given
// (seed, stream) under the counter-based generator (see rng.hpp). stream
// lets corpus-level application key the noise by image index.
RgbImage gaussian_noise(const RgbImage& img, double sigma, std::uint64_t seed,
                        std::uint64_t stream = 0);

RgbImage gamma_correct(const RgbImage& img, double gamma);

// Contrast-limited adaptive histogram equalization on the BT.601 luminance,
// chroma untouched. Tile histograms are clipped at clip*(tile pixels/256)
// with the excess redistributed uniformly; tile mappings are blended
// bilinearly between tile centers.
RgbImage clahe(const RgbImage& img, double clip, int tiles_x, int tiles_y);

// average_blur(3) followed by the 3x3 sharpening kernel
// [[-1,-1,-1],[-1,9,-1],[-1,-1,-1]].
RgbImage blur_then_sharpen(const RgbImage& img);

// Dispatches on spec.kind. stream feeds gaussian noise so
// per-image corpus application stays deterministic.
RgbImage apply(const AttackSpec& spec, const RgbImage& img,
               std::uint64_t stream = 0);

}  // namespace ccooc
