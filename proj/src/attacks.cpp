#include "crosscooc/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "crosscooc/jpegcodec.hpp"
#include "crosscooc/rng.hpp"

namespace ccooc {
namespace {

// Border policy everywhere: reflect-101 (edge pixel not repeated).
int reflect101(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

// Catmull-Rom cubic convolution kernel, a = -0.5. Exact 1 at t=0 and exact 0
// at integer |t| >= 1, so integer-aligned sampling is the identity.
double cubic_weight(double t) {
  t = std::abs(t);
  if (t <= 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
  if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
  return 0.0;
}

double bicubic_sample(const Plane& p, double y, double x) {
  const int y0 = int(std::floor(y));
  const int x0 = int(std::floor(x));
  const double fy = y - y0;
  const double fx = x - x0;
  double wy[4], wx[4];
  for (int k = 0; k < 4; ++k) {
    wy[k] = cubic_weight(fy - (k - 1));
    wx[k] = cubic_weight(fx - (k - 1));
  }
  double acc = 0.0;
  for (int k = 0; k < 4; ++k) {
    const int sy = reflect101(y0 + k - 1, p.height);
    const std::uint8_t* row = p.row(sy);
    double racc = 0.0;
    for (int l = 0; l < 4; ++l)
      racc += wx[l] * row[reflect101(x0 + l - 1, p.width)];
    acc += wy[k] * racc;
  }
  return acc;
}

RgbImage map_bicubic(const RgbImage& img, int out_w, int out_h,
                     auto source_coords) {
  Plane planes[3] = {channel(img, 1), channel(img, 2), channel(img, 3)};
  RgbImage out(out_w, out_h);
  for (int r = 0; r < out_h; ++r) {
    for (int c = 0; c < out_w; ++c) {
      auto [sy, sx] = source_coords(r, c);
      for (int ch = 0; ch < 3; ++ch)
        out.at(r, c, ch) = clamp_u8(bicubic_sample(planes[ch], sy, sx));
    }
  }
  return out;
}

RgbImage resize_to(const RgbImage& img, int out_w, int out_h) {
  const double ry = double(img.height) / out_h;
  const double rx = double(img.width) / out_w;
  return map_bicubic(img, out_w, out_h, [&](int r, int c) {
    return std::pair{(r + 0.5) * ry - 0.5, (c + 0.5) * rx - 0.5};
  });
}

// Trims a formatted double to a short decimal ("0.5", "2", "1.9").
std::string short_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

// --- individual operations -------------------------------------------------

RgbImage resize(const RgbImage& img, double factor) {
  if (!(factor > 0.0))
    fail(Errc::kDegenerateOutput, "resize factor " + short_num(factor));
  const int out_w = std::max(1, round_half_away(factor * img.width));
  const int out_h = std::max(1, round_half_away(factor * img.height));
  if (out_w == img.width && out_h == img.height && factor == 1.0) return img;
  return resize_to(img, out_w, out_h);
}

RgbImage zoom(const RgbImage& img, double factor) {
  if (factor < 1.0)
    fail(Errc::kBadParameter, "zoom factor must be >= 1, got " + short_num(factor));
  if (factor == 1.0) return img;
  RgbImage up = resize(img, factor);
  return crop_center(up, img.width, img.height);
}

RgbImage rotate(const RgbImage& img, double degrees) {
  const double theta = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(theta), sn = std::sin(theta);
  const double cy = (img.height - 1) / 2.0;
  const double cx = (img.width - 1) / 2.0;
  return map_bicubic(img, img.width, img.height, [&](int r, int c) {
    const double dy = r - cy, dx = c - cx;
    return std::pair{cy + cs * dy - sn * dx, cx + sn * dy + cs * dx};
  });
}

RgbImage crop_center(const RgbImage& img, int w, int h) {
  if (w < 1 || h < 1) fail(Errc::kBadParameter, "crop size must be positive");
  if (w > img.width || h > img.height)
    fail(Errc::kCropLargerThanImage,
         std::to_string(w) + "x" + std::to_string(h) + " from " +
             std::to_string(img.width) + "x" + std::to_string(img.height));
  const int off_c = (img.width - w) / 2;
  const int off_r = (img.height - h) / 2;
  RgbImage out(w, h);
  for (int r = 0; r < h; ++r)
    std::copy_n(img.data.data() + ((std::size_t(r + off_r) * img.width + off_c) * 3),
                std::size_t(3) * w, out.data.data() + std::size_t(3) * r * w);
  return out;
}

static void check_window(int window) {
  if (window != 3 && window != 5)
    fail(Errc::kBadWindow, "window " + std::to_string(window) + " not in {3,5}");
}

RgbImage median_filter(const RgbImage& img, int window) {
  check_window(window);
  const int rad = window / 2;
  RgbImage out(img.width, img.height);
  std::uint8_t taps[25];
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        int n = 0;
        for (int dr = -rad; dr <= rad; ++dr) {
          const int sr = reflect101(r + dr, img.height);
          for (int dc = -rad; dc <= rad; ++dc)
            taps[n++] = img.at(sr, reflect101(c + dc, img.width), ch);
        }
        std::nth_element(taps, taps + n / 2, taps + n);
        out.at(r, c, ch) = taps[n / 2];
      }
    }
  }
  return out;
}

RgbImage average_blur(const RgbImage& img, int window) {
  check_window(window);
  const int rad = window / 2;
  const int count = window * window;
  RgbImage out(img.width, img.height);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      int sum[3] = {0, 0, 0};
      for (int dr = -rad; dr <= rad; ++dr) {
        const int sr = reflect101(r + dr, img.height);
        for (int dc = -rad; dc <= rad; ++dc) {
          const int sc = reflect101(c + dc, img.width);
          for (int ch = 0; ch < 3; ++ch) sum[ch] += img.at(sr, sc, ch);
        }
      }
      for (int ch = 0; ch < 3; ++ch)
        out.at(r, c, ch) = clamp_u8(double(sum[ch]) / count);
    }
  }
  return out;
}

RgbImage gaussian_noise(const RgbImage& img, double sigma, std::uint64_t seed,
                        std::uint64_t stream) {
  if (sigma < 0.0) fail(Errc::kBadParameter, "sigma must be >= 0");
  RgbImage out(img.width, img.height);
  if (sigma == 0.0) {
    out.data = img.data;
    return out;
  }
  for (std::size_t i = 0, n = img.data.size(); i < n; ++i)
    out.data[i] = clamp_u8(img.data[i] + sigma * rng::normal_at(seed, stream, i));
  return out;
}

RgbImage gamma_correct(const RgbImage& img, double gamma) {
  if (!(gamma > 0.0)) fail(Errc::kBadParameter, "gamma must be > 0");
  std::uint8_t lut[256];
  for (int v = 0; v < 256; ++v)
    lut[v] = clamp_u8(255.0 * std::pow(v / 255.0, gamma));
  RgbImage out(img.width, img.height);
  for (std::size_t i = 0, n = img.data.size(); i < n; ++i)
    out.data[i] = lut[img.data[i]];
  return out;
}

RgbImage clahe(const RgbImage& img, double clip, int tiles_x, int tiles_y) {
  if (!(clip > 0.0)) fail(Errc::kBadParameter, "clip must be > 0");
  if (tiles_x < 1 || tiles_y < 1)
    fail(Errc::kBadParameter, "tile grid must be >= 1x1");
  const int w = img.width, h = img.height;
  const int gx = std::min(tiles_x, w);
  const int gy = std::min(tiles_y, h);

  // BT.601 luminance; chroma is carried as the per-channel difference from
  // luminance, which is equivalent to holding (Cb, Cr) fixed.
  std::vector<double> lum(std::size_t(w) * h);
  std::vector<std::uint8_t> lum8(std::size_t(w) * h);
  for (std::size_t i = 0, n = lum.size(); i < n; ++i) {
    const double y = 0.299 * img.data[3 * i] + 0.587 * img.data[3 * i + 1] +
                     0.114 * img.data[3 * i + 2];
    lum[i] = y;
    lum8[i] = clamp_u8(y);
  }

  const int tile_w = (w + gx - 1) / gx;
  const int tile_h = (h + gy - 1) / gy;

  // Per-tile equalization maps.
  std::vector<std::array<std::uint8_t, 256>> maps(std::size_t(gx) * gy);
  std::vector<double> centers_x(gx), centers_y(gy);
  for (int ty = 0; ty < gy; ++ty) {
    const int y0 = ty * tile_h, y1 = std::min(h, y0 + tile_h);
    for (int tx = 0; tx < gx; ++tx) {
      const int x0 = tx * tile_w, x1 = std::min(w, x0 + tile_w);
      centers_x[tx] = x0 + (x1 - 1 - x0) / 2.0;
      centers_y[ty] = y0 + (y1 - 1 - y0) / 2.0;

      int hist[256] = {0};
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) ++hist[lum8[std::size_t(y) * w + x]];
      const int npix = (y1 - y0) * (x1 - x0);

      const int limit = std::max(1, int(clip * npix / 256.0));
      long excess = 0;
      for (int v = 0; v < 256; ++v)
        if (hist[v] > limit) {
          excess += hist[v] - limit;
          hist[v] = limit;
        }
      const long add = excess / 256, rem = excess % 256;
      for (int v = 0; v < 256; ++v) hist[v] += int(add) + (v < rem ? 1 : 0);

      auto& map = maps[std::size_t(ty) * gx + tx];
      long cdf = 0;
      for (int v = 0; v < 256; ++v) {
        cdf += hist[v];
        map[v] = clamp_u8(double(cdf) * 255.0 / npix);
      }
    }
  }

  auto blended = [&](int x, int y, std::uint8_t v) -> double {
    // Locate the surrounding tile centers and clamp at the borders.
    int tx0 = 0;
    while (tx0 + 1 < gx && centers_x[tx0 + 1] <= x) ++tx0;
    int ty0 = 0;
    while (ty0 + 1 < gy && centers_y[ty0 + 1] <= y) ++ty0;
    int tx1 = std::min(tx0 + 1, gx - 1);
    int ty1 = std::min(ty0 + 1, gy - 1);
    double fx = 0.0, fy = 0.0;
    if (tx1 != tx0 && x >= centers_x[tx0])
      fx = (x - centers_x[tx0]) / (centers_x[tx1] - centers_x[tx0]);
    if (ty1 != ty0 && y >= centers_y[ty0])
      fy = (y - centers_y[ty0]) / (centers_y[ty1] - centers_y[ty0]);
    fx = std::clamp(fx, 0.0, 1.0);
    fy = std::clamp(fy, 0.0, 1.0);
    const double m00 = maps[std::size_t(ty0) * gx + tx0][v];
    const double m01 = maps[std::size_t(ty0) * gx + tx1][v];
    const double m10 = maps[std::size_t(ty1) * gx + tx0][v];
    const double m11 = maps[std::size_t(ty1) * gx + tx1][v];
    return (1 - fy) * ((1 - fx) * m00 + fx * m01) +
           fy * ((1 - fx) * m10 + fx * m11);
  };

  RgbImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = std::size_t(y) * w + x;
      const double new_lum = blended(x, y, lum8[i]);
      for (int ch = 0; ch < 3; ++ch) {
        const double chroma = img.data[3 * i + ch] - lum[i];
        out.data[3 * i + ch] = clamp_u8(new_lum + chroma);
      }
    }
  }
  return out;
}

RgbImage blur_then_sharpen(const RgbImage& img) {
  RgbImage blurred = average_blur(img, 3);
  static constexpr int kKernel[3][3] = {{-1, -1, -1}, {-1, 9, -1}, {-1, -1, -1}};
  RgbImage out(img.width, img.height);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      for (int ch = 0; ch < 3; ++ch) {
        int acc = 0;
        for (int dr = -1; dr <= 1; ++dr) {
          const int sr = reflect101(r + dr, img.height);
          for (int dc = -1; dc <= 1; ++dc)
            acc += kKernel[dr + 1][dc + 1] *
                   blurred.at(sr, reflect101(c + dc, img.width), ch);
        }
        out.at(r, c, ch) = clamp_u8_int(acc);
      }
    }
  }
  return out;
}

// --- spec handling ---------------------------------------------------------

void validate(const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackKind::kResize:
      if (!(spec.scale > 0.0 && spec.scale <= 1.0))
        fail(Errc::kBadParameter, "resize factor must be in (0,1]");
      break;
    case AttackKind::kZoom:
      if (!(spec.scale >= 1.0 && spec.scale <= 8.0))
        fail(Errc::kBadParameter, "zoom factor must be in [1,8]");
      break;
    case AttackKind::kRotate:
      if (!(spec.angle > -360.0 && spec.angle < 360.0))
        fail(Errc::kBadParameter, "angle must be in (-360,360)");
      break;
    case AttackKind::kCropCenter:
      if (spec.crop_w < 1 || spec.crop_h < 1)
        fail(Errc::kBadParameter, "crop size must be positive");
      break;
    case AttackKind::kMedianFilter:
    case AttackKind::kAverageBlur:
      check_window(spec.window);
      break;
    case AttackKind::kGaussianNoise:
      if (spec.sigma < 0.0) fail(Errc::kBadParameter, "sigma must be >= 0");
      break;
    case AttackKind::kGammaCorrect:
      if (!(spec.gamma > 0.0)) fail(Errc::kBadParameter, "gamma must be > 0");
      break;
    case AttackKind::kClahe:
      if (!(spec.clip > 0.0) || spec.tiles_x < 1 || spec.tiles_y < 1)
        fail(Errc::kBadParameter, "clahe needs clip > 0 and tiles >= 1x1");
      break;
    case AttackKind::kBlurThenSharpen:
      break;
    case AttackKind::kJpegCompress:
      if (spec.quality < 1 || spec.quality > 100)
        fail(Errc::kBadParameter, "jpeg quality must be in [1,100]");
      break;
  }
}

RgbImage apply(const AttackSpec& spec, const RgbImage& img,
               std::uint64_t stream) {
  validate(spec);
  switch (spec.kind) {
    case AttackKind::kResize: return resize(img, spec.scale);
    case AttackKind::kZoom: return zoom(img, spec.scale);
    case AttackKind::kRotate: return rotate(img, spec.angle);
    case AttackKind::kCropCenter: return crop_center(img, spec.crop_w, spec.crop_h);
    case AttackKind::kMedianFilter: return median_filter(img, spec.window);
    case AttackKind::kAverageBlur: return average_blur(img, spec.window);
    case AttackKind::kGaussianNoise:
      return gaussian_noise(img, spec.sigma, spec.seed, stream);
    case AttackKind::kGammaCorrect: return gamma_correct(img, spec.gamma);
    case AttackKind::kClahe:
      return clahe(img, spec.clip, spec.tiles_x, spec.tiles_y);
    case AttackKind::kBlurThenSharpen: return blur_then_sharpen(img);
    case AttackKind::kJpegCompress: {
      std::vector<std::uint8_t> bytes =
          jpeg_encode(img, QualityFactor{spec.quality});
      return jpeg_decode(bytes);
    }
  }
  fail(Errc::kBadParameter, "unknown attack kind");
}

std::string AttackSpec::to_string() const {
  switch (kind) {
    case AttackKind::kResize: return "resize:" + short_num(scale);
    case AttackKind::kZoom: return "zoom:" + short_num(scale);
    case AttackKind::kRotate: return "rotate:" + short_num(angle);
    case AttackKind::kCropCenter:
      return "crop:" + std::to_string(crop_w) + "x" + std::to_string(crop_h);
    case AttackKind::kMedianFilter: return "median:" + std::to_string(window);
    case AttackKind::kAverageBlur: return "blur:" + std::to_string(window);
    case AttackKind::kGaussianNoise: {
      std::string s = "noise:" + short_num(sigma);
      if (seed != 0) s += ":seed=" + std::to_string(seed);
      return s;
    }
    case AttackKind::kGammaCorrect: return "gamma:" + short_num(gamma);
    case AttackKind::kClahe: {
      std::string s = "ahe";
      const bool default_tiles = tiles_x == 8 && tiles_y == 8;
      if (clip != 1.0 || !default_tiles) s += ":" + short_num(clip);
      if (!default_tiles)
        s += ":" + std::to_string(tiles_x) + "x" + std::to_string(tiles_y);
      return s;
    }
    case AttackKind::kBlurThenSharpen: return "blursharpen";
    case AttackKind::kJpegCompress: return "jpeg:" + std::to_string(quality);
  }
  return "?";
}

std::string AttackSpec::operation_label() const {
  switch (kind) {
    case AttackKind::kResize: return "Resizing";
    case AttackKind::kZoom: return "Zooming";
    case AttackKind::kRotate: return "Rotation";
    case AttackKind::kCropCenter: return "Cropping";
    case AttackKind::kMedianFilter: return "Median filter";
    case AttackKind::kAverageBlur: return "Average blurring";
    case AttackKind::kGaussianNoise: return "Gaussian noise";
    case AttackKind::kGammaCorrect: return "Gamma correction";
    case AttackKind::kClahe: return "AHE";
    case AttackKind::kBlurThenSharpen: return "Blurring followed by sharpening";
    case AttackKind::kJpegCompress: return "JPEG compression";
  }
  return "?";
}

std::string AttackSpec::parameter_label() const {
  switch (kind) {
    case AttackKind::kResize:
    case AttackKind::kZoom: return short_num(scale);
    case AttackKind::kRotate: return short_num(angle);
    case AttackKind::kCropCenter: return "-";
    case AttackKind::kMedianFilter:
    case AttackKind::kAverageBlur:
      return std::to_string(window) + " x " + std::to_string(window);
    case AttackKind::kGaussianNoise: return short_num(sigma);
    case AttackKind::kGammaCorrect: return short_num(gamma);
    case AttackKind::kClahe: return "-";
    case AttackKind::kBlurThenSharpen: return "-";
    case AttackKind::kJpegCompress: return std::to_string(quality);
  }
  return "?";
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_num(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(Errc::kBadParameter, "bad " + what + ": '" + s + "'");
  }
}

std::pair<int, int> parse_dims(const std::string& s, const std::string& what) {
  auto x = s.find('x');
  if (x == std::string::npos) fail(Errc::kBadParameter, "bad " + what + ": '" + s + "'");
  return {int(parse_num(s.substr(0, x), what)), int(parse_num(s.substr(x + 1), what))};
}

}  // namespace

AttackSpec parse_attack(const std::string& text) {
  std::vector<std::string> parts = split(text, ':');
  const std::string& name = parts[0];
  auto arg = [&](std::size_t i) -> const std::string& {
    if (i >= parts.size())
      fail(Errc::kBadParameter, "attack '" + text + "' is missing a parameter");
    return parts[i];
  };

  AttackSpec spec;
  if (name == "resize") {
    spec.kind = AttackKind::kResize;
    spec.scale = parse_num(arg(1), "resize factor");
  } else if (name == "zoom") {
    spec.kind = AttackKind::kZoom;
    spec.scale = parse_num(arg(1), "zoom factor");
  } else if (name == "rotate" || name == "rotation") {
    spec.kind = AttackKind::kRotate;
    spec.angle = parse_num(arg(1), "angle");
  } else if (name == "crop") {
    spec.kind = AttackKind::kCropCenter;
    std::tie(spec.crop_w, spec.crop_h) = parse_dims(arg(1), "crop size");
  } else if (name == "median") {
    spec.kind = AttackKind::kMedianFilter;
    spec.window = int(parse_num(arg(1), "window"));
  } else if (name == "blur") {
    spec.kind = AttackKind::kAverageBlur;
    spec.window = int(parse_num(arg(1), "window"));
  } else if (name == "noise") {
    spec.kind = AttackKind::kGaussianNoise;
    spec.sigma = parse_num(arg(1), "sigma");
    for (std::size_t i = 2; i < parts.size(); ++i) {
      if (parts[i].rfind("seed=", 0) == 0)
        spec.seed = std::uint64_t(parse_num(parts[i].substr(5), "seed"));
      else
        fail(Errc::kBadParameter, "unknown noise option '" + parts[i] + "'");
    }
  } else if (name == "gamma") {
    spec.kind = AttackKind::kGammaCorrect;
    spec.gamma = parse_num(arg(1), "gamma");
  } else if (name == "ahe" || name == "clahe") {
    spec.kind = AttackKind::kClahe;
    if (parts.size() > 1) spec.clip = parse_num(parts[1], "clip");
    if (parts.size() > 2)
      std::tie(spec.tiles_x, spec.tiles_y) = parse_dims(parts[2], "tile grid");
  } else if (name == "blursharpen") {
    spec.kind = AttackKind::kBlurThenSharpen;
  } else if (name == "jpeg") {
    spec.kind = AttackKind::kJpegCompress;
    spec.quality = int(parse_num(arg(1), "quality"));
  } else {
    fail(Errc::kBadParameter, "unknown attack '" + name + "'");
  }
  validate(spec);
  return spec;
}

std::vector<AttackSpec> parse_attack_list(const std::string& csv) {
  std::vector<AttackSpec> out;
  for (const std::string& item : split(csv, ','))
    if (!item.empty()) out.push_back(parse_attack(item));
  return out;
}

}  // namespace ccooc
