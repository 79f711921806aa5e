#include "crosscooc/raster.hpp"

#include <png.h>

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

namespace ccooc {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) {
    if (mode[0] == 'r')
      fail(Errc::kFileNotFound, "cannot open " + path.string());
    fail(Errc::kIoError, "cannot open " + path.string() + " for writing");
  }
  return f;
}

// ---- PNG via libpng ----

RgbImage load_png(std::FILE* f, const std::string& name) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(Errc::kIoError, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(Errc::kIoError, "libpng init failed");
  }

  RgbImage img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Errc::kCorruptStream, "corrupt PNG stream: " + name);
  }

  png_init_io(png, f);
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int depth = png_get_bit_depth(png, info);
  int color = png_get_color_type(png, info);

  if (depth == 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Errc::kUnsupportedFormat, "16-bit PNG not supported: " + name);
  }

  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  if (png_get_rowbytes(png, info) != std::size_t(3) * w) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(Errc::kUnsupportedFormat, "PNG did not expand to 8-bit RGB: " + name);
  }

  img = RgbImage(int(w), int(h));
  rows.resize(h);
  for (png_uint_32 r = 0; r < h; ++r)
    rows[r] = img.data.data() + std::size_t(3) * w * r;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void save_png(const RgbImage& img, const std::filesystem::path& path) {
  FilePtr f = open_file(path, "wb");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(Errc::kIoError, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(Errc::kIoError, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(Errc::kIoError, "PNG write failed: " + path.string());
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < img.height; ++r)
    png_write_row(png, const_cast<png_bytep>(
                           img.data.data() + std::size_t(3) * img.width * r));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// ---- PPM P6 / PGM P5 ----

// Reads one whitespace-delimited header token, skipping '#' comments.
bool next_token(std::istream& in, std::string& tok) {
  tok.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) break;
  }
  if (c == EOF) return false;
  do {
    tok.push_back(char(c));
  } while ((c = in.get()) != EOF && !std::isspace(c));
  return true;
}

RgbImage load_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kFileNotFound, "cannot open " + path.string());

  std::string magic, ws, hs, maxs;
  if (!next_token(in, magic) || magic != "P6")
    fail(Errc::kCorruptStream, "bad PPM magic in " + path.string());
  if (!next_token(in, ws) || !next_token(in, hs) || !next_token(in, maxs))
    fail(Errc::kCorruptStream, "truncated PPM header in " + path.string());

  long w = 0, h = 0, maxval = 0;
  try {
    w = std::stol(ws);
    h = std::stol(hs);
    maxval = std::stol(maxs);
  } catch (const std::exception&) {
    fail(Errc::kCorruptStream, "non-numeric PPM header in " + path.string());
  }
  if (w < 1 || h < 1)
    fail(Errc::kCorruptStream, "bad PPM dimensions in " + path.string());
  if (maxval != 255)
    fail(Errc::kUnsupportedFormat,
         "PPM maxval " + std::to_string(maxval) + " (only 255 supported)");

  RgbImage img{int(w), int(h)};
  in.read(reinterpret_cast<char*>(img.data.data()),
          std::streamsize(img.data.size()));
  if (std::size_t(in.gcount()) != img.data.size())
    fail(Errc::kCorruptStream, "truncated PPM pixel data in " + path.string());
  return img;
}

void save_ppm(const RgbImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::kIoError, "cannot open " + path.string() + " for writing");
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            std::streamsize(img.data.size()));
  if (!out) fail(Errc::kIoError, "write failed: " + path.string());
}

}  // namespace

RgbImage load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    fail(Errc::kFileNotFound, path.string());

  unsigned char magic[8] = {0};
  {
    FilePtr f = open_file(path, "rb");
    std::size_t n = std::fread(magic, 1, sizeof magic, f.get());
    if (n < 2) fail(Errc::kCorruptStream, "file too short: " + path.string());
  }

  static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (std::memcmp(magic, png_sig, 8) == 0) {
    FilePtr f = open_file(path, "rb");
    return load_png(f.get(), path.string());
  }
  if (magic[0] == 'P' && magic[1] == '6') return load_ppm(path);
  fail(Errc::kUnsupportedFormat, "not a PNG or P6 PPM: " + path.string());
}

void save_image(const RgbImage& img, const std::filesystem::path& path,
                ImageFormat format) {
  if (img.width < 1 || img.height < 1 ||
      img.data.size() != std::size_t(3) * img.width * img.height)
    fail(Errc::kBadParameter, "malformed image");
  switch (format) {
    case ImageFormat::kPng:
      save_png(img, path);
      break;
    case ImageFormat::kPpm:
      save_ppm(img, path);
      break;
  }
}

Plane channel(const RgbImage& img, int index) {
  if (index < 1 || index > 3)
    fail(Errc::kBadChannelIndex, "channel index " + std::to_string(index) +
                                     " not in {1,2,3}");
  Plane p(img.width, img.height);
  const std::uint8_t* src = img.data.data() + (index - 1);
  for (std::size_t i = 0, n = p.data.size(); i < n; ++i) p.data[i] = src[3 * i];
  return p;
}

RgbImage from_planes(const Plane& red, const Plane& green, const Plane& blue) {
  if (red.width != green.width || red.width != blue.width ||
      red.height != green.height || red.height != blue.height)
    fail(Errc::kShapeMismatch, "plane dimensions differ");
  RgbImage img(red.width, red.height);
  for (std::size_t i = 0, n = red.data.size(); i < n; ++i) {
    img.data[3 * i] = red.data[i];
    img.data[3 * i + 1] = green.data[i];
    img.data[3 * i + 2] = blue.data[i];
  }
  return img;
}

void save_pgm(const Plane& plane, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::kIoError, "cannot open " + path.string() + " for writing");
  out << "P5\n" << plane.width << " " << plane.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(plane.data.data()),
            std::streamsize(plane.data.size()));
  if (!out) fail(Errc::kIoError, "write failed: " + path.string());
}

}  // namespace ccooc
