#include "crosscooc/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace ccooc {
namespace {

void check_offset(Offset off, int height, int width) {
  if (std::abs(off.da) >= height || std::abs(off.db) >= width)
    fail(Errc::kOffsetTooLarge, "offset " + to_string(off) + " for " +
                                    std::to_string(width) + "x" +
                                    std::to_string(height) + " plane");
}

// Shared scan: counts[p1(a,b)][p2(a+da, b+db)] over the in-bounds window.
// spatial_cooc is the p1 == p2 case. This is the hot path of the whole
// extractor; the inner loop is a linear scan of two rows with a table
// increment, which keeps the 256 KiB count table resident in cache.
void count_pairs(const Plane& p1, const Plane& p2, Offset off,
                 std::uint32_t* counts) {
  const int h = p1.height, w = p1.width;
  const int a0 = std::max(0, -off.da), a1 = std::min(h, h - off.da);
  const int b0 = std::max(0, -off.db), b1 = std::min(w, w - off.db);
  for (int a = a0; a < a1; ++a) {
    const std::uint8_t* r1 = p1.row(a) + b0;
    const std::uint8_t* r2 = p2.row(a + off.da) + b0 + off.db;
    const int n = b1 - b0;
    for (int b = 0; b < n; ++b)
      ++counts[(std::size_t(r1[b]) << 8) | r2[b]];
  }
}

void pair_channels(CoocSource pair, int& c1, int& c2) {
  switch (pair) {
    case CoocSource::kRG: c1 = 1; c2 = 2; return;
    case CoocSource::kGB: c1 = 2; c2 = 3; return;
    case CoocSource::kRB: c1 = 1; c2 = 3; return;
    default:
      fail(Errc::kBadParameter,
           std::string("not a channel pair: ") + to_string(pair));
  }
}

void append_normalized(FeatureTensor& t, const CoocMatrix& m) {
  std::vector<float> p = normalize(m);
  t.data.insert(t.data.end(), p.begin(), p.end());
  ++t.plane_count;
}

void put_u8(std::ofstream& out, std::uint8_t v) { out.put(char(v)); }

void put_f32_le(std::ofstream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  char b[4] = {char(bits & 0xff), char((bits >> 8) & 0xff),
               char((bits >> 16) & 0xff), char((bits >> 24) & 0xff)};
  out.write(b, 4);
}

float get_f32_le(const unsigned char* p) {
  std::uint32_t bits = std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
                       (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

std::string to_string(const Offset& o) {
  return std::to_string(o.da) + "," + std::to_string(o.db);
}

Offset parse_offset(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos)
    fail(Errc::kBadParameter, "offset must be 'dr,dc': " + text);
  try {
    return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
  } catch (const std::exception&) {
    fail(Errc::kBadParameter, "offset must be 'dr,dc': " + text);
  }
}

const char* to_string(CoocSource s) {
  switch (s) {
    case CoocSource::kRed: return "red";
    case CoocSource::kGreen: return "green";
    case CoocSource::kBlue: return "blue";
    case CoocSource::kRG: return "rg";
    case CoocSource::kGB: return "gb";
    case CoocSource::kRB: return "rb";
  }
  return "?";
}

std::uint64_t CoocMatrix::total() const {
  std::uint64_t t = 0;
  for (std::uint32_t c : counts) t += c;
  return t;
}

FeatureTensor FeatureTensor::prefix(int n) const {
  FeatureTensor out;
  out.plane_count = n;
  out.data.assign(data.begin(), data.begin() + std::size_t(n) * kCoocCells);
  return out;
}

CoocMatrix spatial_cooc(const Plane& plane, Offset offset) {
  if (plane.width < 1 || plane.height < 1)
    fail(Errc::kBadParameter, "empty plane");
  check_offset(offset, plane.height, plane.width);
  CoocMatrix m;
  m.offset = offset;
  count_pairs(plane, plane, offset, m.counts.data());
  return m;
}

CoocMatrix cross_cooc(const RgbImage& img, CoocSource pair, Offset offset) {
  int c1 = 0, c2 = 0;
  pair_channels(pair, c1, c2);
  check_offset(offset, img.height, img.width);
  CoocMatrix m;
  m.source = pair;
  m.offset = offset;
  Plane p1 = channel(img, c1);
  Plane p2 = channel(img, c2);
  count_pairs(p1, p2, offset, m.counts.data());
  return m;
}

std::vector<float> normalize(const CoocMatrix& m) {
  std::uint64_t total = m.total();
  if (total == 0) fail(Errc::kEmptyMatrix, "all-zero co-occurrence matrix");
  std::vector<float> out(kCoocCells);
  const double inv = 1.0 / double(total);
  for (std::size_t i = 0; i < kCoocCells; ++i)
    out[i] = float(double(m.counts[i]) * inv);
  return out;
}

FeatureTensor assemble_conet(const RgbImage& img, Offset tau) {
  check_offset(tau, img.height, img.width);
  FeatureTensor t;
  t.data.reserve(3 * kCoocCells);
  static constexpr CoocSource kBands[3] = {CoocSource::kRed, CoocSource::kGreen,
                                           CoocSource::kBlue};
  for (int c = 1; c <= 3; ++c) {
    Plane p = channel(img, c);
    CoocMatrix m = spatial_cooc(p, tau);
    m.source = kBands[c - 1];
    append_normalized(t, m);
  }
  return t;
}

FeatureTensor assemble_crossconet(const RgbImage& img, Offset tau,
                                  Offset tau_prime) {
  check_offset(tau, img.height, img.width);
  check_offset(tau_prime, img.height, img.width);
  Plane planes[3] = {channel(img, 1), channel(img, 2), channel(img, 3)};

  FeatureTensor t;
  t.data.reserve(6 * kCoocCells);
  static constexpr CoocSource kBands[3] = {CoocSource::kRed, CoocSource::kGreen,
                                           CoocSource::kBlue};
  for (int c = 0; c < 3; ++c) {
    CoocMatrix m;
    m.source = kBands[c];
    m.offset = tau;
    count_pairs(planes[c], planes[c], tau, m.counts.data());
    append_normalized(t, m);
  }
  // The tensor lists the pairs as [RG, RB, GB].
  static constexpr CoocSource kPairs[3] = {CoocSource::kRG, CoocSource::kRB,
                                           CoocSource::kGB};
  static constexpr int kPairIdx[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int i = 0; i < 3; ++i) {
    CoocMatrix m;
    m.source = kPairs[i];
    m.offset = tau_prime;
    count_pairs(planes[kPairIdx[i][0]], planes[kPairIdx[i][1]], tau_prime,
                m.counts.data());
    append_normalized(t, m);
  }
  return t;
}

void emit_heatmap(const CoocMatrix& m, const std::filesystem::path& path) {
  std::uint32_t max = *std::max_element(m.counts.begin(), m.counts.end());
  Plane img(kCoocBins, kCoocBins);
  if (max > 0) {
    const double denom = std::log1p(double(max));
    for (std::size_t i = 0; i < kCoocCells; ++i) {
      double v = 255.0 * std::log1p(double(m.counts[i])) / denom;
      img.data[i] = clamp_u8(v);
    }
  }
  save_pgm(img, path);
}

void write_feature_file(const FeatureTensor& t,
                        const std::filesystem::path& path) {
  if (t.plane_count != 3 && t.plane_count != 6)
    fail(Errc::kBadParameter,
         "feature tensor has " + std::to_string(t.plane_count) + " planes");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::kIoError, "cannot open " + path.string() + " for writing");
  out.write("CBCO", 4);
  put_u8(out, 1);  // version
  put_u8(out, std::uint8_t(t.plane_count));
  put_u8(out, 0);
  put_u8(out, 0);
  for (float v : t.data) put_f32_le(out, v);
  if (!out) fail(Errc::kIoError, "write failed: " + path.string());
}

FeatureTensor read_feature_file(const std::filesystem::path& path,
                                int expected_planes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kFileNotFound, path.string());
  unsigned char header[8];
  in.read(reinterpret_cast<char*>(header), 8);
  if (in.gcount() != 8 || std::memcmp(header, "CBCO", 4) != 0)
    fail(Errc::kBadMagic, "not a CBCO feature file: " + path.string());
  if (header[4] != 1)
    fail(Errc::kUnsupportedFormat,
         "CBCO version " + std::to_string(header[4]) + ": " + path.string());
  int planes = header[5];
  if (planes != 3 && planes != 6)
    fail(Errc::kCorruptStream,
         "CBCO plane count " + std::to_string(planes) + ": " + path.string());
  if (expected_planes != 0 && planes != expected_planes)
    fail(Errc::kChannelCountMismatch,
         "expected " + std::to_string(expected_planes) + " planes, file has " +
             std::to_string(planes) + ": " + path.string());

  FeatureTensor t;
  t.plane_count = planes;
  std::size_t n = std::size_t(planes) * kCoocCells;
  std::vector<unsigned char> raw(n * 4);
  in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
  if (std::size_t(in.gcount()) != raw.size())
    fail(Errc::kCorruptStream, "truncated feature file: " + path.string());
  t.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.data[i] = get_f32_le(&raw[4 * i]);
  return t;
}

}  // namespace ccooc
