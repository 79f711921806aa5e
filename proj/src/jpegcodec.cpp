#include "crosscooc/jpegcodec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "crosscooc/common.hpp"

namespace ccooc {
namespace {

// --- fixed tables ----------------------------------------------------------

constexpr std::array<int, 64> kBaseLuminance = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

constexpr std::array<int, 64> kBaseChrominance = {
    17, 18, 24, 47, 99, 99, 99, 99,  //
    18, 21, 26, 66, 99, 99, 99, 99,  //
    24, 26, 56, 99, 99, 99, 99, 99,  //
    47, 66, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99,  //
    99, 99, 99, 99, 99, 99, 99, 99};

// Scan order -> natural order.
constexpr int kZigZag[64] = {
    0,  1,  8,  16, 9,  2,  3,  10,  //
    17, 24, 32, 25, 18, 11, 4,  5,   //
    12, 19, 26, 33, 40, 48, 41, 34,  //
    27, 20, 13, 6,  7,  14, 21, 28,  //
    35, 42, 49, 56, 57, 50, 43, 36,  //
    29, 22, 15, 23, 30, 37, 44, 51,  //
    58, 59, 52, 45, 38, 31, 39, 46,  //
    53, 60, 61, 54, 47, 55, 62, 63};

// Annex K Huffman specifications: code counts per length 1..16, then values.
struct HuffSpec {
  const std::uint8_t* bits;  // [16]
  const std::uint8_t* vals;
  int nvals;
};

constexpr std::uint8_t kDcLumBits[16] = {0, 1, 5, 1, 1, 1, 1, 1,
                                         1, 0, 0, 0, 0, 0, 0, 0};
constexpr std::uint8_t kDcVals[12] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
constexpr std::uint8_t kDcChromBits[16] = {0, 3, 1, 1, 1, 1, 1, 1,
                                           1, 1, 1, 0, 0, 0, 0, 0};

constexpr std::uint8_t kAcLumBits[16] = {0, 2, 1, 3, 3, 2, 4, 3,
                                         5, 5, 4, 4, 0, 0, 1, 0x7d};
constexpr std::uint8_t kAcLumVals[162] = {
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12, 0x21, 0x31, 0x41, 0x06,
    0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08,
    0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52, 0xd1, 0xf0, 0x24, 0x33, 0x62, 0x72,
    0x82, 0x09, 0x0a, 0x16, 0x17, 0x18, 0x19, 0x1a, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45,
    0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
    0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75,
    0x76, 0x77, 0x78, 0x79, 0x7a, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3,
    0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6,
    0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9,
    0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1, 0xe2,
    0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2, 0xf3, 0xf4,
    0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa};

constexpr std::uint8_t kAcChromBits[16] = {0, 2, 1, 2, 4, 4, 3, 4,
                                           7, 5, 4, 4, 0, 1, 2, 0x77};
constexpr std::uint8_t kAcChromVals[162] = {
    0x00, 0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41,
    0x51, 0x07, 0x61, 0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91,
    0xa1, 0xb1, 0xc1, 0x09, 0x23, 0x33, 0x52, 0xf0, 0x15, 0x62, 0x72, 0xd1,
    0x0a, 0x16, 0x24, 0x34, 0xe1, 0x25, 0xf1, 0x17, 0x18, 0x19, 0x1a, 0x26,
    0x27, 0x28, 0x29, 0x2a, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44,
    0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58,
    0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74,
    0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87,
    0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a,
    0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4,
    0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7,
    0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda,
    0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf2, 0xf3, 0xf4,
    0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa};

constexpr HuffSpec kDcLum{kDcLumBits, kDcVals, 12};
constexpr HuffSpec kDcChrom{kDcChromBits, kDcVals, 12};
constexpr HuffSpec kAcLum{kAcLumBits, kAcLumVals, 162};
constexpr HuffSpec kAcChrom{kAcChromBits, kAcChromVals, 162};

// --- DCT -------------------------------------------------------------------

struct DctBasis {
  double c[8][8];  // c[u][x] = alpha(u) * cos((2x+1) u pi / 16) / 2
  DctBasis() {
    for (int u = 0; u < 8; ++u) {
      const double alpha = u == 0 ? 1.0 / std::numbers::sqrt2 : 1.0;
      for (int x = 0; x < 8; ++x)
        c[u][x] = 0.5 * alpha *
                  std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
    }
  }
};

const DctBasis& basis() {
  static const DctBasis b;
  return b;
}

void fdct8x8(const double in[64], double out[64]) {
  const auto& b = basis();
  double tmp[64];
  for (int y = 0; y < 8; ++y)
    for (int u = 0; u < 8; ++u) {
      double acc = 0.0;
      for (int x = 0; x < 8; ++x) acc += in[y * 8 + x] * b.c[u][x];
      tmp[y * 8 + u] = acc;
    }
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      double acc = 0.0;
      for (int y = 0; y < 8; ++y) acc += tmp[y * 8 + u] * b.c[v][y];
      out[v * 8 + u] = acc;
    }
}

void idct8x8(const double in[64], double out[64]) {
  const auto& b = basis();
  double tmp[64];
  for (int v = 0; v < 8; ++v)
    for (int x = 0; x < 8; ++x) {
      double acc = 0.0;
      for (int u = 0; u < 8; ++u) acc += in[v * 8 + u] * b.c[u][x];
      tmp[v * 8 + x] = acc;
    }
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      double acc = 0.0;
      for (int v = 0; v < 8; ++v) acc += tmp[v * 8 + x] * b.c[v][y];
      out[y * 8 + x] = acc;
    }
}

// --- bit-level writer ------------------------------------------------------

struct BitWriter {
  std::vector<std::uint8_t>& out;
  std::uint32_t acc = 0;
  int nbits = 0;

  void put(std::uint32_t code, int len) {
    acc = (acc << len) | (code & ((1u << len) - 1));
    nbits += len;
    while (nbits >= 8) {
      const std::uint8_t byte = std::uint8_t(acc >> (nbits - 8));
      out.push_back(byte);
      if (byte == 0xff) out.push_back(0x00);  // byte stuffing
      nbits -= 8;
    }
  }

  void flush() {
    if (nbits == 0) return;
    const int pad = 8 - nbits;  // pad the final byte with 1 bits
    put((1u << pad) - 1, pad);
  }
};

struct HuffEncoder {
  std::uint16_t code[256];
  std::uint8_t len[256];

  explicit HuffEncoder(const HuffSpec& spec) {
    std::memset(len, 0, sizeof(len));
    std::uint16_t next = 0;
    int k = 0;
    for (int l = 1; l <= 16; ++l) {
      for (int i = 0; i < spec.bits[l - 1]; ++i, ++k) {
        code[spec.vals[k]] = next++;
        len[spec.vals[k]] = std::uint8_t(l);
      }
      next = std::uint16_t(next << 1);
    }
  }
};

int bit_category(int v) {
  int a = std::abs(v), n = 0;
  while (a) {
    ++n;
    a >>= 1;
  }
  return n;
}

void encode_block(BitWriter& bw, const int coeffs[64], int& dc_pred,
                  const HuffEncoder& dc, const HuffEncoder& ac) {
  const int diff = coeffs[0] - dc_pred;
  dc_pred = coeffs[0];
  const int dcat = bit_category(diff);
  bw.put(dc.code[dcat], dc.len[dcat]);
  if (dcat > 0) {
    const int bits = diff >= 0 ? diff : diff + (1 << dcat) - 1;
    bw.put(std::uint32_t(bits), dcat);
  }

  int run = 0;
  for (int k = 1; k < 64; ++k) {
    const int v = coeffs[k];
    if (v == 0) {
      ++run;
      continue;
    }
    while (run > 15) {
      bw.put(ac.code[0xf0], ac.len[0xf0]);
      run -= 16;
    }
    const int cat = bit_category(v);
    const int sym = (run << 4) | cat;
    bw.put(ac.code[sym], ac.len[sym]);
    const int bits = v >= 0 ? v : v + (1 << cat) - 1;
    bw.put(std::uint32_t(bits), cat);
    run = 0;
  }
  if (run > 0) bw.put(ac.code[0x00], ac.len[0x00]);
}

// --- marker helpers --------------------------------------------------------

void put16(std::vector<std::uint8_t>& out, int v) {
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v & 0xff));
}

void put_marker(std::vector<std::uint8_t>& out, std::uint8_t code) {
  out.push_back(0xff);
  out.push_back(code);
}

void put_dqt(std::vector<std::uint8_t>& out, int id,
             const std::array<int, 64>& natural) {
  put_marker(out, 0xdb);
  put16(out, 2 + 1 + 64);
  out.push_back(std::uint8_t(id));  // Pq=0 (8-bit), Tq=id
  for (int k = 0; k < 64; ++k)
    out.push_back(std::uint8_t(natural[kZigZag[k]]));
}

void put_dht(std::vector<std::uint8_t>& out, int klass, int id,
             const HuffSpec& spec) {
  put_marker(out, 0xc4);
  put16(out, 2 + 1 + 16 + spec.nvals);
  out.push_back(std::uint8_t((klass << 4) | id));
  for (int l = 0; l < 16; ++l) out.push_back(spec.bits[l]);
  for (int i = 0; i < spec.nvals; ++i) out.push_back(spec.vals[i]);
}

double sample_clamped(const std::vector<double>& plane, int w, int h, int y,
                      int x) {
  y = std::clamp(y, 0, h - 1);
  x = std::clamp(x, 0, w - 1);
  return plane[std::size_t(y) * w + x];
}

}  // namespace

const std::array<int, 64>& annex_k_luminance() { return kBaseLuminance; }
const std::array<int, 64>& annex_k_chrominance() { return kBaseChrominance; }

QuantTables quality_scale(QualityFactor qf) {
  const int q = std::clamp(qf.value, 1, 100);
  const int scale = q < 50 ? 5000 / q : 200 - 2 * q;
  QuantTables t;
  for (int k = 0; k < 64; ++k) {
    t.luminance[k] = std::clamp((kBaseLuminance[k] * scale + 50) / 100, 1, 255);
    t.chrominance[k] =
        std::clamp((kBaseChrominance[k] * scale + 50) / 100, 1, 255);
  }
  return t;
}

std::vector<std::uint8_t> jpeg_encode(const RgbImage& img, QualityFactor qf,
                                      ChromaMode chroma) {
  const int w = img.width, h = img.height;
  const QuantTables qt = quality_scale(qf);

  // BT.601 full-range color transform, kept in doubles until quantization.
  std::vector<double> ycc[3];
  for (auto& p : ycc) p.resize(std::size_t(w) * h);
  for (std::size_t i = 0, n = std::size_t(w) * h; i < n; ++i) {
    const double r = img.data[3 * i], g = img.data[3 * i + 1],
                 b = img.data[3 * i + 2];
    ycc[0][i] = 0.299 * r + 0.587 * g + 0.114 * b;
    ycc[1][i] = -0.168736 * r - 0.331264 * g + 0.5 * b + 128.0;
    ycc[2][i] = 0.5 * r - 0.418688 * g - 0.081312 * b + 128.0;
  }

  const bool sub = chroma == ChromaMode::k420;
  int cw = w, ch = h;
  if (sub) {
    cw = (w + 1) / 2;
    ch = (h + 1) / 2;
    for (int comp = 1; comp < 3; ++comp) {
      std::vector<double> down(std::size_t(cw) * ch);
      for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x) {
          double acc = 0.0;
          for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx)
              acc += sample_clamped(ycc[comp], w, h, 2 * y + dy, 2 * x + dx);
          down[std::size_t(y) * cw + x] = acc / 4.0;
        }
      ycc[comp] = std::move(down);
    }
  }

  std::vector<std::uint8_t> out;
  out.reserve(std::size_t(w) * h);
  put_marker(out, 0xd8);  // SOI

  put_marker(out, 0xe0);  // APP0 / JFIF
  put16(out, 16);
  const char jfif[5] = {'J', 'F', 'I', 'F', 0};
  out.insert(out.end(), jfif, jfif + 5);
  out.push_back(1);  // version 1.1
  out.push_back(1);
  out.push_back(0);  // density unit: none
  put16(out, 1);
  put16(out, 1);
  out.push_back(0);  // no thumbnail
  out.push_back(0);

  put_dqt(out, 0, qt.luminance);
  put_dqt(out, 1, qt.chrominance);

  put_marker(out, 0xc0);  // SOF0 baseline
  put16(out, 8 + 3 * 3);
  out.push_back(8);  // precision
  put16(out, h);
  put16(out, w);
  out.push_back(3);
  const int ys = sub ? 0x22 : 0x11;
  out.push_back(1);  // Y
  out.push_back(std::uint8_t(ys));
  out.push_back(0);
  out.push_back(2);  // Cb
  out.push_back(0x11);
  out.push_back(1);
  out.push_back(3);  // Cr
  out.push_back(0x11);
  out.push_back(1);

  put_dht(out, 0, 0, kDcLum);
  put_dht(out, 1, 0, kAcLum);
  put_dht(out, 0, 1, kDcChrom);
  put_dht(out, 1, 1, kAcChrom);

  put_marker(out, 0xda);  // SOS
  put16(out, 6 + 2 * 3);
  out.push_back(3);
  out.push_back(1);
  out.push_back(0x00);
  out.push_back(2);
  out.push_back(0x11);
  out.push_back(3);
  out.push_back(0x11);
  out.push_back(0);   // Ss
  out.push_back(63);  // Se
  out.push_back(0);   // Ah/Al

  const HuffEncoder enc_dc_lum(kDcLum), enc_ac_lum(kAcLum);
  const HuffEncoder enc_dc_chrom(kDcChrom), enc_ac_chrom(kAcChrom);
  BitWriter bw{out};
  int dc_pred[3] = {0, 0, 0};

  auto emit_block = [&](const std::vector<double>& plane, int pw, int ph,
                        int by, int bx, int comp) {
    double block[64], freq[64];
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x)
        block[y * 8 + x] =
            sample_clamped(plane, pw, ph, by + y, bx + x) - 128.0;
    fdct8x8(block, freq);
    const auto& table = comp == 0 ? qt.luminance : qt.chrominance;
    int coeffs[64];
    for (int k = 0; k < 64; ++k) {
      const int nat = kZigZag[k];
      coeffs[k] = round_half_away(freq[nat] / table[nat]);
    }
    encode_block(bw, coeffs, dc_pred[comp], comp == 0 ? enc_dc_lum : enc_dc_chrom,
                 comp == 0 ? enc_ac_lum : enc_ac_chrom);
  };

  const int mcu_w = sub ? 16 : 8, mcu_h = sub ? 16 : 8;
  const int mcus_x = (w + mcu_w - 1) / mcu_w;
  const int mcus_y = (h + mcu_h - 1) / mcu_h;
  for (int my = 0; my < mcus_y; ++my) {
    for (int mx = 0; mx < mcus_x; ++mx) {
      if (sub) {
        for (int by = 0; by < 2; ++by)
          for (int bx = 0; bx < 2; ++bx)
            emit_block(ycc[0], w, h, my * 16 + by * 8, mx * 16 + bx * 8, 0);
        emit_block(ycc[1], cw, ch, my * 8, mx * 8, 1);
        emit_block(ycc[2], cw, ch, my * 8, mx * 8, 2);
      } else {
        emit_block(ycc[0], w, h, my * 8, mx * 8, 0);
        emit_block(ycc[1], w, h, my * 8, mx * 8, 1);
        emit_block(ycc[2], w, h, my * 8, mx * 8, 2);
      }
    }
  }
  bw.flush();

  put_marker(out, 0xd9);  // EOI
  return out;
}

// --- decoder ---------------------------------------------------------------

namespace {

struct ByteReader {
  const std::uint8_t* p;
  std::size_t n;
  std::size_t pos = 0;

  std::uint8_t u8() {
    if (pos >= n) fail(Errc::kCorruptStream, "truncated JPEG stream");
    return p[pos++];
  }
  int u16() {
    const int hi = u8();
    return (hi << 8) | u8();
  }
  void skip(int k) {
    if (pos + std::size_t(k) > n)
      fail(Errc::kCorruptStream, "truncated JPEG segment");
    pos += std::size_t(k);
  }
};

struct HuffDecoder {
  // T.81 F.2.2.3 canonical decode tables.
  int mincode[17];
  int maxcode[17];  // -1 when no codes of that length
  int valptr[17];
  std::uint8_t vals[256];
  bool present = false;

  void build(const std::uint8_t bits[16], const std::uint8_t* values,
             int nvals) {
    std::copy_n(values, nvals, vals);
    int code = 0, k = 0;
    for (int l = 1; l <= 16; ++l) {
      if (bits[l - 1] == 0) {
        mincode[l] = 0;
        maxcode[l] = -1;
      } else {
        valptr[l] = k;
        mincode[l] = code;
        code += bits[l - 1];
        k += bits[l - 1];
        maxcode[l] = code - 1;
      }
      code <<= 1;
    }
    present = true;
  }
};

struct BitReader {
  ByteReader& in;
  std::uint32_t acc = 0;
  int nbits = 0;

  int next_bit() {
    if (nbits == 0) {
      const std::uint8_t byte = in.u8();
      if (byte == 0xff && in.u8() != 0x00)
        fail(Errc::kCorruptStream, "marker inside entropy-coded data");
      acc = byte;
      nbits = 8;
    }
    --nbits;
    return int((acc >> nbits) & 1);
  }

  int receive(int len) {
    int v = 0;
    for (int i = 0; i < len; ++i) v = (v << 1) | next_bit();
    return v;
  }

  int decode(const HuffDecoder& table) {
    int code = next_bit();
    int l = 1;
    while (code > table.maxcode[l]) {
      if (++l > 16) fail(Errc::kCorruptStream, "invalid Huffman code");
      code = (code << 1) | next_bit();
    }
    return table.vals[table.valptr[l] + code - table.mincode[l]];
  }
};

int extend(int v, int cat) {
  if (cat == 0) return 0;
  return v < (1 << (cat - 1)) ? v - (1 << cat) + 1 : v;
}

struct Component {
  int id = 0;
  int hs = 1, vs = 1;
  int quant_id = 0;
  int dc_table = 0, ac_table = 0;
  int plane_w = 0, plane_h = 0;  // padded to whole blocks across all MCUs
  std::vector<std::uint8_t> plane;
};

}  // namespace

RgbImage jpeg_decode(const std::vector<std::uint8_t>& bytes) {
  ByteReader in{bytes.data(), bytes.size()};
  if (in.u8() != 0xff || in.u8() != 0xd8)
    fail(Errc::kCorruptStream, "missing SOI marker");

  std::array<std::array<int, 64>, 4> quant{};
  std::array<bool, 4> quant_seen{};
  HuffDecoder dc_tables[4], ac_tables[4];
  std::vector<Component> comps;
  int width = 0, height = 0;
  bool have_frame = false, done = false;

  while (!done) {
    std::uint8_t byte = in.u8();
    if (byte != 0xff) fail(Errc::kCorruptStream, "expected marker");
    std::uint8_t marker = in.u8();
    while (marker == 0xff) marker = in.u8();  // fill bytes

    switch (marker) {
      case 0xd9:  // EOI
        done = true;
        break;
      case 0xc0: {  // SOF0 baseline sequential
        const int len = in.u16();
        if (in.u8() != 8)
          fail(Errc::kUnsupportedMode, "sample precision != 8");
        height = in.u16();
        width = in.u16();
        const int nc = in.u8();
        if (len != 8 + 3 * nc) fail(Errc::kCorruptStream, "bad SOF0 length");
        if (nc != 1 && nc != 3)
          fail(Errc::kUnsupportedMode, "component count " + std::to_string(nc));
        if (width < 1 || height < 1)
          fail(Errc::kCorruptStream, "empty frame");
        comps.resize(std::size_t(nc));
        for (auto& c : comps) {
          c.id = in.u8();
          const int s = in.u8();
          c.hs = s >> 4;
          c.vs = s & 0xf;
          c.quant_id = in.u8();
          if (c.hs < 1 || c.hs > 2 || c.vs < 1 || c.vs > 2)
            fail(Errc::kUnsupportedMode, "sampling factors beyond 2x2");
          if (c.quant_id > 3) fail(Errc::kCorruptStream, "bad quant id");
        }
        have_frame = true;
        break;
      }
      case 0xc2:
        fail(Errc::kUnsupportedMode, "progressive JPEG");
      case 0xc9:
      case 0xca:
      case 0xcb:
      case 0xcd:
      case 0xce:
      case 0xcf:
        fail(Errc::kUnsupportedMode, "arithmetic-coded JPEG");
      case 0xc1:
      case 0xc3:
      case 0xc5:
      case 0xc6:
      case 0xc7:
        fail(Errc::kUnsupportedMode, "non-baseline frame type");
      case 0xdd:
        fail(Errc::kUnsupportedMode, "restart intervals");
      case 0xdb: {  // DQT
        int len = in.u16() - 2;
        while (len > 0) {
          const int pq_tq = in.u8();
          const int pq = pq_tq >> 4, tq = pq_tq & 0xf;
          if (pq != 0) fail(Errc::kUnsupportedMode, "16-bit quant table");
          if (tq > 3) fail(Errc::kCorruptStream, "bad quant table id");
          for (int k = 0; k < 64; ++k) quant[tq][kZigZag[k]] = in.u8();
          quant_seen[tq] = true;
          len -= 65;
        }
        if (len != 0) fail(Errc::kCorruptStream, "bad DQT length");
        break;
      }
      case 0xc4: {  // DHT
        int len = in.u16() - 2;
        while (len > 0) {
          const int tc_th = in.u8();
          const int tc = tc_th >> 4, th = tc_th & 0xf;
          if (tc > 1 || th > 3) fail(Errc::kCorruptStream, "bad DHT header");
          std::uint8_t bits[16];
          int nvals = 0;
          for (int l = 0; l < 16; ++l) {
            bits[l] = in.u8();
            nvals += bits[l];
          }
          if (nvals > 256) fail(Errc::kCorruptStream, "bad DHT counts");
          std::vector<std::uint8_t> values(static_cast<std::size_t>(nvals));
          for (auto& v : values) v = in.u8();
          (tc == 0 ? dc_tables[th] : ac_tables[th])
              .build(bits, values.data(), nvals);
          len -= 1 + 16 + nvals;
        }
        if (len != 0) fail(Errc::kCorruptStream, "bad DHT length");
        break;
      }
      case 0xda: {  // SOS
        if (!have_frame) fail(Errc::kCorruptStream, "SOS before SOF");
        const int len = in.u16();
        const int ns = in.u8();
        if (len != 6 + 2 * ns || ns != int(comps.size()))
          fail(Errc::kCorruptStream, "bad SOS header");
        for (int i = 0; i < ns; ++i) {
          const int cid = in.u8();
          const int tables = in.u8();
          auto it = std::find_if(comps.begin(), comps.end(),
                                 [&](const Component& c) { return c.id == cid; });
          if (it == comps.end())
            fail(Errc::kCorruptStream, "SOS references unknown component");
          it->dc_table = tables >> 4;
          it->ac_table = tables & 0xf;
        }
        if (in.u8() != 0 || in.u8() != 63 || in.u8() != 0)
          fail(Errc::kUnsupportedMode, "non-baseline spectral selection");

        int hmax = 1, vmax = 1;
        for (const auto& c : comps) {
          hmax = std::max(hmax, c.hs);
          vmax = std::max(vmax, c.vs);
        }
        const int mcus_x = (width + 8 * hmax - 1) / (8 * hmax);
        const int mcus_y = (height + 8 * vmax - 1) / (8 * vmax);
        for (auto& c : comps) {
          if (!quant_seen[std::size_t(c.quant_id)])
            fail(Errc::kCorruptStream, "missing quant table");
          if (!dc_tables[c.dc_table].present || !ac_tables[c.ac_table].present)
            fail(Errc::kCorruptStream, "missing Huffman table");
          c.plane_w = mcus_x * 8 * c.hs;
          c.plane_h = mcus_y * 8 * c.vs;
          c.plane.assign(std::size_t(c.plane_w) * c.plane_h, 0);
        }

        BitReader br{in};
        int dc_pred[4] = {0, 0, 0, 0};
        for (int my = 0; my < mcus_y; ++my) {
          for (int mx = 0; mx < mcus_x; ++mx) {
            for (std::size_t ci = 0; ci < comps.size(); ++ci) {
              Component& c = comps[ci];
              for (int by = 0; by < c.vs; ++by) {
                for (int bx = 0; bx < c.hs; ++bx) {
                  const int dcat = br.decode(dc_tables[c.dc_table]);
                  if (dcat > 11)
                    fail(Errc::kCorruptStream, "DC category out of range");
                  dc_pred[ci] += extend(br.receive(dcat), dcat);
                  double freq[64] = {0};
                  const auto& q = quant[std::size_t(c.quant_id)];
                  freq[0] = double(dc_pred[ci]) * q[0];
                  for (int k = 1; k < 64;) {
                    const int rs = br.decode(ac_tables[c.ac_table]);
                    const int run = rs >> 4, cat = rs & 0xf;
                    if (cat == 0) {
                      if (run != 15) break;  // EOB (ZRL when run==15)
                      k += 16;
                      continue;
                    }
                    k += run;
                    if (k > 63)
                      fail(Errc::kCorruptStream, "AC index out of range");
                    const int nat = kZigZag[k];
                    freq[nat] = double(extend(br.receive(cat), cat)) * q[nat];
                    ++k;
                  }
                  double pix[64];
                  idct8x8(freq, pix);
                  const int oy = (my * c.vs + by) * 8;
                  const int ox = (mx * c.hs + bx) * 8;
                  for (int y = 0; y < 8; ++y) {
                    std::uint8_t* row =
                        c.plane.data() + std::size_t(oy + y) * c.plane_w + ox;
                    for (int x = 0; x < 8; ++x)
                      row[x] = clamp_u8(pix[y * 8 + x] + 128.0);
                  }
                }
              }
            }
          }
        }
        break;
      }
      case 0xdc:
      case 0xde:
      case 0xdf:
        fail(Errc::kUnsupportedMode, "unsupported marker segment");
      default:
        if ((marker >= 0xe0 && marker <= 0xef) || marker == 0xfe) {
          const int len = in.u16();
          if (len < 2) fail(Errc::kCorruptStream, "bad segment length");
          in.skip(len - 2);
        } else if (marker >= 0xd0 && marker <= 0xd7) {
          fail(Errc::kCorruptStream, "restart marker without DRI");
        } else {
          fail(Errc::kCorruptStream,
               "unexpected marker code " + std::to_string(int(marker)));
        }
    }
  }

  if (!have_frame || comps.empty() || comps[0].plane.empty())
    fail(Errc::kCorruptStream, "no image data");

  int hmax = 1, vmax = 1;
  for (const auto& c : comps) {
    hmax = std::max(hmax, c.hs);
    vmax = std::max(vmax, c.vs);
  }

  // Fixed-point YCbCr->RGB with 16 fractional bits, the BT.601 constants
  // rounded the same way common JFIF decoders round them, so independent
  // decoders land on the same integers given equal component planes.
  constexpr int kScale = 16;
  constexpr std::int32_t kHalf = 1 << (kScale - 1);
  auto fix = [](double v) { return std::int32_t(v * (1 << kScale) + 0.5); };
  std::int32_t cr_r[256], cb_b[256], cr_g[256], cb_g[256];
  for (int i = 0; i < 256; ++i) {
    const std::int32_t x = i - 128;
    cr_r[i] = (fix(1.40200) * x + kHalf) >> kScale;
    cb_b[i] = (fix(1.77200) * x + kHalf) >> kScale;
    cr_g[i] = -fix(0.71414) * x;
    cb_g[i] = -fix(0.34414) * x + kHalf;
  }

  RgbImage img(width, height);
  auto sample = [&](const Component& c, int y, int x) -> int {
    const int sy = y * c.vs / vmax;
    const int sx = x * c.hs / hmax;
    return c.plane[std::size_t(sy) * c.plane_w + sx];
  };
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      std::uint8_t* px = &img.at(y, x, 0);
      if (comps.size() == 1) {
        const auto v = std::uint8_t(sample(comps[0], y, x));
        px[0] = px[1] = px[2] = v;
      } else {
        const int yy = sample(comps[0], y, x);
        const int cb = sample(comps[1], y, x);
        const int cr = sample(comps[2], y, x);
        px[0] = clamp_u8_int(yy + cr_r[cr]);
        px[1] = clamp_u8_int(yy + ((cb_g[cb] + cr_g[cr]) >> kScale));
        px[2] = clamp_u8_int(yy + cb_b[cb]);
      }
    }
  }
  return img;
}

RgbImage jpeg_roundtrip(const RgbImage& img, QualityFactor qf,
                        ChromaMode chroma) {
  return jpeg_decode(jpeg_encode(img, qf, chroma));
}

}  // namespace ccooc
