#include "crosscooc/nn.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ccooc {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), 8);
}

void put_i32(std::ofstream& out, std::int32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t get_u32(std::ifstream& in, const std::string& path) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 4))
    fail(Errc::kCorruptStream, "truncated checkpoint: " + path);
  return v;
}

std::uint64_t get_u64(std::ifstream& in, const std::string& path) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 8))
    fail(Errc::kCorruptStream, "truncated checkpoint: " + path);
  return v;
}

std::int32_t get_i32(std::ifstream& in, const std::string& path) {
  return std::int32_t(get_u32(in, path));
}

}  // namespace

void save_checkpoint(const Network<float>& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::kIoError, "cannot open " + path + " for writing");
  out.write("CCNW", 4);
  put_u32(out, 1);
  const NetworkSpec& spec = net.spec();
  put_u32(out, std::uint32_t(spec.input_planes));
  put_u32(out, std::uint32_t(spec.input_size));
  put_u64(out, spec.seed);
  put_u32(out, std::uint32_t(spec.layers.size()));
  for (const LayerSpec& ls : spec.layers) {
    put_u32(out, std::uint32_t(ls.kind));
    put_i32(out, ls.filters);
    put_i32(out, ls.kernel);
    put_i32(out, ls.units);
  }
  for (const auto& layer : net.layers()) {
    if (layer.w.data.empty()) continue;
    out.write(reinterpret_cast<const char*>(layer.w.data.data()),
              std::streamsize(layer.w.size() * 4));
    out.write(reinterpret_cast<const char*>(layer.b.data.data()),
              std::streamsize(layer.b.size() * 4));
  }
  if (!out) fail(Errc::kIoError, "write failed: " + path);
}

Network<float> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::kFileNotFound, path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "CCNW", 4) != 0)
    fail(Errc::kBadMagic, "not a checkpoint file: " + path);
  const std::uint32_t version = get_u32(in, path);
  if (version != 1)
    fail(Errc::kUnsupportedFormat,
         "checkpoint version " + std::to_string(version));
  NetworkSpec spec;
  spec.input_planes = int(get_u32(in, path));
  spec.input_size = int(get_u32(in, path));
  spec.seed = get_u64(in, path);
  const std::uint32_t nlayers = get_u32(in, path);
  if (spec.input_planes < 1 || spec.input_size < 1 || nlayers > 1024)
    fail(Errc::kCorruptStream, "implausible checkpoint header: " + path);
  for (std::uint32_t i = 0; i < nlayers; ++i) {
    LayerSpec ls;
    const std::uint32_t kind = get_u32(in, path);
    if (kind > std::uint32_t(LayerKind::kSigmoid))
      fail(Errc::kCorruptStream, "bad layer kind in " + path);
    ls.kind = LayerKind(kind);
    ls.filters = get_i32(in, path);
    ls.kernel = get_i32(in, path);
    ls.units = get_i32(in, path);
    spec.layers.push_back(ls);
  }
  Network<float> net(spec);
  for (auto* t : net.parameters()) {
    if (!in.read(reinterpret_cast<char*>(t->data.data()),
                 std::streamsize(t->size() * 4)))
      fail(Errc::kCorruptStream, "truncated parameters: " + path);
  }
  return net;
}

}  // namespace ccooc
