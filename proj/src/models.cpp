#include "crosscooc/models.hpp"

#include <cmath>

namespace ccooc {
namespace {

NetworkSpec build(int planes, std::uint64_t seed, int input_size) {
  NetworkSpec spec;
  spec.input_planes = planes;
  spec.input_size = input_size;
  spec.seed = seed;
  auto conv = [](int filters, int kernel) {
    return LayerSpec{LayerKind::kConv2d, filters, kernel, 0};
  };
  spec.layers = {
      conv(32, 3),
      {LayerKind::kRelu},
      conv(32, 5),
      {LayerKind::kMaxPool2x2},
      conv(64, 3),
      {LayerKind::kRelu},
      conv(64, 5),
      {LayerKind::kMaxPool2x2},
      conv(128, 3),
      {LayerKind::kRelu},
      conv(128, 5),
      {LayerKind::kMaxPool2x2},
      {LayerKind::kFlatten},
      {LayerKind::kDense, 0, 0, 256},
      {LayerKind::kRelu},
      {LayerKind::kDense, 0, 0, 1},
      {LayerKind::kSigmoid},
  };
  return spec;
}

}  // namespace

NetworkSpec build_conet(std::uint64_t seed, int input_size) {
  return build(3, seed, input_size);
}

NetworkSpec build_crossconet(std::uint64_t seed, int input_size) {
  return build(6, seed, input_size);
}

NetworkSpec width_scale(NetworkSpec spec, double factor) {
  if (!(factor > 0.0 && factor <= 1.0))
    fail(Errc::kBadParameter, "width factor must be in (0,1]");
  for (LayerSpec& ls : spec.layers) {
    if (ls.kind == LayerKind::kConv2d)
      ls.filters = std::max(1, int(std::floor(ls.filters * factor)));
    else if (ls.kind == LayerKind::kDense && ls.units > 1)
      ls.units = std::max(1, int(std::floor(ls.units * factor)));
  }
  return spec;
}

}  // namespace ccooc
