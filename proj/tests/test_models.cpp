#include "crosscooc/models.hpp"

#include <gtest/gtest.h>

#include <vector>

using namespace ccooc;

namespace {

std::vector<LayerKind> kinds_of(const NetworkSpec& spec) {
  std::vector<LayerKind> out;
  for (const auto& l : spec.layers) out.push_back(l.kind);
  return out;
}

}  // namespace

TEST(Models, TopologyIsSixConvThreePoolTwoDense) {
  const NetworkSpec spec = build_crossconet(0);
  const std::vector<LayerKind> want = {
      LayerKind::kConv2d, LayerKind::kRelu,    LayerKind::kConv2d,
      LayerKind::kMaxPool2x2, LayerKind::kConv2d, LayerKind::kRelu,
      LayerKind::kConv2d, LayerKind::kMaxPool2x2, LayerKind::kConv2d,
      LayerKind::kRelu,   LayerKind::kConv2d,  LayerKind::kMaxPool2x2,
      LayerKind::kFlatten, LayerKind::kDense,  LayerKind::kRelu,
      LayerKind::kDense,  LayerKind::kSigmoid};
  EXPECT_EQ(kinds_of(spec), want);

  int conv_i = 0;
  const int filters[] = {32, 32, 64, 64, 128, 128};
  const int kernels[] = {3, 5, 3, 5, 3, 5};
  for (const auto& l : spec.layers)
    if (l.kind == LayerKind::kConv2d) {
      EXPECT_EQ(l.filters, filters[conv_i]);
      EXPECT_EQ(l.kernel, kernels[conv_i]);
      ++conv_i;
    }
  EXPECT_EQ(conv_i, 6);
  EXPECT_EQ(spec.layers[13].units, 256);
  EXPECT_EQ(spec.layers[15].units, 1);
}

TEST(Models, InputPlanesDifferOnlyBetweenVariants) {
  const NetworkSpec cross = build_crossconet(3);
  const NetworkSpec co = build_conet(3);
  EXPECT_EQ(cross.input_planes, 6);
  EXPECT_EQ(co.input_planes, 3);
  EXPECT_EQ(cross.input_size, 256);
  EXPECT_EQ(co.layers.size(), cross.layers.size());
  EXPECT_EQ(co.seed, 3u);
}

TEST(Models, SpatialChainShrinksByPools) {
  // Scaled width keeps the spatial algebra identical while fitting in RAM.
  const NetworkSpec spec = width_scale(build_crossconet(1), 0.1);
  const Network<float> net(spec);
  // After each pool the extent halves: 256 -> 128 -> 64 -> 32.
  EXPECT_EQ(net.layers()[3].out_h, 128);
  EXPECT_EQ(net.layers()[7].out_h, 64);
  EXPECT_EQ(net.layers()[11].out_h, 32);
  // Flatten joins all remaining activations.
  const int last_conv_filters = spec.layers[10].filters;
  EXPECT_EQ(net.layers()[12].out_c, last_conv_filters * 32 * 32);
}

TEST(Models, WidthScaleQuartersFiltersAndDense) {
  const NetworkSpec spec = width_scale(build_crossconet(0), 0.25);
  std::vector<int> filters;
  for (const auto& l : spec.layers)
    if (l.kind == LayerKind::kConv2d) filters.push_back(l.filters);
  EXPECT_EQ(filters, (std::vector<int>{8, 8, 16, 16, 32, 32}));
  EXPECT_EQ(spec.layers[13].units, 64);
  EXPECT_EQ(spec.layers[15].units, 1);  // scalar head is never scaled

  EXPECT_THROW(width_scale(build_conet(0), 0.0), Error);
  EXPECT_THROW(width_scale(build_conet(0), 1.5), Error);
  EXPECT_THROW(width_scale(build_conet(0), -0.5), Error);
}

TEST(Models, WidthScaleFloorsWithMinimumOne) {
  const NetworkSpec spec = width_scale(build_conet(0), 0.01);
  for (const auto& l : spec.layers)
    if (l.kind == LayerKind::kConv2d) EXPECT_GE(l.filters, 1);
}

TEST(Models, FullWidthParameterCounts) {
  // Frozen totals for the two full-size variants; any change to kernel
  // sizes, filter counts, padding, or head layout will move these.
  {
    const Network<float> cross(build_crossconet(0));
    EXPECT_EQ(cross.parameter_count(), 34186881u);
  }
  {
    const Network<float> co(build_conet(0));
    EXPECT_EQ(co.parameter_count(), 34186017u);
  }
}
