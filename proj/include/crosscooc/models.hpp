#pragma once

#include "crosscooc/nn.hpp"

namespace ccooc {

// The fixed six-conv topology. The two builds differ only in input planes:
// 3 (per-channel features) vs 6 (per-channel + cross-band).
NetworkSpec build_conet(std::uint64_t seed, int input_size = 256);
NetworkSpec build_crossconet(std::uint64_t seed, int input_size = 256);

// Multiplies conv filter counts and dense width by factor (floored, min 1);
// topology unchanged. factor in (0,1].
NetworkSpec width_scale(NetworkSpec spec, double factor);

}  // namespace ccooc
