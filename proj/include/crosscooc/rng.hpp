#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace ccooc::rng {

// Counter-based generator, version "ccrng-1".
//
// Every random quantity in the toolkit is addressed by a
// (seed, stream, counter) triple hashed through the splitmix64 finalizer,
// so any sample can be regenerated in isolation and per-item parallel
// fan-out stays deterministic.

inline std::uint64_t splitmix(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t counter) {
  std::uint64_t h = splitmix(seed + 0x9e3779b97f4a7c15ULL);
  h = splitmix(h ^ (stream + 0xbf58476d1ce4e5b9ULL));
  h = splitmix(h ^ (counter + 0x94d049bb133111ebULL));
  return h;
}

// Uniform in (0, 1]; never returns 0 so it is safe under log().
inline double to_unit(std::uint64_t x) {
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

inline double uniform_at(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t counter) {
  return to_unit(hash3(seed, stream, counter));
}

// One normal deviate per counter, via Box-Muller on the counter pair
// (2i, 2i+1). The sine branch is discarded to keep the stream addressable.
inline double normal_at(std::uint64_t seed, std::uint64_t stream,
                        std::uint64_t index) {
  double u1 = uniform_at(seed, stream, 2 * index);
  double u2 = uniform_at(seed, stream, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Sequential convenience wrapper over the counter stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64() { return hash3(seed_, stream_, counter_++); }

  double next_uniform() { return to_unit(next_u64()); }  // (0, 1]

  // Uniform in (-limit, limit].
  double next_symmetric(double limit) {
    return limit * (2.0 * next_uniform() - 1.0);
  }

  double next_normal() {
    double u1 = next_uniform();
    double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t x = next_u64();
      if (x >= threshold) return x % n;
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = next_below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace ccooc::rng
