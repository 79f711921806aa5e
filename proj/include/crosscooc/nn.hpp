#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "crosscooc/common.hpp"
#include "crosscooc/rng.hpp"

namespace ccooc {

template <typename T>
struct TensorT {
  std::vector<int> shape;
  std::vector<T> data;

  TensorT() = default;
  explicit TensorT(std::vector<int> s) : shape(std::move(s)) {
    data.assign(numel(shape), T(0));
  }

  static std::size_t numel(const std::vector<int>& s) {
    std::size_t n = 1;
    for (int e : s) n *= std::size_t(e);
    return n;
  }

  std::size_t size() const { return data.size(); }
  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }
  void zero() { std::fill(data.begin(), data.end(), T(0)); }
};

using Tensor = TensorT<float>;

enum class LayerKind { kConv2d, kRelu, kMaxPool2x2, kFlatten, kDense, kSigmoid };

struct LayerSpec {
  LayerKind kind;
  int filters = 0;  // conv
  int kernel = 0;   // conv; odd, same-padding, stride 1
  int units = 0;    // dense
};

struct NetworkSpec {
  int input_planes = 3;
  int input_size = 256;  // square spatial extent
  std::vector<LayerSpec> layers;
  std::uint64_t seed = 0;
};

namespace detail {

// Fixed-association dot product: striped partial accumulators so the loop
// vectorizes without -ffast-math while staying bit-reproducible. 16 stripes
// fill one 512-bit vector (or two 256-bit / four 128-bit ones).
template <typename T>
T dot_striped(const T* a, const T* b, int n) {
  T acc[16] = {};
  int i = 0;
  for (; i + 16 <= n; i += 16)
    for (int l = 0; l < 16; ++l) acc[l] += a[i + l] * b[i + l];
  T tail = T(0);
  for (; i < n; ++i) tail += a[i] * b[i];
  T sum = T(0);
  for (int step = 8; step >= 1; step /= 2)
    for (int l = 0; l < step; ++l) acc[l] += acc[l + step];
  sum = acc[0] + tail;
  return sum;
}

// buf[j] += wv * src[j + shift] over the j range where the source index is
// in [0, n); zero padding contributes nothing.
template <typename T>
void shifted_axpy(T* buf, const T* src, T wv, int shift, int n) {
  const int j0 = std::max(0, -shift);
  const int j1 = n - std::max(0, shift);
  const T* s = src + j0 + shift;
  T* d = buf + j0;
  for (int j = 0; j < j1 - j0; ++j) d[j] += wv * s[j];
}

// Left-fold of all K*K tap products for one output column as a single flat
// expression, so the surrounding column loop is one straight-line block the
// vectorizer can handle. Index t enumerates (row, tap) pairs row-major.
template <typename T, int K, std::size_t... Ts>
inline T fused_taps(const T* const* rows, const T (&ww)[K][K], int base,
                    std::index_sequence<Ts...>) {
  return (T(0) + ... +
          (ww[Ts / K][Ts % K] * rows[Ts / K][base + int(Ts % K)]));
}

// buf[j] += sum over rows r and taps kj of wrows[r][kj] * rows[r][j + kj - P].
// One pass per output row instead of one per tap, so the row buffer is
// stored once per K*K multiply-adds; K is a compile-time constant so the tap
// sum flattens. Out-of-range source columns contribute nothing (zero pad).
template <typename T, int K>
void conv_rows_fused(T* __restrict buf, const T* const* rows,
                     const T* const* wrows, int nrows, int W) {
  constexpr int P = K / 2;
  const int lo = std::min(P, W);
  const int hi = std::max(W - P, lo);
  for (int j = 0; j < lo; ++j) {
    T s = T(0);
    for (int r = 0; r < nrows; ++r)
      for (int kj = 0; kj < K; ++kj) {
        const int sj = j + kj - P;
        if (sj >= 0 && sj < W) s += wrows[r][kj] * rows[r][sj];
      }
    buf[j] += s;
  }
  if (nrows == K) {  // all kernel rows in range: the common interior case
    const T* rr[K];
    T ww[K][K];
    for (int r = 0; r < K; ++r) {
      rr[r] = rows[r];
      for (int kj = 0; kj < K; ++kj) ww[r][kj] = wrows[r][kj];
    }
    for (int j = lo; j < hi; ++j)
      buf[j] += fused_taps<T, K>(rr, ww, j - P,
                                 std::make_index_sequence<K * K>{});
  } else {
    for (int j = lo; j < hi; ++j) {
      T s = T(0);
      for (int r = 0; r < nrows; ++r)
        for (int kj = 0; kj < K; ++kj)
          s += wrows[r][kj] * rows[r][j - P + kj];
      buf[j] += s;
    }
  }
  for (int j = hi; j < W; ++j) {
    T s = T(0);
    for (int r = 0; r < nrows; ++r)
      for (int kj = 0; kj < K; ++kj) {
        const int sj = j + kj - P;
        if (sj >= 0 && sj < W) s += wrows[r][kj] * rows[r][sj];
      }
    buf[j] += s;
  }
}

}  // namespace detail

// --- layer primitives ------------------------------------------------------

// x: [C,H,W], w: [F,C,k,k], b: [F] -> [F,H,W]; stride 1, same zero padding.
template <typename T>
TensorT<T> conv2d_forward(const TensorT<T>& x, const TensorT<T>& w,
                          const TensorT<T>& b) {
  if (x.shape.size() != 3 || w.shape.size() != 4 || b.shape.size() != 1 ||
      w.shape[1] != x.shape[0] || w.shape[2] != w.shape[3] ||
      w.shape[0] != b.shape[0])
    fail(Errc::kShapeMismatch, "conv2d_forward operand shapes");
  const int C = x.shape[0], H = x.shape[1], W = x.shape[2];
  const int F = w.shape[0], k = w.shape[2], pad = k / 2;
  if (k % 2 == 0) fail(Errc::kShapeMismatch, "conv kernel must be odd");

  TensorT<T> out({F, H, W});
  const std::size_t ktaps = static_cast<std::size_t>(k);
  std::vector<T> buf(static_cast<std::size_t>(W));
  std::vector<const T*> rows(ktaps);
  std::vector<const T*> wrows(ktaps);
  const std::size_t xplane = std::size_t(H) * W;
  for (int f = 0; f < F; ++f) {
    const T* wf = w.data.data() + std::size_t(f) * C * k * k;
    for (int i = 0; i < H; ++i) {
      std::fill(buf.begin(), buf.end(), T(0));
      for (int c = 0; c < C; ++c) {
        const T* xc = x.data.data() + std::size_t(c) * xplane;
        const T* wc = wf + std::size_t(c) * k * k;
        int nrows = 0;
        for (int ki = 0; ki < k; ++ki) {
          const int sy = i + ki - pad;
          if (sy < 0 || sy >= H) continue;
          rows[nrows] = xc + std::size_t(sy) * W;
          wrows[nrows] = wc + std::size_t(ki) * k;
          ++nrows;
        }
        if (k == 3)
          detail::conv_rows_fused<T, 3>(buf.data(), rows.data(), wrows.data(),
                                        nrows, W);
        else if (k == 5)
          detail::conv_rows_fused<T, 5>(buf.data(), rows.data(), wrows.data(),
                                        nrows, W);
        else
          for (int r = 0; r < nrows; ++r)
            for (int kj = 0; kj < k; ++kj)
              detail::shifted_axpy(buf.data(), rows[r], wrows[r][kj],
                                   kj - pad, W);
      }
      T* orow = out.data.data() + (std::size_t(f) * H + i) * W;
      const T bias = b[std::size_t(f)];
      for (int j = 0; j < W; ++j) orow[j] = buf[j] + bias;
    }
  }
  return out;
}

// Gradients w.r.t. x, w, b given upstream gy: [F,H,W]. Accumulates into gw/gb
// (callers zero them per batch); writes gx.
template <typename T>
void conv2d_backward(const TensorT<T>& x, const TensorT<T>& w,
                     const TensorT<T>& gy, TensorT<T>* gx, TensorT<T>* gw,
                     TensorT<T>* gb) {
  const int C = x.shape[0], H = x.shape[1], W = x.shape[2];
  const int F = w.shape[0], k = w.shape[2], pad = k / 2;
  if (gy.shape != std::vector<int>{F, H, W})
    fail(Errc::kShapeMismatch, "conv2d_backward upstream shape");

  const std::size_t plane = std::size_t(H) * W;
  if (gb) {
    for (int f = 0; f < F; ++f) {
      const T* g = gy.data.data() + std::size_t(f) * plane;
      T acc[8] = {};
      std::size_t i = 0;
      for (; i + 8 <= plane; i += 8)
        for (int l = 0; l < 8; ++l) acc[l] += g[i + l];
      T tail = T(0);
      for (; i < plane; ++i) tail += g[i];
      (*gb)[std::size_t(f)] += ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
                               ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
    }
  }

  if (gx) {
    gx->shape = x.shape;
    gx->data.assign(x.size(), T(0));
    const std::size_t ktaps = static_cast<std::size_t>(k);
    std::vector<T> buf(static_cast<std::size_t>(W));
    std::vector<const T*> rows(ktaps);
    std::vector<const T*> wrows(ktaps);
    // The input gradient is a correlation with the left-right flipped
    // kernel, so reversed per-row weights let the forward helper serve here.
    std::vector<T> wrev(ktaps * ktaps);
    for (int c = 0; c < C; ++c) {
      for (int y = 0; y < H; ++y) {
        std::fill(buf.begin(), buf.end(), T(0));
        for (int f = 0; f < F; ++f) {
          const T* wfc = w.data.data() + (std::size_t(f) * C + c) * k * k;
          int nrows = 0;
          for (int ki = 0; ki < k; ++ki) {
            const int i = y - ki + pad;  // output row feeding x row y via ki
            if (i < 0 || i >= H) continue;
            const T* wrow = wfc + std::size_t(ki) * k;
            T* rev = wrev.data() + std::size_t(nrows) * k;
            for (int kj = 0; kj < k; ++kj) rev[kj] = wrow[k - 1 - kj];
            rows[nrows] = gy.data.data() + (std::size_t(f) * H + i) * W;
            wrows[nrows] = rev;
            ++nrows;
          }
          if (k == 3)
            detail::conv_rows_fused<T, 3>(buf.data(), rows.data(),
                                          wrows.data(), nrows, W);
          else if (k == 5)
            detail::conv_rows_fused<T, 5>(buf.data(), rows.data(),
                                          wrows.data(), nrows, W);
          else
            for (int r = 0; r < nrows; ++r)
              for (int kj = 0; kj < k; ++kj)
                detail::shifted_axpy(buf.data(), rows[r],
                                     wrows[r][k - 1 - kj], pad - kj, W);
        }
        std::copy(buf.begin(), buf.end(),
                  gx->data.data() + (std::size_t(c) * H + y) * W);
      }
    }
  }

  if (gw) {
    for (int f = 0; f < F; ++f) {
      for (int c = 0; c < C; ++c) {
        T* gwfc = gw->data.data() + (std::size_t(f) * C + c) * k * k;
        for (int ki = 0; ki < k; ++ki) {
          for (int kj = 0; kj < k; ++kj) {
            const int shift = kj - pad;
            const int j0 = std::max(0, -shift);
            T acc = T(0);
            for (int i = 0; i < H; ++i) {
              const int sy = i + ki - pad;
              if (sy < 0 || sy >= H) continue;
              const T* grow = gy.data.data() + (std::size_t(f) * H + i) * W;
              const T* xrow = x.data.data() + (std::size_t(c) * H + sy) * W;
              const int n = W - std::max(0, shift) - j0;
              acc += detail::dot_striped(grow + j0, xrow + j0 + shift, n);
            }
            gwfc[std::size_t(ki) * k + kj] += acc;
          }
        }
      }
    }
  }
}

template <typename T>
TensorT<T> relu_forward(const TensorT<T>& x) {
  TensorT<T> out;
  out.shape = x.shape;
  out.data.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
  return out;
}

template <typename T>
TensorT<T> relu_backward(const TensorT<T>& x, const TensorT<T>& gy) {
  if (x.shape != gy.shape) fail(Errc::kShapeMismatch, "relu_backward shapes");
  TensorT<T> gx;
  gx.shape = x.shape;
  gx.data.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    gx.data[i] = x.data[i] > T(0) ? gy.data[i] : T(0);
  return gx;
}

// 2x2 window, stride 2; even extents required (always true here: 256 and its
// halvings). Ties route the gradient to the first maximal element in
// row-major order; argmax records the winner for backward.
template <typename T>
TensorT<T> maxpool_forward(const TensorT<T>& x, std::vector<int>* argmax) {
  if (x.shape.size() != 3 || x.shape[1] % 2 || x.shape[2] % 2)
    fail(Errc::kShapeMismatch, "maxpool needs [C,even,even]");
  const int C = x.shape[0], H = x.shape[1], W = x.shape[2];
  TensorT<T> out({C, H / 2, W / 2});
  if (argmax) argmax->resize(out.size());
  std::size_t o = 0;
  for (int c = 0; c < C; ++c) {
    const T* plane = x.data.data() + std::size_t(c) * H * W;
    for (int i = 0; i < H; i += 2) {
      for (int j = 0; j < W; j += 2, ++o) {
        const std::size_t base = std::size_t(i) * W + j;
        std::size_t best = base;
        T bv = plane[base];
        const std::size_t cands[3] = {base + 1, base + W, base + W + 1};
        for (std::size_t cand : cands)
          if (plane[cand] > bv) {
            bv = plane[cand];
            best = cand;
          }
        out.data[o] = bv;
        if (argmax) (*argmax)[o] = int(best);  // offset within channel plane
      }
    }
  }
  return out;
}

template <typename T>
TensorT<T> maxpool_backward(const std::vector<int>& shape_in,
                            const std::vector<int>& argmax,
                            const TensorT<T>& gy) {
  TensorT<T> gx(shape_in);
  const int C = shape_in[0], H = shape_in[1], W = shape_in[2];
  const std::size_t per_chan = gy.size() / std::size_t(C);
  std::size_t o = 0;
  for (int c = 0; c < C; ++c) {
    T* plane = gx.data.data() + std::size_t(c) * H * W;
    for (std::size_t q = 0; q < per_chan; ++q, ++o)
      plane[argmax[o]] += gy.data[o];
  }
  return gx;
}

// w: [units, in], b: [units].
template <typename T>
TensorT<T> dense_forward(const TensorT<T>& x, const TensorT<T>& w,
                         const TensorT<T>& b) {
  const int in = int(x.size());
  if (w.shape.size() != 2 || w.shape[1] != in || b.shape[0] != w.shape[0])
    fail(Errc::kShapeMismatch, "dense_forward operand shapes");
  const int units = w.shape[0];
  TensorT<T> out({units});
  for (int u = 0; u < units; ++u)
    out[std::size_t(u)] =
        detail::dot_striped(w.data.data() + std::size_t(u) * in,
                            x.data.data(), in) +
        b[std::size_t(u)];
  return out;
}

template <typename T>
void dense_backward(const TensorT<T>& x, const TensorT<T>& w,
                    const TensorT<T>& gy, TensorT<T>* gx, TensorT<T>* gw,
                    TensorT<T>* gb) {
  const int units = w.shape[0], in = w.shape[1];
  if (int(gy.size()) != units)
    fail(Errc::kShapeMismatch, "dense_backward upstream shape");
  if (gb)
    for (int u = 0; u < units; ++u) (*gb)[std::size_t(u)] += gy[std::size_t(u)];
  if (gw) {
    for (int u = 0; u < units; ++u) {
      T* grow = gw->data.data() + std::size_t(u) * in;
      const T g = gy[std::size_t(u)];
      const T* xv = x.data.data();
      for (int i = 0; i < in; ++i) grow[i] += g * xv[i];
    }
  }
  if (gx) {
    gx->shape = x.shape;
    gx->data.assign(x.size(), T(0));
    for (int u = 0; u < units; ++u) {
      const T* wrow = w.data.data() + std::size_t(u) * in;
      const T g = gy[std::size_t(u)];
      T* gv = gx->data.data();
      for (int i = 0; i < in; ++i) gv[i] += g * wrow[i];
    }
  }
}

template <typename T>
T sigmoid(T z) {
  return T(1) / (T(1) + std::exp(-z));
}

// Clamps the prediction to [1e-7, 1-1e-7] before the logs.
template <typename T>
T bce_loss(T y_hat, int label) {
  const T lo = T(1e-7), hi = T(1) - T(1e-7);
  const T p = std::clamp(y_hat, lo, hi);
  return label ? -std::log(p) : -std::log(T(1) - p);
}

template <typename T>
T bce_backward(T y_hat, int label) {
  const T lo = T(1e-7), hi = T(1) - T(1e-7);
  const T p = std::clamp(y_hat, lo, hi);
  return label ? -T(1) / p : T(1) / (T(1) - p);
}

// --- network ---------------------------------------------------------------

template <typename T>
class Network {
 public:
  struct Layer {
    LayerSpec spec;
    int in_c = 0, in_h = 0, in_w = 0;
    int out_c = 0, out_h = 0, out_w = 0;
    TensorT<T> w, b, gw, gb;
    TensorT<T> in_cache, out_cache;
    std::vector<int> argmax;
  };

  explicit Network(const NetworkSpec& spec) : spec_(spec) {
    int c = spec.input_planes, h = spec.input_size, w = spec.input_size;
    int param_stream = 0;
    for (const LayerSpec& ls : spec.layers) {
      Layer layer;
      layer.spec = ls;
      layer.in_c = c;
      layer.in_h = h;
      layer.in_w = w;
      switch (ls.kind) {
        case LayerKind::kConv2d: {
          layer.w = TensorT<T>({ls.filters, c, ls.kernel, ls.kernel});
          layer.b = TensorT<T>({ls.filters});
          init_kaiming(layer.w, std::size_t(c) * ls.kernel * ls.kernel,
                       param_stream++);
          c = ls.filters;
          break;
        }
        case LayerKind::kRelu:
        case LayerKind::kSigmoid:
          break;
        case LayerKind::kMaxPool2x2:
          if (h % 2 || w % 2)
            fail(Errc::kShapeMismatch, "pool input extents must be even");
          h /= 2;
          w /= 2;
          break;
        case LayerKind::kFlatten:
          c = c * h * w;
          h = w = 1;
          break;
        case LayerKind::kDense: {
          const int in = c * h * w;
          layer.w = TensorT<T>({ls.units, in});
          layer.b = TensorT<T>({ls.units});
          init_kaiming(layer.w, std::size_t(in), param_stream++);
          c = ls.units;
          h = w = 1;
          break;
        }
      }
      layer.out_c = c;
      layer.out_h = h;
      layer.out_w = w;
      layer.gw = TensorT<T>(layer.w.shape.empty() ? std::vector<int>{0}
                                                  : layer.w.shape);
      layer.gb = TensorT<T>(layer.b.shape.empty() ? std::vector<int>{0}
                                                  : layer.b.shape);
      layers_.push_back(std::move(layer));
    }
    if (c != 1 || h != 1 || w != 1)
      fail(Errc::kShapeMismatch, "network does not reduce to a scalar");
  }

  const NetworkSpec& spec() const { return spec_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers_) n += l.w.size() + l.b.size();
    return n;
  }

  // Forward pass caching activations for a subsequent backward().
  T forward(const TensorT<T>& x) {
    if (x.shape !=
        std::vector<int>{spec_.input_planes, spec_.input_size, spec_.input_size})
      fail(Errc::kShapeMismatch, "network input shape");
    TensorT<T> cur = x;
    int index = 0;
    for (Layer& l : layers_) {
      l.in_cache = std::move(cur);
      switch (l.spec.kind) {
        case LayerKind::kConv2d:
          cur = conv2d_forward(l.in_cache, l.w, l.b);
          break;
        case LayerKind::kRelu:
          cur = relu_forward(l.in_cache);
          break;
        case LayerKind::kMaxPool2x2:
          cur = maxpool_forward(l.in_cache, &l.argmax);
          break;
        case LayerKind::kFlatten:
          cur = l.in_cache;
          cur.shape = {l.out_c};
          break;
        case LayerKind::kDense:
          cur = dense_forward(l.in_cache, l.w, l.b);
          break;
        case LayerKind::kSigmoid: {
          cur = l.in_cache;
          for (auto& v : cur.data) v = sigmoid(v);
          break;
        }
      }
      // A NaN or Inf anywhere poisons a running double sum, so one pass
      // catches non-finite activations before relu comparisons could
      // silently replace them with zero.
      double acc = 0.0;
      for (const T& v : cur.data) acc += double(v);
      if (!std::isfinite(acc))
        fail(Errc::kNonFiniteFault,
             "non-finite activation after layer " + std::to_string(index));
      ++index;
    }
    if (cur.size() != 1) fail(Errc::kShapeMismatch, "non-scalar prediction");
    prediction_ = cur[0];
    if (!std::isfinite(double(prediction_)))
      fail(Errc::kNonFiniteFault, "non-finite prediction");
    layers_.back().out_cache = cur;  // for sigmoid backward
    return prediction_;
  }

  // Backward from dL/dprediction; accumulates parameter gradients.
  void backward(T dpred) {
    TensorT<T> g({1});
    g[0] = dpred;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
      Layer& l = *it;
      TensorT<T> gx;
      switch (l.spec.kind) {
        case LayerKind::kConv2d:
          conv2d_backward(l.in_cache, l.w, g, &gx, &l.gw, &l.gb);
          break;
        case LayerKind::kRelu:
          gx = relu_backward(l.in_cache, g);
          break;
        case LayerKind::kMaxPool2x2:
          gx = maxpool_backward({l.in_c, l.in_h, l.in_w}, l.argmax, g);
          break;
        case LayerKind::kFlatten:
          gx = std::move(g);
          gx.shape = {l.in_c, l.in_h, l.in_w};
          break;
        case LayerKind::kDense:
          dense_backward(l.in_cache, l.w, g, &gx, &l.gw, &l.gb);
          break;
        case LayerKind::kSigmoid: {
          gx = l.in_cache;
          const T y = prediction_;
          gx.data[0] = g.data[0] * y * (T(1) - y);
          break;
        }
      }
      g = std::move(gx);
    }
    input_grad_ = std::move(g);
  }

  void zero_grads() {
    for (Layer& l : layers_) {
      l.gw.zero();
      l.gb.zero();
    }
  }

  const TensorT<T>& input_gradient() const { return input_grad_; }

  std::vector<TensorT<T>*> parameters() {
    std::vector<TensorT<T>*> out;
    for (Layer& l : layers_)
      if (!l.w.data.empty()) {
        out.push_back(&l.w);
        out.push_back(&l.b);
      }
    return out;
  }

  std::vector<TensorT<T>*> gradients() {
    std::vector<TensorT<T>*> out;
    for (Layer& l : layers_)
      if (!l.w.data.empty()) {
        out.push_back(&l.gw);
        out.push_back(&l.gb);
      }
    return out;
  }

  // Drops cached activations (checkpoint saving, memory hygiene).
  void clear_caches() {
    for (Layer& l : layers_) {
      l.in_cache = TensorT<T>();
      l.out_cache = TensorT<T>();
      l.argmax.clear();
      l.argmax.shrink_to_fit();
    }
  }

 private:
  void init_kaiming(TensorT<T>& w, std::size_t fan_in, int stream) {
    const double bound = std::sqrt(6.0 / double(fan_in));
    rng::CounterRng gen(spec_.seed, std::uint64_t(stream));
    for (auto& v : w.data) v = T(gen.next_symmetric(bound));
  }

  NetworkSpec spec_;
  std::vector<Layer> layers_;
  T prediction_ = T(0);
  TensorT<T> input_grad_;
};

// Classical momentum: v <- momentum*v - lr*g; p <- p + v.
template <typename T>
struct OptimizerT {
  double lr = 0.01;
  double momentum = 0.9;
  std::vector<TensorT<T>> velocity;

  void step(Network<T>& net) {
    auto params = net.parameters();
    auto grads = net.gradients();
    if (velocity.empty())
      for (auto* p : params) velocity.emplace_back(p->shape);
    if (velocity.size() != params.size())
      fail(Errc::kShapeMismatch, "optimizer state does not match network");
    for (std::size_t t = 0; t < params.size(); ++t) {
      TensorT<T>& p = *params[t];
      const TensorT<T>& g = *grads[t];
      TensorT<T>& v = velocity[t];
      if (p.shape != v.shape || p.size() != g.size())
        fail(Errc::kShapeMismatch, "optimizer tensor shapes");
      bool finite = true;
      const T m = T(momentum), e = T(lr);
      for (std::size_t i = 0; i < p.size(); ++i) {
        v.data[i] = m * v.data[i] - e * g.data[i];
        p.data[i] += v.data[i];
        finite &= std::isfinite(double(p.data[i]));
      }
      if (!finite) fail(Errc::kNonFiniteFault, "non-finite parameter update");
    }
  }
};

using Optimizer = OptimizerT<float>;

// One SGD step over a batch: mean loss (pre-step) is returned; gradients are
// averaged over the batch before the update.
template <typename T>
double train_batch(Network<T>& net, const std::vector<const TensorT<T>*>& xs,
                   const std::vector<int>& labels, OptimizerT<T>& opt) {
  if (xs.empty() || xs.size() != labels.size())
    fail(Errc::kShapeMismatch, "batch inputs and labels disagree");
  net.zero_grads();
  double loss_sum = 0.0;
  const T inv = T(1.0 / double(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const T pred = net.forward(*xs[i]);
    const double loss = double(bce_loss(pred, labels[i]));
    if (!std::isfinite(loss)) fail(Errc::kNonFiniteFault, "non-finite loss");
    loss_sum += loss;
    net.backward(bce_backward(pred, labels[i]) * inv);
  }
  opt.step(net);
  return loss_sum / double(xs.size());
}

// --- checkpoint format -----------------------------------------------------
// "CCNW" | u32 version=1 | u32 input_planes | u32 input_size | u64 seed |
// u32 layer count | per layer: u32 kind, i32 filters, i32 kernel, i32 units |
// parameter tensors (w then b per parametric layer) as little-endian f32.

void save_checkpoint(const Network<float>& net, const std::string& path);
Network<float> load_checkpoint(const std::string& path);

}  // namespace ccooc
