#pragma once
// The seven layer kinds and their hand-written forward/backward kernels.
// Kernels are free functions templated on the scalar type; the float
// instantiation is the production path, the double instantiation backs
// the 64-bit gradient-check harness.
//
// Backward convention: parameter gradients are ACCUMULATED into the
// caller's gradient tensors (callers zero them per pass; recurrent
// training sums across time steps), the returned tensor is the gradient
// with respect to the layer input.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tensor.hpp"

namespace genlab {

enum class LayerKind { kDense, kConv2d, kReLU, kMaxPool2, kSoftmax, kLSTMCell, kEmbeddingLookup };

inline const char* kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::kDense: return "dense";
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kReLU: return "relu";
    case LayerKind::kMaxPool2: return "maxpool2";
    case LayerKind::kSoftmax: return "softmax";
    case LayerKind::kLSTMCell: return "lstm";
    case LayerKind::kEmbeddingLookup: return "embedding";
  }
  return "?";
}

struct LayerSpec {
  LayerKind kind = LayerKind::kReLU;
  // dense
  int in_features = 0, out_features = 0;
  // conv2d
  int in_channels = 0, out_channels = 0, kernel = 0, stride = 1, pad = 0;
  // embedding lookup
  int vocab_size = 0, embed_dim = 0;
  // lstm cell
  int input_size = 0, hidden_size = 0;

  static LayerSpec dense(int in, int out) {
    LayerSpec s;
    s.kind = LayerKind::kDense;
    s.in_features = in;
    s.out_features = out;
    return s;
  }
  static LayerSpec conv2d(int in_c, int out_c, int k, int stride = 1, int pad = 0) {
    LayerSpec s;
    s.kind = LayerKind::kConv2d;
    s.in_channels = in_c;
    s.out_channels = out_c;
    s.kernel = k;
    s.stride = stride;
    s.pad = pad;
    return s;
  }
  static LayerSpec relu() {
    LayerSpec s;
    s.kind = LayerKind::kReLU;
    return s;
  }
  static LayerSpec maxpool2() {
    LayerSpec s;
    s.kind = LayerKind::kMaxPool2;
    return s;
  }
  static LayerSpec softmax() {
    LayerSpec s;
    s.kind = LayerKind::kSoftmax;
    return s;
  }
  static LayerSpec lstm_cell(int input, int hidden) {
    LayerSpec s;
    s.kind = LayerKind::kLSTMCell;
    s.input_size = input;
    s.hidden_size = hidden;
    return s;
  }
  static LayerSpec embedding(int vocab, int dim) {
    LayerSpec s;
    s.kind = LayerKind::kEmbeddingLookup;
    s.vocab_size = vocab;
    s.embed_dim = dim;
    return s;
  }
};

// Shape a layer produces for a given input shape. Throws
// std::invalid_argument on any mismatch; Model prefixes the layer index.
inline std::vector<int> output_dims(const LayerSpec& s, const std::vector<int>& in) {
  int64_t n = checked_numel(in);
  switch (s.kind) {
    case LayerKind::kDense:
      if (n != s.in_features)
        throw std::invalid_argument("dense expects " + std::to_string(s.in_features) +
                                    " inputs, got " + dims_to_string(in));
      return {s.out_features};
    case LayerKind::kConv2d: {
      if (in.size() != 3 || in[0] != s.in_channels)
        throw std::invalid_argument("conv2d expects [" + std::to_string(s.in_channels) +
                                    ",H,W], got " + dims_to_string(in));
      int oh = (in[1] + 2 * s.pad - s.kernel) / s.stride + 1;
      int ow = (in[2] + 2 * s.pad - s.kernel) / s.stride + 1;
      if (oh < 1 || ow < 1)
        throw std::invalid_argument("conv2d kernel " + std::to_string(s.kernel) +
                                    " does not fit input " + dims_to_string(in));
      return {s.out_channels, oh, ow};
    }
    case LayerKind::kReLU:
      return in;
    case LayerKind::kMaxPool2:
      if (in.size() != 3 || in[1] % 2 != 0 || in[2] % 2 != 0)
        throw std::invalid_argument("maxpool2 expects [C,H,W] with even H and W, got " +
                                    dims_to_string(in));
      return {in[0], in[1] / 2, in[2] / 2};
    case LayerKind::kSoftmax:
      return in;
    case LayerKind::kLSTMCell:
      if (n != s.input_size + 2 * s.hidden_size)
        throw std::invalid_argument("lstm expects flat [x;h;c] of length " +
                                    std::to_string(s.input_size + 2 * s.hidden_size) + ", got " +
                                    dims_to_string(in));
      return {2 * s.hidden_size};
    case LayerKind::kEmbeddingLookup:
      if (n != s.vocab_size)
        throw std::invalid_argument("embedding expects a length-" + std::to_string(s.vocab_size) +
                                    " vector, got " + dims_to_string(in));
      return {s.embed_dim};
  }
  throw std::logic_error("unknown layer kind");
}

struct ParamShape {
  std::string suffix;
  std::vector<int> dims;
};

// Parameter layout per layer. LSTM gate rows are stacked i, f, g, o.
inline std::vector<ParamShape> param_shapes(const LayerSpec& s) {
  switch (s.kind) {
    case LayerKind::kDense:
      return {{"W", {s.out_features, s.in_features}}, {"b", {s.out_features}}};
    case LayerKind::kConv2d:
      return {{"W", {s.out_channels, s.in_channels, s.kernel, s.kernel}}, {"b", {s.out_channels}}};
    case LayerKind::kLSTMCell:
      return {{"W", {4 * s.hidden_size, s.input_size}},
              {"U", {4 * s.hidden_size, s.hidden_size}},
              {"b", {4 * s.hidden_size}}};
    case LayerKind::kEmbeddingLookup:
      return {{"table", {s.vocab_size, s.embed_dim}}};
    default:
      return {};
  }
}

namespace detail {

template <typename T>
inline T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

// y[M] += A[M,N] * x[N]
template <typename T>
inline void matvec_acc(const TensorT<T>& A, const T* x, T* y) {
  const int m = A.dims[0], n = A.dims[1];
  for (int i = 0; i < m; ++i) {
    const T* row = &A.data[size_t(i) * n];
    T acc = T(0);
    for (int j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] += acc;
  }
}

// y[N] += A^T[N,M] * g[M]  for A stored [M,N]
template <typename T>
inline void matvec_t_acc(const TensorT<T>& A, const T* g, T* y) {
  const int m = A.dims[0], n = A.dims[1];
  for (int i = 0; i < m; ++i) {
    const T* row = &A.data[size_t(i) * n];
    const T gi = g[i];
    for (int j = 0; j < n; ++j) y[j] += gi * row[j];
  }
}

// GA[M,N] += g[M] outer x[N]
template <typename T>
inline void outer_acc(const T* g, int m, const T* x, int n, TensorT<T>& GA) {
  for (int i = 0; i < m; ++i) {
    T* row = &GA.data[size_t(i) * n];
    const T gi = g[i];
    for (int j = 0; j < n; ++j) row[j] += gi * x[j];
  }
}

}  // namespace detail

// ---------------------------------------------------------------- dense

template <typename T>
TensorT<T> dense_forward(const LayerSpec& s, const TensorT<T>& W, const TensorT<T>& b,
                         const TensorT<T>& x) {
  TensorT<T> y({s.out_features});
  for (int o = 0; o < s.out_features; ++o) y.data[size_t(o)] = b.data[size_t(o)];
  detail::matvec_acc(W, x.data.data(), y.data.data());
  return y;
}

template <typename T>
TensorT<T> dense_backward(const LayerSpec& s, const TensorT<T>& W, const TensorT<T>& x,
                          const TensorT<T>& gy, TensorT<T>* gW, TensorT<T>* gb) {
  TensorT<T> gx(x.dims);
  detail::matvec_t_acc(W, gy.data.data(), gx.data.data());
  if (gW) detail::outer_acc(gy.data.data(), s.out_features, x.data.data(), s.in_features, *gW);
  if (gb)
    for (int o = 0; o < s.out_features; ++o) gb->data[size_t(o)] += gy.data[size_t(o)];
  return gx;
}

// ---------------------------------------------------------------- conv2d

template <typename T>
TensorT<T> conv2d_forward(const LayerSpec& s, const TensorT<T>& W, const TensorT<T>& b,
                          const TensorT<T>& x) {
  const int ic = s.in_channels, oc = s.out_channels, k = s.kernel, st = s.stride, p = s.pad;
  const int h = x.dims[1], w = x.dims[2];
  const int oh = (h + 2 * p - k) / st + 1, ow = (w + 2 * p - k) / st + 1;
  TensorT<T> y({oc, oh, ow});
  for (int o = 0; o < oc; ++o) {
    T* yc = &y.data[size_t(o) * oh * ow];
    const T bias = b.data[size_t(o)];
    for (int i = 0; i < oh * ow; ++i) yc[i] = bias;
    for (int c = 0; c < ic; ++c) {
      const T* xc = &x.data[size_t(c) * h * w];
      const T* wk = &W.data[(size_t(o) * ic + c) * k * k];
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const T wv = wk[ky * k + kx];
          if (st == 1) {
            // contiguous inner loop over output columns
            for (int yo = 0; yo < oh; ++yo) {
              const int yi = yo + ky - p;
              if (yi < 0 || yi >= h) continue;
              const int x0 = std::max(0, p - kx), x1 = std::min(ow, w - kx + p);
              const T* xrow = &xc[size_t(yi) * w + (x0 + kx - p)];
              T* yrow = &yc[size_t(yo) * ow + x0];
              for (int xo = 0; xo < x1 - x0; ++xo) yrow[xo] += wv * xrow[xo];
            }
          } else {
            for (int yo = 0; yo < oh; ++yo) {
              const int yi = yo * st + ky - p;
              if (yi < 0 || yi >= h) continue;
              for (int xo = 0; xo < ow; ++xo) {
                const int xi = xo * st + kx - p;
                if (xi < 0 || xi >= w) continue;
                yc[size_t(yo) * ow + xo] += wv * xc[size_t(yi) * w + xi];
              }
            }
          }
        }
      }
    }
  }
  return y;
}

template <typename T>
TensorT<T> conv2d_backward(const LayerSpec& s, const TensorT<T>& W, const TensorT<T>& x,
                           const TensorT<T>& gy, TensorT<T>* gW, TensorT<T>* gb) {
  const int ic = s.in_channels, oc = s.out_channels, k = s.kernel, st = s.stride, p = s.pad;
  const int h = x.dims[1], w = x.dims[2];
  const int oh = gy.dims[1], ow = gy.dims[2];
  TensorT<T> gx(x.dims);
  for (int o = 0; o < oc; ++o) {
    const T* gc = &gy.data[size_t(o) * oh * ow];
    if (gb) {
      T acc = T(0);
      for (int i = 0; i < oh * ow; ++i) acc += gc[i];
      gb->data[size_t(o)] += acc;
    }
    for (int c = 0; c < ic; ++c) {
      T* gxc = &gx.data[size_t(c) * h * w];
      const T* xc = &x.data[size_t(c) * h * w];
      const T* wk = &W.data[(size_t(o) * ic + c) * k * k];
      T* gwk = gW ? &gW->data[(size_t(o) * ic + c) * k * k] : nullptr;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const T wv = wk[ky * k + kx];
          T wacc = T(0);
          if (st == 1) {
            for (int yo = 0; yo < oh; ++yo) {
              const int yi = yo + ky - p;
              if (yi < 0 || yi >= h) continue;
              const int x0 = std::max(0, p - kx), x1 = std::min(ow, w - kx + p);
              const T* grow = &gc[size_t(yo) * ow + x0];
              T* gxrow = &gxc[size_t(yi) * w + (x0 + kx - p)];
              const T* xrow = &xc[size_t(yi) * w + (x0 + kx - p)];
              const int len = x1 - x0;
              for (int xo = 0; xo < len; ++xo) gxrow[xo] += wv * grow[xo];
              if (gwk)
                for (int xo = 0; xo < len; ++xo) wacc += grow[xo] * xrow[xo];
            }
          } else {
            for (int yo = 0; yo < oh; ++yo) {
              const int yi = yo * st + ky - p;
              if (yi < 0 || yi >= h) continue;
              for (int xo = 0; xo < ow; ++xo) {
                const int xi = xo * st + kx - p;
                if (xi < 0 || xi >= w) continue;
                const T g = gc[size_t(yo) * ow + xo];
                gxc[size_t(yi) * w + xi] += wv * g;
                if (gwk) wacc += g * xc[size_t(yi) * w + xi];
              }
            }
          }
          if (gwk) gwk[ky * k + kx] += wacc;
        }
      }
    }
  }
  return gx;
}

// ------------------------------------------------------- relu / pooling

template <typename T>
TensorT<T> relu_forward(const TensorT<T>& x) {
  TensorT<T> y(x.dims);
  for (size_t i = 0; i < x.data.size(); ++i) y.data[i] = x.data[i] > T(0) ? x.data[i] : T(0);
  return y;
}

template <typename T>
TensorT<T> relu_backward(const TensorT<T>& x, const TensorT<T>& gy) {
  TensorT<T> gx(x.dims);
  for (size_t i = 0; i < x.data.size(); ++i) gx.data[i] = x.data[i] > T(0) ? gy.data[i] : T(0);
  return gx;
}

template <typename T>
TensorT<T> maxpool2_forward(const TensorT<T>& x) {
  const int c = x.dims[0], h = x.dims[1], w = x.dims[2];
  TensorT<T> y({c, h / 2, w / 2});
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < h / 2; ++i)
      for (int j = 0; j < w / 2; ++j) {
        T m = x(ch, 2 * i, 2 * j);
        m = std::max(m, x(ch, 2 * i, 2 * j + 1));
        m = std::max(m, x(ch, 2 * i + 1, 2 * j));
        m = std::max(m, x(ch, 2 * i + 1, 2 * j + 1));
        y(ch, i, j) = m;
      }
  return y;
}

// Ties route the gradient to the first maximum in 2x2 row-major order.
template <typename T>
TensorT<T> maxpool2_backward(const TensorT<T>& x, const TensorT<T>& gy) {
  const int c = x.dims[0], h = x.dims[1], w = x.dims[2];
  TensorT<T> gx(x.dims);
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < h / 2; ++i)
      for (int j = 0; j < w / 2; ++j) {
        int bi = 2 * i, bj = 2 * j;
        T best = x(ch, bi, bj);
        const int ys[4] = {2 * i, 2 * i, 2 * i + 1, 2 * i + 1};
        const int xs[4] = {2 * j, 2 * j + 1, 2 * j, 2 * j + 1};
        for (int t = 1; t < 4; ++t)
          if (x(ch, ys[t], xs[t]) > best) {
            best = x(ch, ys[t], xs[t]);
            bi = ys[t];
            bj = xs[t];
          }
        gx(ch, bi, bj) += gy(ch, i, j);
      }
  return gx;
}

// -------------------------------------------------------------- softmax

template <typename T>
TensorT<T> softmax_forward(const TensorT<T>& x) {
  TensorT<T> y(x.dims);
  T m = x.data[0];
  for (T v : x.data) m = std::max(m, v);
  T sum = T(0);
  for (size_t i = 0; i < x.data.size(); ++i) {
    y.data[i] = std::exp(x.data[i] - m);
    sum += y.data[i];
  }
  for (auto& v : y.data) v /= sum;
  return y;
}

template <typename T>
TensorT<T> softmax_backward(const TensorT<T>& y, const TensorT<T>& gy) {
  T dot = T(0);
  for (size_t i = 0; i < y.data.size(); ++i) dot += gy.data[i] * y.data[i];
  TensorT<T> gx(y.dims);
  for (size_t i = 0; i < y.data.size(); ++i) gx.data[i] = y.data[i] * (gy.data[i] - dot);
  return gx;
}

// ----------------------------------------------------------------- lstm

// Input is the flat concatenation [x; h_prev; c_prev], output [h; c].
// Gate preactivations: pre = W*x + U*h_prev + b, rows stacked i,f,g,o;
// c = sigmoid(f)*c_prev + sigmoid(i)*tanh(g); h = sigmoid(o)*tanh(c).
template <typename T>
TensorT<T> lstm_forward(const LayerSpec& s, const TensorT<T>& W, const TensorT<T>& U,
                        const TensorT<T>& b, const TensorT<T>& in) {
  const int X = s.input_size, H = s.hidden_size;
  const T* x = in.data.data();
  const T* hp = x + X;
  const T* cp = hp + H;
  std::vector<T> pre(b.data.begin(), b.data.end());
  detail::matvec_acc(W, x, pre.data());
  detail::matvec_acc(U, hp, pre.data());
  TensorT<T> out({2 * H});
  for (int j = 0; j < H; ++j) {
    const T ig = detail::sigmoid(pre[size_t(j)]);
    const T fg = detail::sigmoid(pre[size_t(H + j)]);
    const T gg = std::tanh(pre[size_t(2 * H + j)]);
    const T og = detail::sigmoid(pre[size_t(3 * H + j)]);
    const T c = fg * cp[j] + ig * gg;
    out.data[size_t(j)] = og * std::tanh(c);
    out.data[size_t(H + j)] = c;
  }
  return out;
}

template <typename T>
TensorT<T> lstm_backward(const LayerSpec& s, const TensorT<T>& W, const TensorT<T>& U,
                         const TensorT<T>& b, const TensorT<T>& in, const TensorT<T>& gy,
                         TensorT<T>* gW, TensorT<T>* gU, TensorT<T>* gb) {
  const int X = s.input_size, H = s.hidden_size;
  const T* x = in.data.data();
  const T* hp = x + X;
  const T* cp = hp + H;
  std::vector<T> pre(b.data.begin(), b.data.end());
  detail::matvec_acc(W, x, pre.data());
  detail::matvec_acc(U, hp, pre.data());

  std::vector<T> dpre(size_t(4) * H);
  TensorT<T> gx(in.dims);
  T* gxp = gx.data.data();
  for (int j = 0; j < H; ++j) {
    const T ig = detail::sigmoid(pre[size_t(j)]);
    const T fg = detail::sigmoid(pre[size_t(H + j)]);
    const T gg = std::tanh(pre[size_t(2 * H + j)]);
    const T og = detail::sigmoid(pre[size_t(3 * H + j)]);
    const T c = fg * cp[j] + ig * gg;
    const T tc = std::tanh(c);
    const T gh = gy.data[size_t(j)];
    T gc = gy.data[size_t(H + j)] + gh * og * (T(1) - tc * tc);
    const T go = gh * tc;
    dpre[size_t(j)] = gc * gg * ig * (T(1) - ig);
    dpre[size_t(H + j)] = gc * cp[j] * fg * (T(1) - fg);
    dpre[size_t(2 * H + j)] = gc * ig * (T(1) - gg * gg);
    dpre[size_t(3 * H + j)] = go * og * (T(1) - og);
    gxp[X + H + j] = gc * fg;  // d/dc_prev
  }
  detail::matvec_t_acc(W, dpre.data(), gxp);          // d/dx
  detail::matvec_t_acc(U, dpre.data(), gxp + X);      // d/dh_prev
  if (gW) detail::outer_acc(dpre.data(), 4 * H, x, X, *gW);
  if (gU) detail::outer_acc(dpre.data(), 4 * H, hp, H, *gU);
  if (gb)
    for (int j = 0; j < 4 * H; ++j) gb->data[size_t(j)] += dpre[size_t(j)];
  return gx;
}

// Step interface over separate state tensors; validates shapes and
// returns (h_t, c_t).
template <typename T>
std::pair<TensorT<T>, TensorT<T>> lstm_step(const LayerSpec& s, const TensorT<T>& W,
                                            const TensorT<T>& U, const TensorT<T>& b,
                                            const TensorT<T>& x, const TensorT<T>& h_prev,
                                            const TensorT<T>& c_prev) {
  if (x.numel() != s.input_size || h_prev.numel() != s.hidden_size ||
      c_prev.numel() != s.hidden_size)
    throw std::invalid_argument("lstm_step: expected x[" + std::to_string(s.input_size) +
                                "], h[" + std::to_string(s.hidden_size) + "], c[" +
                                std::to_string(s.hidden_size) + "], got " +
                                dims_to_string(x.dims) + ", " + dims_to_string(h_prev.dims) +
                                ", " + dims_to_string(c_prev.dims));
  TensorT<T> in({s.input_size + 2 * s.hidden_size});
  std::copy(x.data.begin(), x.data.end(), in.data.begin());
  std::copy(h_prev.data.begin(), h_prev.data.end(), in.data.begin() + s.input_size);
  std::copy(c_prev.data.begin(), c_prev.data.end(),
            in.data.begin() + s.input_size + s.hidden_size);
  const TensorT<T> out = lstm_forward(s, W, U, b, in);
  TensorT<T> h({s.hidden_size}), c({s.hidden_size});
  std::copy(out.data.begin(), out.data.begin() + s.hidden_size, h.data.begin());
  std::copy(out.data.begin() + s.hidden_size, out.data.end(), c.data.begin());
  return {std::move(h), std::move(c)};
}

// ------------------------------------------------------------ embedding

// y = table^T * x for an arbitrary length-V vector x; a one-hot x selects
// a row. Zero entries are skipped, which is arithmetically identical.
template <typename T>
TensorT<T> embedding_forward(const LayerSpec& s, const TensorT<T>& table, const TensorT<T>& x) {
  const int V = s.vocab_size, E = s.embed_dim;
  TensorT<T> y({E});
  for (int v = 0; v < V; ++v) {
    const T xv = x.data[size_t(v)];
    if (xv == T(0)) continue;
    const T* row = &table.data[size_t(v) * E];
    for (int e = 0; e < E; ++e) y.data[size_t(e)] += xv * row[e];
  }
  return y;
}

template <typename T>
TensorT<T> embedding_backward(const LayerSpec& s, const TensorT<T>& table, const TensorT<T>& x,
                              const TensorT<T>& gy, TensorT<T>* gtable) {
  const int V = s.vocab_size, E = s.embed_dim;
  TensorT<T> gx(x.dims);
  for (int v = 0; v < V; ++v) {
    const T* row = &table.data[size_t(v) * E];
    T acc = T(0);
    for (int e = 0; e < E; ++e) acc += row[e] * gy.data[size_t(e)];
    gx.data[size_t(v)] = acc;
    if (gtable && x.data[size_t(v)] != T(0)) {
      T* grow = &gtable->data[size_t(v) * E];
      const T xv = x.data[size_t(v)];
      for (int e = 0; e < E; ++e) grow[e] += xv * gy.data[size_t(e)];
    }
  }
  return gx;
}

// ------------------------------------------------------------ dispatch

// params is an array of pointers to the layer's parameter tensors in
// param_shapes order (may be null for parameterless layers).
template <typename T>
TensorT<T> layer_forward(const LayerSpec& s, const TensorT<T>* const* params,
                         const TensorT<T>& x) {
  switch (s.kind) {
    case LayerKind::kDense: return dense_forward(s, *params[0], *params[1], x);
    case LayerKind::kConv2d: return conv2d_forward(s, *params[0], *params[1], x);
    case LayerKind::kReLU: return relu_forward(x);
    case LayerKind::kMaxPool2: return maxpool2_forward(x);
    case LayerKind::kSoftmax: return softmax_forward(x);
    case LayerKind::kLSTMCell: return lstm_forward(s, *params[0], *params[1], *params[2], x);
    case LayerKind::kEmbeddingLookup: return embedding_forward(s, *params[0], x);
  }
  throw std::logic_error("unknown layer kind");
}

// pgrads mirrors params; pass null to skip parameter gradients entirely
// (frozen nets). Gradients are accumulated in place.
template <typename T>
TensorT<T> layer_backward(const LayerSpec& s, const TensorT<T>* const* params,
                          const TensorT<T>& x, const TensorT<T>& y, const TensorT<T>& gy,
                          TensorT<T>* const* pgrads) {
  switch (s.kind) {
    case LayerKind::kDense:
      return dense_backward(s, *params[0], x, gy, pgrads ? pgrads[0] : nullptr,
                            pgrads ? pgrads[1] : nullptr);
    case LayerKind::kConv2d:
      return conv2d_backward(s, *params[0], x, gy, pgrads ? pgrads[0] : nullptr,
                             pgrads ? pgrads[1] : nullptr);
    case LayerKind::kReLU: return relu_backward(x, gy);
    case LayerKind::kMaxPool2: return maxpool2_backward(x, gy);
    case LayerKind::kSoftmax: return softmax_backward(y, gy);
    case LayerKind::kLSTMCell:
      return lstm_backward(s, *params[0], *params[1], *params[2], x, gy,
                           pgrads ? pgrads[0] : nullptr, pgrads ? pgrads[1] : nullptr,
                           pgrads ? pgrads[2] : nullptr);
    case LayerKind::kEmbeddingLookup:
      return embedding_backward(s, *params[0], x, gy, pgrads ? pgrads[0] : nullptr);
  }
  throw std::logic_error("unknown layer kind");
}

}  // namespace genlab
