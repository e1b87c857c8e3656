#pragma once
// Texture and content matching against a frozen random conv net: Gram
// statistics, a combined content+style loss with analytic input gradient,
// and a descent loop that rewrites an image in another image's texture.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "tensor.hpp"

namespace genlab {

// Random conv+relu stack, stride 1, odd kernels, symmetric padding, so
// every feature map keeps the input's spatial size. Weights come from the
// usual per-parameter streams of `seed` and are never trained.
struct StyleNet {
  Model model;
  std::vector<int> relu_layers;  // indices of the relu outputs, shallow to deep
};

inline StyleNet make_style_net(int height, int width, uint64_t seed,
                               std::vector<int> widths = {32, 64, 128},
                               std::vector<int> kernels = {3, 5, 7}) {
  if (widths.empty() || widths.size() != kernels.size())
    throw std::invalid_argument("style net needs matching non-empty widths and kernels");
  std::vector<LayerSpec> layers;
  StyleNet net;
  int in_c = 1;
  for (size_t i = 0; i < widths.size(); ++i) {
    if (kernels[i] < 1 || kernels[i] % 2 == 0)
      throw std::invalid_argument("style net kernels must be odd and positive");
    if (widths[i] < 1) throw std::invalid_argument("style net widths must be positive");
    layers.push_back(LayerSpec::conv2d(in_c, widths[i], kernels[i], 1, kernels[i] / 2));
    layers.push_back(LayerSpec::relu());
    net.relu_layers.push_back(int(layers.size()) - 1);
    in_c = widths[i];
  }
  net.model = build_model(std::move(layers), {1, height, width}, seed);
  return net;
}

// Gram matrix of a [C,H,W] feature map: G[i][j] = <channel i, channel j>
// normalized by C*H*W. Symmetric positive semidefinite by construction.
inline Tensor gram(const Tensor& features) {
  if (features.dims.size() != 3)
    throw std::invalid_argument("gram expects a [C,H,W] feature map, got " +
                                dims_to_string(features.dims));
  const int C = features.dims[0];
  const size_t P = size_t(features.dims[1]) * size_t(features.dims[2]);
  const double norm = 1.0 / (double(C) * double(P));
  Tensor g({C, C});
  for (int i = 0; i < C; ++i) {
    const float* fi = features.data.data() + size_t(i) * P;
    for (int j = i; j < C; ++j) {
      const float* fj = features.data.data() + size_t(j) * P;
      double acc = 0.0;
      for (size_t p = 0; p < P; ++p) acc += double(fi[p]) * double(fj[p]);
      const float v = float(acc * norm);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

struct LayerWeight {
  int layer = 0;
  double weight = 1.0;
};

struct StyleObjective {
  std::vector<LayerWeight> content_layers;
  std::vector<LayerWeight> style_layers;
  double alpha = 1.0;  // content weight
  double beta = 1.0;   // style weight
};

// Content on the deepest relu, style on every relu with equal weight.
inline StyleObjective default_style_objective(const StyleNet& net, double alpha, double beta) {
  StyleObjective obj;
  obj.alpha = alpha;
  obj.beta = beta;
  obj.content_layers.push_back({net.relu_layers.back(), 1.0});
  for (int l : net.relu_layers) obj.style_layers.push_back({l, 1.0});
  return obj;
}

namespace detail {

inline void check_style_args(const Model& model, const StyleObjective& obj) {
  if (obj.alpha < 0.0 || obj.beta < 0.0)
    throw std::invalid_argument("style alpha and beta must be >= 0");
  if (obj.alpha + obj.beta <= 0.0)
    throw std::invalid_argument("style alpha + beta must be > 0");
  if (obj.content_layers.empty() && obj.style_layers.empty())
    throw std::invalid_argument("style objective selects no layers");
  for (const auto& lw : obj.content_layers)
    if (lw.layer < 0 || size_t(lw.layer) >= model.layers.size())
      throw std::invalid_argument("content layer index out of range");
  for (const auto& lw : obj.style_layers)
    if (lw.layer < 0 || size_t(lw.layer) >= model.layers.size())
      throw std::invalid_argument("style layer index out of range");
}

inline void check_image(const Tensor& img, const std::vector<int>& want, const char* what) {
  if (img.dims != want)
    throw std::invalid_argument(std::string(what) + " must have shape " + dims_to_string(want) +
                                ", got " + dims_to_string(img.dims));
  for (float v : img.data)
    if (!(v >= 0.0f && v <= 1.0f))
      throw std::invalid_argument(std::string(what) + " pixels must lie in [0,1]");
}

}  // namespace detail

// Reference features and Gram matrices, computed once per transfer.
struct StyleTargets {
  std::vector<Tensor> content_features;  // indexed by model layer, empty if unused
  std::vector<Tensor> style_grams;
};

inline StyleTargets make_style_targets(const StyleNet& net, const StyleObjective& obj,
                                       const Tensor& content_img, const Tensor& style_img) {
  detail::check_style_args(net.model, obj);
  detail::check_image(content_img, net.model.input_dims, "content image");
  detail::check_image(style_img, net.model.input_dims, "style image");
  StyleTargets t;
  t.content_features.resize(net.model.layers.size());
  t.style_grams.resize(net.model.layers.size());
  if (!obj.content_layers.empty()) {
    const auto tc = net.model.forward(content_img, true);
    for (const auto& lw : obj.content_layers)
      t.content_features[size_t(lw.layer)] = tc.outputs[size_t(lw.layer)];
  }
  if (!obj.style_layers.empty()) {
    const auto ts = net.model.forward(style_img, true);
    for (const auto& lw : obj.style_layers)
      t.style_grams[size_t(lw.layer)] = gram(ts.outputs[size_t(lw.layer)]);
  }
  return t;
}

struct StyleLossParts {
  double loss = 0.0;
  double content = 0.0;  // weighted sums before alpha/beta
  double style = 0.0;
  Tensor grad;  // d(loss)/d(pixels)
};

// loss = alpha * sum_l w_l * MSE(F_l(x), F_l(content))
//      + beta  * sum_l w_l * MSE(G_l(x), G_l(style))
// Per-layer gradients enter the frozen backward pass as injections:
//   content: 2/N * dF,  style: 4/(C^2 * C*H*W) * dG . F
inline StyleLossParts style_loss_with_targets(const StyleNet& net, const StyleObjective& obj,
                                              const StyleTargets& targets, const Tensor& x) {
  detail::check_image(x, net.model.input_dims, "image");
  const auto tx = net.model.forward(x, true);
  std::vector<Tensor> inj(net.model.layers.size());
  StyleLossParts out;
  for (const auto& lw : obj.content_layers) {
    const Tensor& fx = tx.outputs[size_t(lw.layer)];
    const Tensor& fc = targets.content_features[size_t(lw.layer)];
    if (fc.data.empty()) throw std::invalid_argument("targets missing content layer");
    const double n = double(fx.data.size());
    double mse = 0.0;
    Tensor g = inj[size_t(lw.layer)].data.empty() ? Tensor(fx.dims)
                                                  : std::move(inj[size_t(lw.layer)]);
    const float scale = float(obj.alpha * lw.weight * 2.0 / n);
    for (size_t k = 0; k < fx.data.size(); ++k) {
      const double d = double(fx.data[k]) - double(fc.data[k]);
      mse += d * d;
      g.data[k] += scale * float(d);
    }
    inj[size_t(lw.layer)] = std::move(g);
    out.content += lw.weight * mse / n;
  }
  for (const auto& lw : obj.style_layers) {
    const Tensor& fx = tx.outputs[size_t(lw.layer)];
    const Tensor& gs = targets.style_grams[size_t(lw.layer)];
    if (gs.data.empty()) throw std::invalid_argument("targets missing style layer");
    const Tensor gx = gram(fx);
    const int C = fx.dims[0];
    const size_t P = size_t(fx.dims[1]) * size_t(fx.dims[2]);
    Tensor dg({C, C});
    double mse = 0.0;
    for (size_t k = 0; k < gx.data.size(); ++k) {
      const double d = double(gx.data[k]) - double(gs.data[k]);
      mse += d * d;
      dg.data[k] = float(d);
    }
    mse /= double(C) * double(C);
    out.style += lw.weight * mse;
    Tensor g = inj[size_t(lw.layer)].data.empty() ? Tensor(fx.dims)
                                                  : std::move(inj[size_t(lw.layer)]);
    const double scale =
        obj.beta * lw.weight * 4.0 / (double(C) * double(C) * double(C) * double(P));
    for (int i = 0; i < C; ++i) {
      float* gi = g.data.data() + size_t(i) * P;
      for (int j = 0; j < C; ++j) {
        const double w = scale * double(dg(i, j));
        if (w == 0.0) continue;
        const float wf = float(w);
        const float* fj = fx.data.data() + size_t(j) * P;
        for (size_t p = 0; p < P; ++p) gi[p] += wf * fj[p];
      }
    }
    inj[size_t(lw.layer)] = std::move(g);
  }
  out.loss = obj.alpha * out.content + obj.beta * out.style;
  out.grad = net.model.backward_frozen(tx, &inj, nullptr);
  return out;
}

// One-shot form: builds the targets, then evaluates.
inline StyleLossParts style_content_loss(const Tensor& x, const Tensor& content_img,
                                         const Tensor& style_img, const StyleNet& net,
                                         const StyleObjective& obj) {
  const auto targets = make_style_targets(net, obj, content_img, style_img);
  return style_loss_with_targets(net, obj, targets, x);
}

struct TransferResult {
  Tensor image;
  std::vector<double> trace;  // loss per step, steps+1 entries, non-increasing
  int halvings = 0;
};

// Starts from the content image and descends the combined loss with the
// same halving schedule as the dream climb: a proposal that raises the
// loss halves the step size, ten halvings end the run early, and the
// trace is padded to steps+1 entries. Pixels stay clamped to [0,1].
// The seed is accepted for interface symmetry with the other optimizers;
// the descent itself draws no randomness.
inline TransferResult transfer(const Tensor& content_img, const Tensor& style_img,
                               const StyleNet& net, const StyleObjective& obj, int steps,
                               double step_size, uint64_t seed = 0) {
  (void)seed;
  if (steps < 0) throw std::invalid_argument("transfer steps must be >= 0");
  if (step_size <= 0.0) throw std::invalid_argument("transfer step_size must be > 0");
  const auto targets = make_style_targets(net, obj, content_img, style_img);
  TransferResult res;
  res.image = content_img;
  auto parts = style_loss_with_targets(net, obj, targets, res.image);
  res.trace.reserve(size_t(steps) + 1);
  res.trace.push_back(parts.loss);
  double s = step_size;
  bool stopped = false;
  for (int step = 0; step < steps && !stopped; ++step) {
    for (;;) {
      Tensor cand = res.image;
      for (size_t k = 0; k < cand.data.size(); ++k) {
        float v = cand.data[k] - float(s) * parts.grad.data[k];
        cand.data[k] = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
      }
      auto cand_parts = style_loss_with_targets(net, obj, targets, cand);
      if (cand_parts.loss <= res.trace.back()) {
        res.image = std::move(cand);
        res.trace.push_back(cand_parts.loss);
        parts = std::move(cand_parts);
        break;
      }
      if (res.halvings >= 10) {
        stopped = true;
        break;
      }
      s *= 0.5;
      ++res.halvings;
    }
  }
  while (res.trace.size() < size_t(steps) + 1) res.trace.push_back(res.trace.back());
  return res;
}

}  // namespace genlab
