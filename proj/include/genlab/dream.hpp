#pragma once
// Activation maximization over a frozen model: gradient ascent on the
// mean activation of a chosen unit, channel, or whole layer, with an L2
// pull toward black, pixel clamping to [0,1], optional circular jitter,
// and a halving step-size schedule that keeps the trace monotone.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace genlab {

enum class DreamSelector { kUnit, kChannel, kWholeLayer };

struct DreamTarget {
  int layer_index = 0;
  DreamSelector selector = DreamSelector::kWholeLayer;
  int index = 0;  // flat unit index or channel index; unused for whole layer
};

struct DreamConfig {
  int steps = 100;
  double step_size = 1.0;
  double l2_decay = 0.0;
  int jitter = 0;  // max circular shift in pixels, 0 disables
  uint64_t seed = 0;
};

struct DreamResult {
  Tensor image;
  std::vector<double> trace;  // objective per step, steps+1 entries
  int halvings = 0;
  double final_step_size = 0.0;
};

namespace detail {

// Flat indices of the selected activations in the layer output.
inline std::vector<size_t> dream_selection(const DreamTarget& t, const std::vector<int>& dims) {
  int64_t numel = 1;
  for (int d : dims) numel *= d;
  std::vector<size_t> sel;
  switch (t.selector) {
    case DreamSelector::kUnit:
      if (t.index < 0 || int64_t(t.index) >= numel)
        throw std::invalid_argument("dream unit index " + std::to_string(t.index) +
                                    " out of range for layer output " + dims_to_string(dims));
      sel.push_back(size_t(t.index));
      break;
    case DreamSelector::kChannel: {
      if (dims.size() != 3)
        throw std::invalid_argument("channel selector needs a [C,H,W] layer output, got " +
                                    dims_to_string(dims));
      if (t.index < 0 || t.index >= dims[0])
        throw std::invalid_argument("dream channel index " + std::to_string(t.index) +
                                    " out of range for " + dims_to_string(dims));
      const size_t plane = size_t(dims[1]) * size_t(dims[2]);
      for (size_t k = 0; k < plane; ++k) sel.push_back(size_t(t.index) * plane + k);
      break;
    }
    case DreamSelector::kWholeLayer:
      for (int64_t k = 0; k < numel; ++k) sel.push_back(size_t(k));
      break;
  }
  return sel;
}

inline void check_dream_args(const Model& model, const Tensor& start, const DreamTarget& target,
                             const DreamConfig& cfg) {
  if (target.layer_index < 0 || size_t(target.layer_index) >= model.layers.size())
    throw std::invalid_argument("dream layer index " + std::to_string(target.layer_index) +
                                " out of range (model has " + std::to_string(model.layers.size()) +
                                " layers)");
  if (start.dims != model.input_dims)
    throw std::invalid_argument("dream start must match model input " +
                                dims_to_string(model.input_dims));
  if (cfg.steps < 0) throw std::invalid_argument("dream steps must be >= 0");
  if (cfg.step_size <= 0.0) throw std::invalid_argument("dream step_size must be > 0");
  if (cfg.l2_decay < 0.0) throw std::invalid_argument("dream l2_decay must be >= 0");
  if (cfg.jitter < 0) throw std::invalid_argument("dream jitter must be >= 0");
}

inline Tensor circular_shift(const Tensor& img, int dy, int dx) {
  const int C = img.dims[0], H = img.dims[1], W = img.dims[2];
  Tensor out(img.dims);
  for (int c = 0; c < C; ++c)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        out(c, (y + dy % H + H) % H, (x + dx % W + W) % W) = img(c, y, x);
  return out;
}

}  // namespace detail

// Objective = mean of the selected activations minus l2_decay * sum(x^2).
inline double dream_objective(const Model& model, const Tensor& x, const DreamTarget& target,
                              double l2_decay) {
  const auto tr = model.forward(x, true);
  const Tensor& out = tr.outputs[size_t(target.layer_index)];
  const auto sel = detail::dream_selection(target, out.dims);
  double sum = 0.0;
  for (size_t k : sel) sum += out.data[k];
  double obj = sum / double(sel.size());
  if (l2_decay != 0.0) {
    double sq = 0.0;
    for (float v : x.data) sq += double(v) * double(v);
    obj -= l2_decay * sq;
  }
  return obj;
}

// d(objective)/dx via a gradient injection at the target layer's output.
inline Tensor dream_gradient(const Model& model, const Tensor& x, const DreamTarget& target,
                             double l2_decay) {
  const auto tr = model.forward(x, true);
  const Tensor& out = tr.outputs[size_t(target.layer_index)];
  const auto sel = detail::dream_selection(target, out.dims);
  std::vector<Tensor> inj(model.layers.size());
  Tensor g(out.dims);
  const float w = float(1.0 / double(sel.size()));
  for (size_t k : sel) g.data[k] = w;
  inj[size_t(target.layer_index)] = std::move(g);
  Tensor gx = model.backward_frozen(tr, &inj, nullptr);
  if (l2_decay != 0.0) {
    const float two_l2 = float(2.0 * l2_decay);
    for (size_t k = 0; k < gx.data.size(); ++k) gx.data[k] -= two_l2 * x.data[k];
  }
  return gx;
}

// Ascends the objective from `start`. Each step proposes
// clamp01(x + s * grad); a proposal that lowers the objective halves s and
// retries, and after 10 halvings total the climb stops with the trace
// padded to steps+1 entries by the last value. With jitter > 0 the
// gradient is computed on a circularly shifted copy, then shifted back.
inline DreamResult maximize_activation(const Model& model, const Tensor& start,
                                       const DreamTarget& target, const DreamConfig& cfg) {
  detail::check_dream_args(model, start, target, cfg);
  DreamResult res;
  res.image = start;
  res.trace.reserve(size_t(cfg.steps) + 1);
  res.trace.push_back(dream_objective(model, res.image, target, cfg.l2_decay));
  double s = cfg.step_size;
  Rng jit_rng(derive_seed(cfg.seed, "dream/jitter"));
  const int H = model.input_dims.size() == 3 ? model.input_dims[1] : 1;
  const int W = model.input_dims.size() == 3 ? model.input_dims[2] : 1;
  bool stopped = false;
  for (int step = 0; step < cfg.steps && !stopped; ++step) {
    Tensor grad;
    if (cfg.jitter > 0 && model.input_dims.size() == 3) {
      const int dy = int(jit_rng.next_below(uint64_t(2 * cfg.jitter + 1))) - cfg.jitter;
      const int dx = int(jit_rng.next_below(uint64_t(2 * cfg.jitter + 1))) - cfg.jitter;
      const Tensor rolled = detail::circular_shift(res.image, dy % H, dx % W);
      grad = detail::circular_shift(dream_gradient(model, rolled, target, cfg.l2_decay),
                                    (H - dy % H) % H, (W - dx % W) % W);
    } else {
      grad = dream_gradient(model, res.image, target, cfg.l2_decay);
    }
    for (;;) {
      Tensor cand = res.image;
      for (size_t k = 0; k < cand.data.size(); ++k) {
        float v = cand.data[k] + float(s) * grad.data[k];
        cand.data[k] = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
      }
      const double obj = dream_objective(model, cand, target, cfg.l2_decay);
      if (obj >= res.trace.back()) {
        res.image = std::move(cand);
        res.trace.push_back(obj);
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
  while (res.trace.size() < size_t(cfg.steps) + 1) res.trace.push_back(res.trace.back());
  res.final_step_size = s;
  return res;
}

struct DreamCompare {
  DreamResult peripheral;
  DreamResult deep;
  double energy_peripheral = 0.0;  // mean |4-neighbor Laplacian| of image - start
  double energy_deep = 0.0;
};

// Mean absolute discrete Laplacian over interior pixels; the standard
// high-frequency proxy. Images smaller than 3x3 have no interior -> 0.
inline double high_frequency_energy(const Tensor& delta) {
  if (delta.dims.size() != 3) throw std::invalid_argument("energy expects a [C,H,W] tensor");
  const int C = delta.dims[0], H = delta.dims[1], W = delta.dims[2];
  if (H < 3 || W < 3) return 0.0;
  double acc = 0.0;
  for (int c = 0; c < C; ++c)
    for (int y = 1; y + 1 < H; ++y)
      for (int x = 1; x + 1 < W; ++x) {
        const double lap = double(delta(c, y - 1, x)) + double(delta(c, y + 1, x)) +
                           double(delta(c, y, x - 1)) + double(delta(c, y, x + 1)) -
                           4.0 * double(delta(c, y, x));
        acc += std::fabs(lap);
      }
  return acc / (double(C) * double(H - 2) * double(W - 2));
}

// Runs whole-layer maximization at a shallow and a deep layer from the
// same start and reports the high-frequency energy of each pixel delta.
// Equal indices are allowed (the two runs then coincide).
inline DreamCompare dream_compare(const Model& model, const Tensor& start, int peripheral_layer,
                                  int deep_layer, const DreamConfig& cfg) {
  if (peripheral_layer > deep_layer)
    throw std::invalid_argument("peripheral layer must not be deeper than deep layer");
  DreamTarget tp{peripheral_layer, DreamSelector::kWholeLayer, 0};
  DreamTarget td{deep_layer, DreamSelector::kWholeLayer, 0};
  DreamCompare out;
  out.peripheral = maximize_activation(model, start, tp, cfg);
  out.deep = maximize_activation(model, start, td, cfg);
  Tensor dp(start.dims), dd(start.dims);
  for (size_t k = 0; k < start.data.size(); ++k) {
    dp.data[k] = out.peripheral.image.data[k] - start.data[k];
    dd.data[k] = out.deep.image.data[k] - start.data[k];
  }
  out.energy_peripheral = high_frequency_energy(dp);
  out.energy_deep = high_frequency_energy(dd);
  return out;
}

}  // namespace genlab
