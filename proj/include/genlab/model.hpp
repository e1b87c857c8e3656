#pragma once
// Model: an ordered stack of layers with named parameters, an activation
// trace for backprop, and deterministic seeded initialization.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "layers.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace genlab {

struct Parameter {
  std::string name;  // "layer{i}.{suffix}", unique within a model
  Tensor value;
  Tensor grad;  // accumulated; call zero_grads() between passes
  // Adam state, lazily sized by adam_step
  Tensor m, v;
  int64_t step = 0;
};

// Per-layer inputs and outputs captured by forward(record=true); layer i
// maps inputs[i] -> outputs[i], and inputs[i+1] == outputs[i]. The final
// output is present whether or not the per-layer tensors were recorded.
struct ActivationTrace {
  bool recorded = false;
  std::vector<Tensor> inputs;
  std::vector<Tensor> outputs;
  Tensor output;
  const Tensor& final_output() const { return output; }
};

class Model {
 public:
  std::vector<LayerSpec> layers;
  std::vector<int> input_dims;
  std::vector<Parameter> params;
  std::vector<int> param_offset;  // params index of layer i's first tensor
  std::vector<int> param_count;   // tensors owned by layer i
  uint64_t seed = 0;

  // Shape each layer produces, index 0 being the model input.
  std::vector<std::vector<int>> shapes() const {
    std::vector<std::vector<int>> out{input_dims};
    for (const auto& l : layers) out.push_back(output_dims(l, out.back()));
    return out;
  }

  Tensor* find_param(const std::string& name) {
    for (auto& p : params)
      if (p.name == name) return &p.value;
    return nullptr;
  }

  ActivationTrace forward(const Tensor& x, bool record = true) const {
    if (x.dims != input_dims)
      throw std::invalid_argument("model expects input " + dims_to_string(input_dims) + ", got " +
                                  dims_to_string(x.dims));
    ActivationTrace tr;
    tr.recorded = record;
    Tensor cur = x;
    for (size_t i = 0; i < layers.size(); ++i) {
      if (record) tr.inputs.push_back(cur);
      const Tensor* ptrs[3] = {nullptr, nullptr, nullptr};
      collect_values(i, ptrs);
      cur = layer_forward(layers[i], ptrs, cur);
      if (record) tr.outputs.push_back(cur);
    }
    tr.output = std::move(cur);
    return tr;
  }

  // Backpropagates out_grad through the trace, accumulating parameter
  // gradients (one accumulation per layer per call). Returns d/d(input).
  Tensor backward(const ActivationTrace& tr, const Tensor& out_grad) {
    return backward_impl(tr, nullptr, &out_grad, &params);
  }

  // Generalized pass for multi-layer objectives: `injections`, when
  // non-null, holds one gradient tensor per layer (empty tensor = none)
  // added to the flowing gradient at that layer's OUTPUT. out_grad may be
  // null when only injections drive the pass. want_param_grads=false
  // skips parameter gradients (frozen-weight optimization of the input).
  Tensor backward_inject(const ActivationTrace& tr, const std::vector<Tensor>* injections,
                         const Tensor* out_grad, bool want_param_grads) {
    return backward_impl(tr, injections, out_grad, want_param_grads ? &params : nullptr);
  }

  // Same pass with the weights held fixed; never touches grads, so the
  // model stays const (input-optimization loops rely on this).
  Tensor backward_frozen(const ActivationTrace& tr, const std::vector<Tensor>* injections,
                         const Tensor* out_grad) const {
    return backward_impl(tr, injections, out_grad, nullptr);
  }

  void zero_grads() {
    for (auto& p : params) p.grad.fill(0.0f);
  }

 private:
  void collect_values(size_t layer, const Tensor** ptrs) const {
    for (int k = 0; k < param_count[layer]; ++k)
      ptrs[k] = &params[size_t(param_offset[layer] + k)].value;
  }

  Tensor backward_impl(const ActivationTrace& tr, const std::vector<Tensor>* injections,
                       const Tensor* out_grad, std::vector<Parameter>* grad_params) const {
    if (!tr.recorded)
      throw std::invalid_argument("backward needs a trace recorded with record=true");
    if (tr.outputs.size() != layers.size())
      throw std::invalid_argument("trace does not match model depth");
    if (injections && injections->size() != layers.size())
      throw std::invalid_argument("need one injection slot per layer");
    Tensor g;
    if (out_grad) {
      if (out_grad->dims != tr.output.dims)
        throw std::invalid_argument("output gradient shape mismatch");
      g = *out_grad;
    } else {
      g = Tensor(tr.output.dims);
    }
    for (size_t ri = layers.size(); ri-- > 0;) {
      if (injections && !(*injections)[ri].data.empty()) {
        const Tensor& inj = (*injections)[ri];
        if (inj.dims != tr.outputs[ri].dims)
          throw std::invalid_argument("injection shape mismatch at layer " + std::to_string(ri));
        for (size_t k = 0; k < g.data.size(); ++k) g.data[k] += inj.data[k];
      }
      const Tensor* vals[3] = {nullptr, nullptr, nullptr};
      collect_values(ri, vals);
      Tensor* grads[3] = {nullptr, nullptr, nullptr};
      if (grad_params && param_count[ri] > 0) {
        for (int k = 0; k < param_count[ri]; ++k)
          grads[k] = &(*grad_params)[size_t(param_offset[ri] + k)].grad;
        g = layer_backward(layers[ri], vals, tr.inputs[ri], tr.outputs[ri], g, grads);
      } else {
        g = layer_backward(layers[ri], vals, tr.inputs[ri], tr.outputs[ri], g,
                           static_cast<Tensor* const*>(nullptr));
      }
    }
    return g;
  }
};

namespace detail {

inline int64_t fan_in_of(const LayerSpec& s) {
  switch (s.kind) {
    case LayerKind::kDense: return s.in_features;
    case LayerKind::kConv2d: return int64_t(s.in_channels) * s.kernel * s.kernel;
    case LayerKind::kLSTMCell: return s.input_size + s.hidden_size;
    case LayerKind::kEmbeddingLookup: return s.vocab_size;
    default: return 1;
  }
}

}  // namespace detail

// Initializes one named parameter from its own RNG stream so that adding
// or removing other parameters never disturbs its values.
//   dense/conv weights: uniform +-sqrt(2/fan_in)
//   lstm W,U:           uniform +-sqrt(1/fan_in), fan_in = input+hidden
//   embedding table:    uniform +-sqrt(1/vocab)
//   biases:             zero, except lstm forget-gate rows start at +1
inline void init_param(Parameter& p, const LayerSpec& s, const std::string& suffix,
                       uint64_t seed) {
  Rng rng(derive_seed(seed, p.name));
  const int64_t fan = detail::fan_in_of(s);
  if (suffix == "b") {
    p.value.fill(0.0f);
    if (s.kind == LayerKind::kLSTMCell) {
      const int H = s.hidden_size;
      for (int j = 0; j < H; ++j) p.value.data[size_t(H + j)] = 1.0f;  // forget gate
    }
    return;
  }
  double bound;
  if (s.kind == LayerKind::kDense || s.kind == LayerKind::kConv2d)
    bound = std::sqrt(2.0 / double(fan));
  else
    bound = std::sqrt(1.0 / double(fan));
  for (auto& v : p.value.data) v = float(rng.uniform(-bound, bound));
}

// An empty layer list is legal: the model is the identity map.
inline Model build_model(std::vector<LayerSpec> layers, std::vector<int> input_dims,
                         uint64_t seed) {
  Model m;
  m.layers = std::move(layers);
  m.input_dims = std::move(input_dims);
  m.seed = seed;
  std::vector<int> cur = m.input_dims;
  for (size_t i = 0; i < m.layers.size(); ++i) {
    try {
      cur = output_dims(m.layers[i], cur);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("layer " + std::to_string(i) + ": " + e.what());
    }
    m.param_offset.push_back(int(m.params.size()));
    const auto shapes = param_shapes(m.layers[i]);
    m.param_count.push_back(int(shapes.size()));
    for (const auto& ps : shapes) {
      Parameter p;
      p.name = "layer" + std::to_string(i) + "." + ps.suffix;
      p.value = Tensor(ps.dims);
      p.grad = Tensor(ps.dims);
      init_param(p, m.layers[i], ps.suffix, seed);
      m.params.push_back(std::move(p));
    }
  }
  return m;
}

}  // namespace genlab
