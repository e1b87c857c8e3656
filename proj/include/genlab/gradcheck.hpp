#pragma once
// Central-difference gradient checking against the analytic backward
// pass, for every parameter scalar and every input scalar. The probe
// loss is L = 0.5 * sum(y^2) over the final output, whose gradient at
// the output is simply y.
//
// The 32-bit harness runs the model's own float kernels; the 64-bit
// harness copies parameters and input to double and runs the same
// templated kernels at double precision, shrinking finite-difference
// rounding noise from ~1e-3 to ~1e-9 relative.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"

namespace genlab {

enum class CheckPrecision { kFloat32, kFloat64 };

namespace detail {

template <typename T>
struct ShadowModel {
  const Model* base;
  std::vector<TensorT<T>> values;  // parallel to base->params
  TensorT<T> input;

  T loss() const {
    TensorT<T> cur = input;
    for (size_t i = 0; i < base->layers.size(); ++i) {
      const TensorT<T>* ptrs[3] = {nullptr, nullptr, nullptr};
      for (int k = 0; k < base->param_count[i]; ++k)
        ptrs[k] = &values[size_t(base->param_offset[i] + k)];
      cur = layer_forward(base->layers[i], ptrs, cur);
    }
    T acc = T(0);
    for (T v : cur.data) acc += v * v;
    return T(0.5) * acc;
  }

  // Analytic gradients of loss() for all parameters and the input.
  void analytic(std::vector<TensorT<T>>& pgrads, TensorT<T>& igrad) const {
    std::vector<TensorT<T>> ins, outs;
    TensorT<T> cur = input;
    for (size_t i = 0; i < base->layers.size(); ++i) {
      const TensorT<T>* ptrs[3] = {nullptr, nullptr, nullptr};
      for (int k = 0; k < base->param_count[i]; ++k)
        ptrs[k] = &values[size_t(base->param_offset[i] + k)];
      ins.push_back(cur);
      cur = layer_forward(base->layers[i], ptrs, cur);
      outs.push_back(cur);
    }
    pgrads.clear();
    for (const auto& v : values) pgrads.emplace_back(v.dims);
    TensorT<T> g = outs.back();  // dL/dy = y
    for (size_t ri = base->layers.size(); ri-- > 0;) {
      const TensorT<T>* ptrs[3] = {nullptr, nullptr, nullptr};
      TensorT<T>* gptrs[3] = {nullptr, nullptr, nullptr};
      for (int k = 0; k < base->param_count[ri]; ++k) {
        ptrs[k] = &values[size_t(base->param_offset[ri] + k)];
        gptrs[k] = &pgrads[size_t(base->param_offset[ri] + k)];
      }
      g = layer_backward(base->layers[ri], ptrs, ins[ri], outs[ri], g,
                         base->param_count[ri] > 0 ? gptrs : nullptr);
    }
    igrad = g;
  }
};

template <typename T>
double run_grad_check(const Model& model, const Tensor& input, double eps) {
  ShadowModel<T> sm;
  sm.base = &model;
  for (const auto& p : model.params) {
    TensorT<T> v(p.value.dims);
    for (size_t i = 0; i < v.data.size(); ++i) v.data[i] = T(p.value.data[i]);
    sm.values.push_back(std::move(v));
  }
  sm.input = TensorT<T>(input.dims);
  for (size_t i = 0; i < input.data.size(); ++i) sm.input.data[i] = T(input.data[i]);

  const T base_loss = sm.loss();
  if (!std::isfinite(double(base_loss)))
    throw std::runtime_error("grad_check: loss is not finite");

  std::vector<TensorT<T>> pgrads;
  TensorT<T> igrad;
  sm.analytic(pgrads, igrad);

  // Scale floor keeps near-zero coordinates from dividing FD noise by
  // a near-zero denominator.
  double gscale = 0.0;
  for (const auto& g : pgrads)
    for (T v : g.data) gscale = std::max(gscale, std::abs(double(v)));
  for (T v : igrad.data) gscale = std::max(gscale, std::abs(double(v)));
  const double floor = std::max(1e-2 * gscale, 1e-12);

  double worst = 0.0;
  auto probe = [&](T* slot, double analytic) {
    const T saved = *slot;
    *slot = T(double(saved) + eps);
    const double lp = double(sm.loss());
    *slot = T(double(saved) - eps);
    const double lm = double(sm.loss());
    *slot = saved;
    const double fd = (lp - lm) / (2.0 * eps);
    const double denom = std::max({std::abs(analytic), std::abs(fd), floor});
    worst = std::max(worst, std::abs(analytic - fd) / denom);
  };
  for (size_t pi = 0; pi < sm.values.size(); ++pi)
    for (size_t i = 0; i < sm.values[pi].data.size(); ++i)
      probe(&sm.values[pi].data[i], double(pgrads[pi].data[i]));
  for (size_t i = 0; i < sm.input.data.size(); ++i)
    probe(&sm.input.data[i], double(igrad.data[i]));
  return worst;
}

}  // namespace detail

inline double grad_check(const Model& model, const Tensor& input, double eps,
                         CheckPrecision prec = CheckPrecision::kFloat32) {
  if (eps == 0.0) throw std::invalid_argument("grad_check: eps must be nonzero");
  int64_t total = 0;
  for (const auto& p : model.params) total += p.value.numel();
  if (total > 10000)
    throw std::invalid_argument("grad_check: model has " + std::to_string(total) +
                                " parameters, limit is 10000");
  if (prec == CheckPrecision::kFloat64) return detail::run_grad_check<double>(model, input, eps);
  return detail::run_grad_check<float>(model, input, eps);
}

}  // namespace genlab
