#pragma once
// Adam updates. The production path fixes beta1=0.9, beta2=0.999,
// eps=1e-8 and tracks the step index in the Parameter; the explicit
// overload exposes every knob. Bias-correction factors are computed in
// double; moments and the applied delta stay in float like the rest of
// the training path.

#include <cmath>
#include <stdexcept>

#include "model.hpp"

namespace genlab {

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

// One update from p.grad with step index t (1-based).
inline void adam_step(Parameter& p, double lr, double beta1, double beta2, double eps,
                      int64_t t) {
  if (t < 1) throw std::invalid_argument("adam_step: step index must be >= 1");
  if (p.m.data.empty()) {
    p.m = Tensor(p.value.dims);
    p.v = Tensor(p.value.dims);
  }
  const double bc1 = 1.0 - std::pow(beta1, double(t));
  const double bc2 = 1.0 - std::pow(beta2, double(t));
  const float b1 = float(beta1), b2 = float(beta2);
  for (size_t i = 0; i < p.value.data.size(); ++i) {
    const float g = p.grad.data[i];
    p.m.data[i] = b1 * p.m.data[i] + (1.0f - b1) * g;
    p.v.data[i] = b2 * p.v.data[i] + (1.0f - b2) * g * g;
    const double mhat = double(p.m.data[i]) / bc1;
    const double vhat = double(p.v.data[i]) / bc2;
    p.value.data[i] -= float(lr * mhat / (std::sqrt(vhat) + eps));
  }
}

inline void adam_step(Parameter& p, double lr) {
  p.step += 1;
  adam_step(p, lr, kAdamBeta1, kAdamBeta2, kAdamEps, p.step);
}

inline void adam_step_all(Model& m, double lr) {
  for (auto& p : m.params) adam_step(p, lr);
}

}  // namespace genlab
