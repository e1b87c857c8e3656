#pragma once
// Fused softmax + cross-entropy on logits. Fusing keeps the gradient
// (p - onehot) exact even for confidently wrong logits where a separate
// log(softmax) would underflow.

#include <cmath>
#include <stdexcept>

#include "tensor.hpp"

namespace genlab {

struct XentResult {
  double loss = 0.0;
  Tensor probs;
  Tensor grad;  // d loss / d logits = probs - onehot(target)
};

inline XentResult softmax_xent(const Tensor& logits, int target) {
  const int n = int(logits.numel());
  if (target < 0 || target >= n) throw std::invalid_argument("xent target out of range");
  XentResult r;
  r.probs = Tensor(logits.dims);
  float m = logits.data[0];
  for (float v : logits.data) m = std::max(m, v);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = std::exp(double(logits.data[size_t(i)]) - double(m));
    r.probs.data[size_t(i)] = float(e);
    sum += e;
  }
  for (int i = 0; i < n; ++i) r.probs.data[size_t(i)] = float(r.probs.data[size_t(i)] / sum);
  // loss = log(sum exp(z - m)) - (z_t - m), in double for small probs
  r.loss = std::log(sum) - (double(logits.data[size_t(target)]) - double(m));
  r.grad = r.probs;
  r.grad.data[size_t(target)] -= 1.0f;
  return r;
}

inline int argmax(const Tensor& t) {
  int best = 0;
  for (int i = 1; i < int(t.numel()); ++i)
    if (t.data[size_t(i)] > t.data[size_t(best)]) best = i;
  return best;
}

}  // namespace genlab
