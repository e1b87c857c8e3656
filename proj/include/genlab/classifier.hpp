#pragma once
// Reference glyph classifier: two conv+pool stages and a dense head,
// trained with Adam on softmax cross-entropy. The model emits logits;
// softmax lives in the loss (and in callers that want probabilities).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "adam.hpp"
#include "loss.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "synthdata.hpp"

namespace genlab {

inline Model make_glyph_classifier(int size, int num_classes, int width1, int width2,
                                   uint64_t seed) {
  if (size % 4 != 0) throw std::invalid_argument("classifier size must be divisible by 4");
  const int flat = width2 * (size / 4) * (size / 4);
  return build_model(
      {LayerSpec::conv2d(1, width1, 3, 1, 1), LayerSpec::relu(), LayerSpec::maxpool2(),
       LayerSpec::conv2d(width1, width2, 3, 1, 1), LayerSpec::relu(), LayerSpec::maxpool2(),
       LayerSpec::dense(flat, num_classes)},
      {1, size, size}, seed);
}

// Copy of the model with a Softmax layer appended, so optimization
// targets can address class probabilities instead of raw logits.
inline Model with_softmax(const Model& m) {
  Model out = m;
  out.layers.push_back(LayerSpec::softmax());
  out.param_offset.push_back(int(out.params.size()));
  out.param_count.push_back(0);
  return out;
}

// First n_train samples of each class go to train, the rest to test.
// With per-sample glyph streams the train half equals a straight
// gen_glyphs(classes, n_train, ...) call.
inline std::pair<LabeledImageSet, LabeledImageSet> split_image_set(const LabeledImageSet& all,
                                                                   int n_train) {
  LabeledImageSet train, test;
  train.class_names = test.class_names = all.class_names;
  train.seed = test.seed = all.seed;
  std::vector<int> seen(all.class_names.size(), 0);
  for (size_t i = 0; i < all.images.size(); ++i) {
    const int label = all.labels[i];
    auto& dst = (seen[size_t(label)]++ < n_train) ? train : test;
    dst.images.push_back(all.images[i]);
    dst.labels.push_back(label);
  }
  return {std::move(train), std::move(test)};
}

inline double evaluate_accuracy(const Model& model, const LabeledImageSet& set) {
  if (set.images.empty()) throw std::invalid_argument("empty evaluation set");
  int hits = 0;
  for (size_t i = 0; i < set.images.size(); ++i) {
    const auto tr = model.forward(set.images[i], false);
    if (argmax(tr.final_output()) == set.labels[i]) ++hits;
  }
  return double(hits) / double(set.images.size());
}

struct TrainStats {
  std::vector<double> epoch_loss;
  std::vector<double> epoch_test_accuracy;
  double test_accuracy = 0.0;
  int epochs_run = 0;
};

// Minibatch Adam; gradients are averaged over the batch. Stops early
// once held-out accuracy reaches target_accuracy (0 disables). The epoch
// shuffle comes from a named stream of `seed`, so a run is a pure
// function of (model seed, data, hyperparameters).
inline TrainStats train_classifier(Model& model, const LabeledImageSet& train,
                                   const LabeledImageSet& test, int epochs, double lr,
                                   int batch_size, uint64_t seed,
                                   double target_accuracy = 0.0) {
  if (train.images.empty()) throw std::invalid_argument("empty training set");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  TrainStats stats;
  Rng order_rng(derive_seed(seed, "classifier/order"));
  std::vector<int> idx(train.images.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = int(i);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    order_rng.shuffle(idx);
    double loss_sum = 0.0;
    for (size_t at = 0; at < idx.size(); at += size_t(batch_size)) {
      const size_t stop = std::min(idx.size(), at + size_t(batch_size));
      model.zero_grads();
      for (size_t k = at; k < stop; ++k) {
        const int i = idx[k];
        const auto tr = model.forward(train.images[size_t(i)]);
        const auto xr = softmax_xent(tr.final_output(), train.labels[size_t(i)]);
        loss_sum += xr.loss;
        model.backward(tr, xr.grad);
      }
      const float inv = 1.0f / float(stop - at);
      for (auto& p : model.params)
        for (auto& g : p.grad.data) g *= inv;
      adam_step_all(model, lr);
    }
    stats.epoch_loss.push_back(loss_sum / double(idx.size()));
    stats.epoch_test_accuracy.push_back(evaluate_accuracy(model, test));
    stats.test_accuracy = stats.epoch_test_accuracy.back();
    stats.epochs_run = epoch + 1;
    if (target_accuracy > 0.0 && stats.test_accuracy >= target_accuracy) break;
  }
  return stats;
}

}  // namespace genlab
