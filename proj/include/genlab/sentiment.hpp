#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "genlab/adam.hpp"
#include "genlab/checkpoint.hpp"
#include "genlab/model.hpp"
#include "genlab/rng.hpp"
#include "genlab/synthdata.hpp"

namespace genlab {

// Character vocabulary: printable ASCII 32..126 at indices 0..94, newline
// at index 95. Fixed rather than corpus-derived so checkpoints from
// different corpora stay interchangeable.
constexpr int kCharVocab = 96;

inline int char_index(char c) {
  if (c == '\n') return 95;
  const unsigned char u = static_cast<unsigned char>(c);
  if (u >= 32 && u <= 126) return int(u) - 32;
  throw std::invalid_argument("character code " + std::to_string(int(u)) +
                              " is outside the 96-char vocabulary");
}

inline char index_char(int i) {
  if (i < 0 || i >= kCharVocab) throw std::invalid_argument("character index out of range");
  return i == 95 ? '\n' : char(i + 32);
}

// Shared train/held-out split over document indices. Two adjacent docs
// per block of 20 stay balanced when labels alternate by index.
inline bool review_held_out(size_t doc_index) { return doc_index % 20 >= 18; }

// Next-character model: embedding -> LSTM cell -> linear projection.
// The Model member is a parameter container only: a recurrent cell does
// not fit the feed-forward layer chain, so the layers are assembled by
// hand (same param naming and init streams as build_model) and the
// recurrent wiring lives in the step helpers below; model.forward() is
// never called on it.
struct CharLM {
  Model model;
  int embed_dim = 0;
  int hidden = 0;
  std::vector<double> epoch_loss;  // mean train cross-entropy per char
  double held_out_loss = 0.0;      // same metric on the held-out docs

  const Tensor& proj_w() const { return model.params[0].value; }
  const Tensor& proj_b() const { return model.params[1].value; }
  const Tensor& table() const { return model.params[2].value; }
  const Tensor& lstm_w() const { return model.params[3].value; }
  const Tensor& lstm_u() const { return model.params[4].value; }
  const Tensor& lstm_b() const { return model.params[5].value; }
  const LayerSpec& lstm_spec() const { return model.layers[2]; }
};

inline CharLM make_char_lm(int embed_dim, int hidden, uint64_t seed) {
  if (embed_dim < 1 || hidden < 1)
    throw std::invalid_argument("embed_dim and hidden must be positive");
  CharLM lm;
  lm.embed_dim = embed_dim;
  lm.hidden = hidden;
  Model& m = lm.model;
  m.layers = {LayerSpec::dense(hidden, kCharVocab), LayerSpec::embedding(kCharVocab, embed_dim),
              LayerSpec::lstm_cell(embed_dim, hidden)};
  m.input_dims = {hidden};
  m.seed = seed;
  for (size_t i = 0; i < m.layers.size(); ++i) {
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
  return lm;
}

// CharLM checkpoints reuse the NNCK container but carry their own header
// kind, because the recurrent wiring cannot be rebuilt by the generic
// feed-forward loader.
inline Checkpoint char_lm_checkpoint(const CharLM& lm, const HeaderEntries& extras = {}) {
  Checkpoint ck;
  ck.header.emplace_back("kind", "charlm");
  ck.header.emplace_back("embed_dim", std::to_string(lm.embed_dim));
  ck.header.emplace_back("hidden", std::to_string(lm.hidden));
  ck.header.emplace_back("seed", std::to_string(lm.model.seed));
  for (const auto& kv : extras) ck.header.push_back(kv);
  for (const auto& p : lm.model.params) ck.tensors.push_back({p.name, p.value});
  return ck;
}

inline void save_char_lm(const std::string& path, const CharLM& lm,
                         const HeaderEntries& extras = {}) {
  write_checkpoint(path, char_lm_checkpoint(lm, extras));
}

inline CharLM char_lm_from_checkpoint(const Checkpoint& ck) {
  const std::string* kind = ck.find("kind");
  if (!kind || *kind != "charlm")
    throw std::runtime_error("checkpoint is not a charlm (missing kind=charlm)");
  const std::string* e = ck.find("embed_dim");
  const std::string* h = ck.find("hidden");
  if (!e || !h) throw std::runtime_error("charlm checkpoint missing embed_dim/hidden");
  uint64_t seed = 0;
  if (const std::string* s = ck.find("seed")) seed = std::stoull(*s);
  CharLM lm = make_char_lm(std::stoi(*e), std::stoi(*h), seed);
  for (auto& p : lm.model.params) {
    const Tensor* t = ck.find_tensor(p.name);
    if (!t) throw std::runtime_error("charlm checkpoint missing tensor " + p.name);
    if (t->dims != p.value.dims)
      throw std::runtime_error("charlm checkpoint tensor " + p.name + " has shape " +
                               dims_to_string(t->dims) + ", expected " +
                               dims_to_string(p.value.dims));
    p.value = *t;
  }
  return lm;
}

inline CharLM load_char_lm(const std::string& path, Checkpoint* out_ck = nullptr) {
  Checkpoint ck = read_checkpoint(path);
  CharLM lm = char_lm_from_checkpoint(ck);
  if (out_ck) *out_ck = std::move(ck);
  return lm;
}

namespace detail {

struct LmStep {
  int input = 0;           // char index fed this step
  int target = 0;          // char index to predict
  Tensor h_prev, c_prev;   // state entering the step
  Tensor h, c;             // state leaving the step
  std::vector<float> probs;
};

// One forward step; h/c are updated in place. Returns the softmax row.
inline std::vector<float> lm_forward_step(const CharLM& lm, int input, Tensor& h, Tensor& c) {
  const int E = lm.embed_dim, H = lm.hidden;
  Tensor x({E});
  for (int j = 0; j < E; ++j) x.data[size_t(j)] = lm.table()(input, j);
  auto hc = lstm_step(lm.lstm_spec(), lm.lstm_w(), lm.lstm_u(), lm.lstm_b(), x, h, c);
  h = std::move(hc.first);
  c = std::move(hc.second);
  std::vector<float> logits(lm.proj_b().data.begin(), lm.proj_b().data.end());
  matvec_acc(lm.proj_w(), h.data.data(), logits.data());
  float mx = logits[0];
  for (float v : logits) mx = std::max(mx, v);
  double z = 0;
  for (float& v : logits) {
    v = std::exp(v - mx);
    z += v;
  }
  for (float& v : logits) v = float(double(v) / z);
  (void)H;
  return logits;
}

// Accumulates gradients of the window's mean cross-entropy into the
// model (grads are zeroed first). Gradient flow stops at the window's
// initial state, which is the truncation in truncated BPTT.
inline void lm_backward_window(CharLM& lm, const std::vector<LmStep>& steps) {
  const int E = lm.embed_dim, H = lm.hidden;
  Model& m = lm.model;
  m.zero_grads();
  const float inv = 1.0f / float(steps.size());
  Tensor gh({H}), gc({H});
  for (size_t t = steps.size(); t-- > 0;) {
    const LmStep& st = steps[t];
    std::vector<float> dlogit(st.probs);
    dlogit[size_t(st.target)] -= 1.0f;
    for (float& v : dlogit) v *= inv;
    outer_acc(dlogit.data(), kCharVocab, st.h.data.data(), H, m.params[0].grad);
    for (int j = 0; j < kCharVocab; ++j) m.params[1].grad.data[size_t(j)] += dlogit[size_t(j)];
    matvec_t_acc(m.params[0].value, dlogit.data(), gh.data.data());

    Tensor in({E + 2 * H});
    for (int j = 0; j < E; ++j) in.data[size_t(j)] = lm.table()(st.input, j);
    std::copy(st.h_prev.data.begin(), st.h_prev.data.end(), in.data.begin() + E);
    std::copy(st.c_prev.data.begin(), st.c_prev.data.end(), in.data.begin() + E + H);
    Tensor gy({2 * H});
    std::copy(gh.data.begin(), gh.data.end(), gy.data.begin());
    std::copy(gc.data.begin(), gc.data.end(), gy.data.begin() + H);
    const Tensor gx = lstm_backward(lm.lstm_spec(), m.params[3].value, m.params[4].value,
                                    m.params[5].value, in, gy, &m.params[3].grad,
                                    &m.params[4].grad, &m.params[5].grad);
    for (int j = 0; j < E; ++j) m.params[2].grad(st.input, j) += gx.data[size_t(j)];
    std::copy(gx.data.begin() + E, gx.data.begin() + E + H, gh.data.begin());
    std::copy(gx.data.begin() + E + H, gx.data.end(), gc.data.begin());
  }
}

}  // namespace detail

// Mean next-character cross-entropy over the texts. Each text is consumed
// from a zero state with a newline start token, so every character of the
// text is predicted exactly once.
inline double char_lm_loss(const CharLM& lm, const std::vector<std::string>& texts) {
  double total = 0;
  int64_t chars = 0;
  for (const auto& text : texts) {
    Tensor h({lm.hidden}), c({lm.hidden});
    int cur = char_index('\n');
    for (size_t i = 0; i < text.size(); ++i) {
      const int target = char_index(text[i]);
      const auto probs = detail::lm_forward_step(lm, cur, h, c);
      total -= std::log(std::max(double(probs[size_t(target)]), 1e-12));
      ++chars;
      cur = target;
    }
  }
  if (chars == 0) throw std::invalid_argument("char_lm_loss: no characters");
  return total / double(chars);
}

// Truncated backpropagation through time: each document is processed in
// windows of bptt_len steps; gradients flow within a window only, state
// carries across windows, and Adam updates after every window. Documents
// with index % 20 >= 18 are held out for the reported loss (all docs when
// the corpus is too small to spare any); holding out an adjacent pair per
// block keeps the held set balanced when labels alternate by index.
inline CharLM train_char_lm(const ReviewCorpus& corpus, int embed_dim, int hidden, int epochs,
                            float lr, int bptt_len, uint64_t seed) {
  if (corpus.docs.empty()) throw std::invalid_argument("corpus is empty");
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (bptt_len < 1) throw std::invalid_argument("bptt_len must be >= 1");
  if (!(lr > 0)) throw std::invalid_argument("lr must be positive");
  for (const auto& d : corpus.docs)
    for (char ch : d.text) (void)char_index(ch);  // vocabulary must cover the corpus

  std::vector<std::string> train_texts, held_texts;
  for (size_t i = 0; i < corpus.docs.size(); ++i)
    (review_held_out(i) ? held_texts : train_texts).push_back(corpus.docs[i].text);
  if (held_texts.empty()) held_texts = train_texts;

  CharLM lm = make_char_lm(embed_dim, hidden, seed);
  const int H = hidden;
  Model& m = lm.model;
  Rng order_rng(derive_seed(seed, "charlm/order"));

  std::vector<size_t> order(train_texts.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < epochs; ++epoch) {
    order_rng.shuffle(order);
    double epoch_total = 0;
    int64_t epoch_chars = 0;
    for (size_t oi : order) {
      const std::string& text = train_texts[oi];
      Tensor h({H}), c({H});
      int cur = char_index('\n');
      size_t pos = 0;  // offset of the next target character
      while (pos < text.size()) {
        // forward a window, caching what backward needs
        std::vector<detail::LmStep> steps;
        while (pos < text.size() && int(steps.size()) < bptt_len) {
          detail::LmStep st;
          st.input = cur;
          st.target = char_index(text[pos]);
          st.h_prev = h;
          st.c_prev = c;
          st.probs = detail::lm_forward_step(lm, st.input, h, c);
          st.h = h;
          st.c = c;
          epoch_total -= std::log(std::max(double(st.probs[size_t(st.target)]), 1e-12));
          ++epoch_chars;
          cur = st.target;
          ++pos;
          steps.push_back(std::move(st));
        }
        detail::lm_backward_window(lm, steps);
        adam_step_all(m, lr);
      }
    }
    lm.epoch_loss.push_back(epoch_chars ? epoch_total / double(epoch_chars) : 0.0);
  }
  lm.held_out_loss = char_lm_loss(lm, held_texts);
  return lm;
}

// Hidden state after consuming the whole text from a zero state. No start
// token here: the state is a pure function of the text itself.
inline Tensor encode_review(const CharLM& lm, const std::string& text) {
  Tensor h({lm.hidden}), c({lm.hidden});
  for (char ch : text) detail::lm_forward_step(lm, char_index(ch), h, c);
  return h;
}

// ----------------------------------------------------------------- probe

struct Probe {
  Tensor weights;       // [H]
  double bias = 0.0;
  double accuracy = 0.0;  // on the training states
};

inline double probe_score(const Probe& p, const Tensor& state) {
  double z = p.bias;
  for (size_t j = 0; j < p.weights.data.size(); ++j)
    z += double(p.weights.data[j]) * double(state.data[j]);
  return z;
}

inline double probe_accuracy(const Probe& p, const std::vector<Tensor>& states,
                             const std::vector<int>& labels) {
  if (states.empty() || states.size() != labels.size())
    throw std::invalid_argument("states/labels size mismatch");
  int correct = 0;
  for (size_t i = 0; i < states.size(); ++i)
    if ((probe_score(p, states[i]) > 0.0) == (labels[i] != 0)) ++correct;
  return double(correct) / double(states.size());
}

// Logistic regression by full-batch gradient descent. The step size comes
// from the loss's curvature bound (L <= max ||(h,1)||^2 / 4), which keeps
// plain descent stable without a line search; iteration stops when the
// loss improves by less than 1e-6 or after 1e4 rounds.
inline Probe fit_probe(const std::vector<Tensor>& states, const std::vector<int>& labels) {
  if (states.size() != labels.size())
    throw std::invalid_argument("states/labels size mismatch");
  int n_pos = 0, n_neg = 0;
  for (int l : labels) (l != 0 ? n_pos : n_neg)++;
  if (n_pos < 2 || n_neg < 2)
    throw std::invalid_argument("need at least 2 examples per class");
  const size_t n = states.size();
  const size_t H = states[0].data.size();
  for (const auto& s : states)
    if (s.data.size() != H) throw std::invalid_argument("state dimensions differ");

  double max_norm = 0;
  for (const auto& s : states) {
    double sq = 1.0;  // bias column
    for (float v : s.data) sq += double(v) * double(v);
    max_norm = std::max(max_norm, sq);
  }
  const double step = 4.0 / max_norm;

  Probe p;
  p.weights = Tensor({int(H)});
  std::vector<double> w(H, 0.0);
  double b = 0.0;
  double prev_loss = std::numeric_limits<double>::infinity();
  std::vector<double> gw(H);
  for (int iter = 0; iter < 10000; ++iter) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0, loss = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double z = b;
      for (size_t j = 0; j < H; ++j) z += w[j] * double(states[i].data[j]);
      const double y = labels[i] != 0 ? 1.0 : -1.0;
      const double m = y * z;
      // log(1+exp(-m)) without overflow
      loss += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
      const double coeff = -y / (1.0 + std::exp(m));
      for (size_t j = 0; j < H; ++j) gw[j] += coeff * double(states[i].data[j]);
      gb += coeff;
    }
    loss /= double(n);
    for (size_t j = 0; j < H; ++j) w[j] -= step * gw[j] / double(n);
    b -= step * gb / double(n);
    if (std::abs(prev_loss - loss) < 1e-6) break;
    prev_loss = loss;
  }
  for (size_t j = 0; j < H; ++j) {
    if (!std::isfinite(w[j])) throw std::runtime_error("probe diverged");
    p.weights.data[j] = float(w[j]);
  }
  p.bias = b;
  p.accuracy = probe_accuracy(p, states, labels);
  return p;
}

// ------------------------------------------------------- sentiment unit

struct HistogramBin {
  double bin_low = 0.0;
  int count_pos = 0;
  int count_neg = 0;
};

struct SentimentUnit {
  int index = 0;                    // argmax |probe weight|, ties to lowest
  double low_mode_mean = 0.0;       // smaller of the two class means
  double high_mode_mean = 0.0;      // larger of the two class means
  double threshold = 0.0;
  double single_unit_accuracy = 0.0;
  double pos_mean = 0.0, neg_mean = 0.0;
  double pooled_std = 0.0;          // within-class, pooled
  double separation = 0.0;          // |pos_mean - neg_mean| / pooled_std
  std::vector<HistogramBin> histogram;  // fixed 40 bins over observed range
  double bin_width = 0.0;
};

inline SentimentUnit find_sentiment_unit(const Probe& probe, const std::vector<Tensor>& states,
                                         const std::vector<int>& labels) {
  if (states.empty() || states.size() != labels.size())
    throw std::invalid_argument("states/labels size mismatch");
  SentimentUnit u;
  for (size_t j = 1; j < probe.weights.data.size(); ++j)
    if (std::abs(probe.weights.data[j]) > std::abs(probe.weights.data[size_t(u.index)]))
      u.index = int(j);

  const size_t n = states.size();
  std::vector<double> act(n);
  for (size_t i = 0; i < n; ++i) act[i] = double(states[i].data[size_t(u.index)]);

  double sum_pos = 0, sum_neg = 0;
  int n_pos = 0, n_neg = 0;
  for (size_t i = 0; i < n; ++i) {
    if (labels[i] != 0) {
      sum_pos += act[i];
      ++n_pos;
    } else {
      sum_neg += act[i];
      ++n_neg;
    }
  }
  u.pos_mean = n_pos ? sum_pos / n_pos : 0.0;
  u.neg_mean = n_neg ? sum_neg / n_neg : 0.0;
  u.low_mode_mean = std::min(u.pos_mean, u.neg_mean);
  u.high_mode_mean = std::max(u.pos_mean, u.neg_mean);
  double ss = 0;
  for (size_t i = 0; i < n; ++i) {
    const double mean = labels[i] != 0 ? u.pos_mean : u.neg_mean;
    ss += (act[i] - mean) * (act[i] - mean);
  }
  u.pooled_std = n > 2 ? std::sqrt(ss / double(n - 2)) : 0.0;
  u.separation = u.pooled_std > 0 ? std::abs(u.pos_mean - u.neg_mean) / u.pooled_std
                                  : std::numeric_limits<double>::infinity();

  // threshold sweep over midpoints of adjacent sorted activations; the
  // predicted class above the threshold follows the probe weight's sign
  const bool pos_is_high = probe.weights.data[size_t(u.index)] >= 0;
  std::vector<double> sorted(act);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cands;
  cands.push_back(sorted.front() - 1.0);
  for (size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i] < sorted[i + 1]) cands.push_back(0.5 * (sorted[i] + sorted[i + 1]));
  cands.push_back(sorted.back() + 1.0);
  int best = -1;
  for (double th : cands) {
    int correct = 0;
    for (size_t i = 0; i < n; ++i) {
      const bool high = act[i] >= th;
      const bool predict_pos = high == pos_is_high;
      if (predict_pos == (labels[i] != 0)) ++correct;
    }
    if (correct > best) {
      best = correct;
      u.threshold = th;
    }
  }
  u.single_unit_accuracy = double(best) / double(n);

  // fixed 40-bin histogram over the observed range
  const double lo = sorted.front(), hi = sorted.back();
  const int bins = 40;
  u.bin_width = hi > lo ? (hi - lo) / bins : 1.0;
  u.histogram.assign(bins, HistogramBin{});
  for (int k = 0; k < bins; ++k) u.histogram[size_t(k)].bin_low = lo + k * u.bin_width;
  for (size_t i = 0; i < n; ++i) {
    int k = int((act[i] - lo) / u.bin_width);
    k = std::clamp(k, 0, bins - 1);
    if (labels[i] != 0)
      ++u.histogram[size_t(k)].count_pos;
    else
      ++u.histogram[size_t(k)].count_neg;
  }
  return u;
}

// ------------------------------------------------------------ generation

// Samples `length` characters starting from a newline token and a zero
// state. temperature 0 means argmax. When clamp = (unit, value) is set,
// h[unit] is overwritten after every LSTM step, before the projection and
// before the state feeds the next step.
inline std::string generate(const CharLM& lm, int length, double temperature, uint64_t seed,
                            std::optional<std::pair<int, float>> clamp = std::nullopt) {
  if (length < 0) throw std::invalid_argument("length must be >= 0");
  if (temperature < 0) throw std::invalid_argument("temperature must be >= 0");
  if (clamp && (clamp->first < 0 || clamp->first >= lm.hidden))
    throw std::invalid_argument("clamp unit " + std::to_string(clamp->first) +
                                " outside hidden size " + std::to_string(lm.hidden));
  const int E = lm.embed_dim, H = lm.hidden;
  Tensor h({H}), c({H});
  Rng rng(derive_seed(seed, "generate"));
  std::string out;
  out.reserve(size_t(length));
  int cur = char_index('\n');
  Tensor x({E});
  for (int step = 0; step < length; ++step) {
    for (int j = 0; j < E; ++j) x.data[size_t(j)] = lm.table()(cur, j);
    auto hc = lstm_step(lm.lstm_spec(), lm.lstm_w(), lm.lstm_u(), lm.lstm_b(), x, h, c);
    h = std::move(hc.first);
    c = std::move(hc.second);
    if (clamp) h.data[size_t(clamp->first)] = clamp->second;
    std::vector<float> logits(lm.proj_b().data.begin(), lm.proj_b().data.end());
    detail::matvec_acc(lm.proj_w(), h.data.data(), logits.data());
    int next = 0;
    if (temperature == 0.0) {
      for (int j = 1; j < kCharVocab; ++j)
        if (logits[size_t(j)] > logits[size_t(next)]) next = j;
    } else {
      double mx = -std::numeric_limits<double>::infinity();
      for (float v : logits) mx = std::max(mx, double(v) / temperature);
      std::vector<double> p(kCharVocab);
      double z = 0;
      for (int j = 0; j < kCharVocab; ++j) {
        p[size_t(j)] = std::exp(double(logits[size_t(j)]) / temperature - mx);
        z += p[size_t(j)];
      }
      double r = double(rng.next_float()) * z;
      for (int j = 0; j < kCharVocab; ++j) {
        r -= p[size_t(j)];
        if (r <= 0 || j == kCharVocab - 1) {
          next = j;
          break;
        }
      }
    }
    out.push_back(index_char(next));
    cur = next;
  }
  return out;
}

}  // namespace genlab
