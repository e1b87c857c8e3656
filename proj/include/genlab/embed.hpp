#pragma once
// CBOW word embeddings over a sentence corpus, plus nearest-neighbor and
// vector-offset analogy queries. The trainer is a two-layer model
// (embedding lookup fed a bag-of-words vector, dense projection to the
// vocabulary) optimized with Adam on full-softmax cross-entropy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "adam.hpp"
#include "loss.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "synthdata.hpp"
#include "tensor.hpp"

namespace genlab {

struct Vocab {
  std::vector<std::string> words;  // sorted, unique, indices dense 0..V-1

  int size() const { return int(words.size()); }

  int find(const std::string& w) const {
    const auto it = std::lower_bound(words.begin(), words.end(), w);
    if (it == words.end() || *it != w) return -1;
    return int(it - words.begin());
  }

  int index_of(const std::string& w) const {
    const int i = find(w);
    if (i < 0) throw std::invalid_argument("word not in vocabulary: " + w);
    return i;
  }
};

inline Vocab vocab_from_sentences(const std::vector<std::string>& sentences) {
  Vocab v;
  for (const auto& s : sentences)
    for (auto& w : detail::tokenize_words(s)) v.words.push_back(std::move(w));
  std::sort(v.words.begin(), v.words.end());
  v.words.erase(std::unique(v.words.begin(), v.words.end()), v.words.end());
  return v;
}

inline Tensor one_hot(int i, int vocab_size) {
  if (vocab_size < 1) throw std::invalid_argument("one_hot needs vocab_size >= 1");
  if (i < 0 || i >= vocab_size)
    throw std::invalid_argument("one_hot index " + std::to_string(i) + " out of range [0," +
                                std::to_string(vocab_size) + ")");
  Tensor t({vocab_size});
  t.data[size_t(i)] = 1.0f;
  return t;
}

struct EmbeddingTable {
  Tensor input;   // [V, m], the learned representation; rows are queried
  Tensor output;  // [m, V], the projection used only during training

  int vocab_size() const { return input.dims[0]; }
  int dim() const { return input.dims[1]; }

  Tensor row(int i) const {
    if (i < 0 || i >= vocab_size()) throw std::invalid_argument("embedding row out of range");
    Tensor r({dim()});
    for (int k = 0; k < dim(); ++k) r.data[size_t(k)] = input(i, k);
    return r;
  }
};

struct CbowResult {
  Vocab vocab;
  EmbeddingTable table;
  std::vector<double> epoch_loss;      // mean cross-entropy per epoch
  bool vocab_smaller_than_dim = false;  // V <= m: legal, but worth a warning
};

// Bag-of-words prediction of each sentence position's center word from
// the sum of one-hots within `window` on either side (never crossing the
// sentence boundary). Single-word sentences contribute no positions.
inline CbowResult train_cbow(const RelationalCorpus& corpus, int window, int dim, int epochs,
                             double lr, uint64_t seed) {
  if (window < 1) throw std::invalid_argument("cbow window must be >= 1");
  if (dim < 2) throw std::invalid_argument("cbow dim must be >= 2");
  if (epochs < 0) throw std::invalid_argument("cbow epochs must be >= 0");
  CbowResult res;
  res.vocab = vocab_from_sentences(corpus.sentences);
  const int V = res.vocab.size();
  if (V == 0) throw std::invalid_argument("cbow corpus has no words");
  res.vocab_smaller_than_dim = V <= dim;

  std::vector<std::vector<int>> sent_ids;
  for (const auto& s : corpus.sentences) {
    const auto toks = detail::tokenize_words(s);
    if (toks.empty()) continue;
    std::vector<int> ids;
    ids.reserve(toks.size());
    for (const auto& w : toks) ids.push_back(res.vocab.index_of(w));
    sent_ids.push_back(std::move(ids));
  }

  auto model = build_model({LayerSpec::embedding(V, dim), LayerSpec::dense(dim, V)}, {V}, seed);

  struct Position {
    int sent, center;
  };
  std::vector<Position> positions;
  for (size_t si = 0; si < sent_ids.size(); ++si)
    if (sent_ids[si].size() > 1)
      for (size_t ci = 0; ci < sent_ids[si].size(); ++ci)
        positions.push_back({int(si), int(ci)});

  Rng order_rng(derive_seed(seed, "cbow/order"));
  Tensor context({V});
  for (int epoch = 0; epoch < epochs; ++epoch) {
    order_rng.shuffle(positions);
    double loss_sum = 0.0;
    for (const auto& pos : positions) {
      const auto& ids = sent_ids[size_t(pos.sent)];
      context.fill(0.0f);
      const int lo = std::max(0, pos.center - window);
      const int hi = std::min(int(ids.size()) - 1, pos.center + window);
      for (int j = lo; j <= hi; ++j)
        if (j != pos.center) context.data[size_t(ids[size_t(j)])] += 1.0f;
      const auto tr = model.forward(context);
      const auto xr = softmax_xent(tr.final_output(), ids[size_t(pos.center)]);
      loss_sum += xr.loss;
      model.zero_grads();
      model.backward(tr, xr.grad);
      adam_step_all(model, lr);
    }
    res.epoch_loss.push_back(positions.empty() ? 0.0 : loss_sum / double(positions.size()));
  }

  res.table.input = *model.find_param("layer0.table");
  const Tensor& w = *model.find_param("layer1.W");  // [V, dim]
  res.table.output = Tensor({dim, V});
  for (int v = 0; v < V; ++v)
    for (int k = 0; k < dim; ++k) res.table.output(k, v) = w(v, k);
  return res;
}

// Ranked (word, cosine) list against the input-matrix rows, descending
// cosine, ties broken by vocabulary index. Excluded words are filtered
// before ranking.
inline std::vector<std::pair<std::string, double>> nearest(
    const EmbeddingTable& table, const Vocab& vocab, const Tensor& query, int k,
    const std::vector<std::string>& exclude = {}) {
  if (k < 1) throw std::invalid_argument("nearest needs k >= 1");
  if (query.dims != std::vector<int>{table.dim()})
    throw std::invalid_argument("query must be a vector of the embedding dimension");
  if (vocab.size() != table.vocab_size())
    throw std::invalid_argument("vocabulary and table sizes disagree");
  double qn = 0.0;
  for (float v : query.data) qn += double(v) * double(v);
  if (qn == 0.0) throw std::invalid_argument("cosine of the zero vector is undefined");
  qn = std::sqrt(qn);
  std::vector<char> skip(size_t(vocab.size()), 0);
  for (const auto& w : exclude) {
    const int i = vocab.find(w);
    if (i >= 0) skip[size_t(i)] = 1;
  }
  std::vector<std::pair<std::string, double>> out;
  std::vector<int> order;
  std::vector<double> cosines(size_t(vocab.size()), 0.0);
  for (int i = 0; i < vocab.size(); ++i) {
    if (skip[size_t(i)]) continue;
    double dot = 0.0, rn = 0.0;
    for (int d = 0; d < table.dim(); ++d) {
      const double r = table.input(i, d);
      dot += r * double(query.data[size_t(d)]);
      rn += r * r;
    }
    cosines[size_t(i)] = rn == 0.0 ? 0.0 : dot / (std::sqrt(rn) * qn);
    order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (cosines[size_t(a)] != cosines[size_t(b)]) return cosines[size_t(a)] > cosines[size_t(b)];
    return a < b;
  });
  for (size_t r = 0; r < order.size() && int(r) < k; ++r)
    out.emplace_back(vocab.words[size_t(order[r])], cosines[size_t(order[r])]);
  return out;
}

// Vector-offset analogy a : b :: c : ?, querying v_b - v_a + v_c with
// {a, b, c} excluded from the ranking. When a == b the query equals v_c
// element for element.
inline std::vector<std::pair<std::string, double>> analogy(const EmbeddingTable& table,
                                                           const Vocab& vocab,
                                                           const std::string& a,
                                                           const std::string& b,
                                                           const std::string& c, int k) {
  const Tensor va = table.row(vocab.index_of(a));
  const Tensor vb = table.row(vocab.index_of(b));
  const Tensor vc = table.row(vocab.index_of(c));
  Tensor q({table.dim()});
  for (size_t i = 0; i < q.data.size(); ++i)
    q.data[i] = (vb.data[i] - va.data[i]) + vc.data[i];
  return nearest(table, vocab, q, k, {a, b, c});
}

}  // namespace genlab
