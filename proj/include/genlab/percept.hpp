#pragma once
// Drawing genomes and black-box evolution against trained classifiers.
//
// A genome is a fixed-length parameter vector describing quadratic strokes
// and discs, every scalar confined to a stated box. Rasterization is a pure
// function of (genome, size), so an emitted image is always exactly
// reproducible from its genome: the generator never owns free-form pixels.
// Evolution is a (1+lambda) elitist strategy; the incumbent is replaced only
// on strict fitness improvement, which makes the fitness trace non-decreasing
// by construction rather than by luck.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"
#include "raster.hpp"
#include "rng.hpp"
#include "synthdata.hpp"
#include "tensor.hpp"

namespace genlab {

// Parameter boxes. Mutation clamps into these; rasterize rejects violations.
inline constexpr double kThicknessLo = 0.01;
inline constexpr double kThicknessHi = 0.1;
inline constexpr double kBlobRadiusLo = 0.02;
inline constexpr double kBlobRadiusHi = 0.3;

inline constexpr int kDefaultNumStrokes = 6;
inline constexpr int kDefaultNumBlobs = 3;

// Quadratic curve: 3 control points, thickness, intensity. 8 scalars.
struct Stroke {
  double x0 = 0, y0 = 0;
  double x1 = 0, y1 = 0;
  double x2 = 0, y2 = 0;
  double thickness = kThicknessLo;
  double intensity = 0;
};

// Filled disc. 4 scalars.
struct Blob {
  double cx = 0, cy = 0;
  double radius = kBlobRadiusLo;
  double intensity = 0;
};

struct DrawingGenome {
  std::vector<Stroke> strokes;
  std::vector<Blob> blobs;

  size_t param_count() const { return strokes.size() * 8 + blobs.size() * 4; }
};

struct EvolutionConfig {
  int iterations = 200;
  int lambda = 16;            // children per generation
  double mutation_sigma = 0.03;
  double mutation_rate = 0.25;  // per-parameter flip probability
  uint64_t seed = 0;
};

struct EvolveResult {
  DrawingGenome genome;
  std::vector<double> trace;  // fitness of the incumbent, length iterations+1
};

struct TransferReport {
  std::vector<int> top_class;  // per-classifier argmax, ties to lowest index
  double agreement = 0;        // fraction of classifier pairs that agree
};

struct DominanceReport {
  double genome_score = 0;
  double real_mean_score = 0;
  bool dominates = false;
};

namespace detail {

// One mutable scalar of a genome together with its box.
struct ParamRef {
  double* value;
  double lo;
  double hi;
};

inline std::vector<ParamRef> genome_params(DrawingGenome& g) {
  std::vector<ParamRef> refs;
  refs.reserve(g.param_count());
  for (auto& s : g.strokes) {
    for (double* p : {&s.x0, &s.y0, &s.x1, &s.y1, &s.x2, &s.y2}) refs.push_back({p, 0.0, 1.0});
    refs.push_back({&s.thickness, kThicknessLo, kThicknessHi});
    refs.push_back({&s.intensity, 0.0, 1.0});
  }
  for (auto& b : g.blobs) {
    refs.push_back({&b.cx, 0.0, 1.0});
    refs.push_back({&b.cy, 0.0, 1.0});
    refs.push_back({&b.radius, kBlobRadiusLo, kBlobRadiusHi});
    refs.push_back({&b.intensity, 0.0, 1.0});
  }
  return refs;
}

// Gaussian perturbation per parameter, gated by rate, clamped to the box.
inline void mutate_genome(DrawingGenome& g, Rng& rng, double sigma, double rate) {
  for (ParamRef r : genome_params(g)) {
    if (rng.next_double() >= rate) continue;
    double v = *r.value + sigma * double(rng.gaussian());
    *r.value = std::min(r.hi, std::max(r.lo, v));
  }
}

// The classifier side of the contract: single-channel square input.
inline int classifier_input_size(const Model& m) {
  if (m.input_dims.size() != 3 || m.input_dims[0] != 1 || m.input_dims[1] != m.input_dims[2] ||
      m.input_dims[1] < 1)
    throw std::invalid_argument("classifier must take a [1,S,S] image, got " +
                                dims_to_string(m.input_dims));
  return m.input_dims[1];
}

inline int class_count(const Model& m) {
  const auto dims = m.shapes().back();
  int n = 1;
  for (int d : dims) n *= d;
  return n;
}

// Softmax over the classifier's final output. The classifier emits logits;
// the probabilities are formed here, in double, with the usual max shift.
inline std::vector<double> class_probs(const Model& m, const Tensor& img) {
  const Tensor out = m.forward(img, false).final_output();
  std::vector<double> p(out.data.begin(), out.data.end());
  double hi = p[0];
  for (double v : p) hi = std::max(hi, v);
  double sum = 0;
  for (double& v : p) {
    v = std::exp(v - hi);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

inline int argmax_lowest(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < int(v.size()); ++i)
    if (v[size_t(i)] > v[size_t(best)]) best = i;
  return best;
}

}  // namespace detail

inline bool genome_in_bounds(const DrawingGenome& g) {
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  for (const auto& s : g.strokes) {
    if (!in(s.x0, 0, 1) || !in(s.y0, 0, 1) || !in(s.x1, 0, 1) || !in(s.y1, 0, 1) ||
        !in(s.x2, 0, 1) || !in(s.y2, 0, 1))
      return false;
    if (!in(s.thickness, kThicknessLo, kThicknessHi) || !in(s.intensity, 0, 1)) return false;
  }
  for (const auto& b : g.blobs) {
    if (!in(b.cx, 0, 1) || !in(b.cy, 0, 1)) return false;
    if (!in(b.radius, kBlobRadiusLo, kBlobRadiusHi) || !in(b.intensity, 0, 1)) return false;
  }
  return true;
}

// Uniform genome inside the boxes. Field order is the draw order.
inline DrawingGenome random_genome(int num_strokes, int num_blobs, uint64_t seed) {
  if (num_strokes < 0 || num_blobs < 0)
    throw std::invalid_argument("random_genome: primitive counts must be non-negative");
  Rng rng(derive_seed(seed, "genome"));
  auto uni = [&rng](double lo, double hi) { return lo + (hi - lo) * rng.next_double(); };
  DrawingGenome g;
  g.strokes.resize(size_t(num_strokes));
  g.blobs.resize(size_t(num_blobs));
  for (auto& s : g.strokes) {
    s.x0 = uni(0, 1);
    s.y0 = uni(0, 1);
    s.x1 = uni(0, 1);
    s.y1 = uni(0, 1);
    s.x2 = uni(0, 1);
    s.y2 = uni(0, 1);
    s.thickness = uni(kThicknessLo, kThicknessHi);
    s.intensity = uni(0, 1);
  }
  for (auto& b : g.blobs) {
    b.cx = uni(0, 1);
    b.cy = uni(0, 1);
    b.radius = uni(kBlobRadiusLo, kBlobRadiusHi);
    b.intensity = uni(0, 1);
  }
  return g;
}

// White shapes on black, anti-aliased, overlaps resolved by per-pixel max.
inline Tensor rasterize(const DrawingGenome& g, int size) {
  if (size < 1) throw std::invalid_argument("rasterize: size must be positive");
  if (!genome_in_bounds(g)) throw std::invalid_argument("rasterize: genome parameter out of box");
  Canvas canvas(size);
  for (const auto& s : g.strokes)
    canvas.quad_bezier(s.x0, s.y0, s.x1, s.y1, s.x2, s.y2, s.thickness, s.intensity);
  for (const auto& b : g.blobs) canvas.disc(b.cx, b.cy, b.radius, b.intensity);
  return canvas.img;
}

// Softmax probability the classifier assigns target_class to the rendered
// genome. The raster size comes from the classifier's own input shape.
inline double score(const DrawingGenome& g, const Model& classifier, int target_class) {
  const int k = detail::class_count(classifier);
  if (target_class < 0 || target_class >= k)
    throw std::invalid_argument("score: target class " + std::to_string(target_class) +
                                " out of range for " + std::to_string(k) + " classes");
  const auto probs =
      detail::class_probs(classifier, rasterize(g, detail::classifier_input_size(classifier)));
  return probs[size_t(target_class)];
}

// (1+lambda) elitist evolution. Fitness is the mean log-probability of the
// target class across all classifiers; the incumbent changes only on strict
// improvement. Each child draws from its own derived stream, so the result
// is deterministic per seed regardless of evaluation order.
inline EvolveResult evolve(const DrawingGenome& genome0, const std::vector<Model>& classifiers,
                           int target_class, const EvolutionConfig& cfg) {
  if (classifiers.empty()) throw std::invalid_argument("evolve: needs at least one classifier");
  if (cfg.iterations < 0) throw std::invalid_argument("evolve: iterations must be non-negative");
  if (cfg.lambda < 1) throw std::invalid_argument("evolve: lambda must be at least 1");
  if (!(cfg.mutation_sigma > 0)) throw std::invalid_argument("evolve: sigma must be positive");
  if (cfg.mutation_rate < 0 || cfg.mutation_rate > 1)
    throw std::invalid_argument("evolve: mutation rate must lie in [0,1]");
  if (!genome_in_bounds(genome0))
    throw std::invalid_argument("evolve: genome parameter out of box");
  const int k = detail::class_count(classifiers[0]);
  for (const Model& m : classifiers)
    if (detail::class_count(m) != k)
      throw std::invalid_argument("evolve: classifiers disagree on the class count");
  if (target_class < 0 || target_class >= k)
    throw std::invalid_argument("evolve: target class out of range");

  auto fitness = [&](const DrawingGenome& g) {
    double sum = 0;
    for (const Model& m : classifiers) {
      const auto probs =
          detail::class_probs(m, rasterize(g, detail::classifier_input_size(m)));
      sum += std::log(probs[size_t(target_class)]);
    }
    return sum / double(classifiers.size());
  };

  EvolveResult res;
  res.genome = genome0;
  double best = fitness(res.genome);
  res.trace.reserve(size_t(cfg.iterations) + 1);
  res.trace.push_back(best);
  for (int iter = 0; iter < cfg.iterations; ++iter) {
    DrawingGenome best_child;
    double best_child_fit = 0;
    bool have_child = false;
    for (int child = 0; child < cfg.lambda; ++child) {
      DrawingGenome cand = res.genome;
      Rng rng(derive_seed(cfg.seed, "evolve/" + std::to_string(iter) + "/" +
                                        std::to_string(child)));
      detail::mutate_genome(cand, rng, cfg.mutation_sigma, cfg.mutation_rate);
      const double f = fitness(cand);
      if (!have_child || f > best_child_fit) {
        best_child = std::move(cand);
        best_child_fit = f;
        have_child = true;
      }
    }
    if (best_child_fit > best) {
      res.genome = std::move(best_child);
      best = best_child_fit;
    }
    res.trace.push_back(best);
  }
  return res;
}

// Each classifier's argmax class for the rendered genome, plus the fraction
// of classifier pairs that agree.
inline TransferReport transfer_report(const DrawingGenome& g,
                                      const std::vector<Model>& classifiers) {
  if (classifiers.size() < 2)
    throw std::invalid_argument("transfer_report: needs at least two classifiers");
  const int k = detail::class_count(classifiers[0]);
  for (const Model& m : classifiers)
    if (detail::class_count(m) != k)
      throw std::invalid_argument("transfer_report: classifiers disagree on the class count");
  TransferReport rep;
  rep.top_class.reserve(classifiers.size());
  for (const Model& m : classifiers) {
    const auto probs = detail::class_probs(m, rasterize(g, detail::classifier_input_size(m)));
    rep.top_class.push_back(detail::argmax_lowest(probs));
  }
  const size_t n = rep.top_class.size();
  size_t agree = 0, pairs = 0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      ++pairs;
      if (rep.top_class[i] == rep.top_class[j]) ++agree;
    }
  rep.agreement = double(agree) / double(pairs);
  return rep;
}

// Does the drawing outscore the real thing? Compares the genome's target
// probability with the mean probability the classifier assigns that class
// over the real examples carrying its label.
inline DominanceReport dominance_check(const DrawingGenome& g, const Model& classifier,
                                       int target_class, const LabeledImageSet& real_examples) {
  const int k = detail::class_count(classifier);
  if (target_class < 0 || target_class >= k)
    throw std::invalid_argument("dominance_check: target class out of range");
  double sum = 0;
  int count = 0;
  for (size_t i = 0; i < real_examples.images.size(); ++i) {
    if (real_examples.labels[i] != target_class) continue;
    sum += detail::class_probs(classifier, real_examples.images[i])[size_t(target_class)];
    ++count;
  }
  if (count == 0)
    throw std::invalid_argument("dominance_check: no real examples of the target class");
  DominanceReport rep;
  rep.genome_score = score(g, classifier, target_class);
  rep.real_mean_score = sum / double(count);
  rep.dominates = rep.genome_score > rep.real_mean_score;
  return rep;
}

}  // namespace genlab
