#include <genlab/percept.hpp>

#include <algorithm>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <genlab/classifier.hpp>
#include <genlab/synthdata.hpp>

using namespace genlab;

namespace {

// Classifier whose first logit is the image's mean pixel intensity and whose
// second logit is constant zero. Its target-0 probability is an analytic,
// strictly increasing function of mean brightness, which gives evolution an
// oracle: the optimizer must brighten the raster or it is broken.
Model mean_intensity_classifier(int size) {
  Model m = build_model({LayerSpec::dense(size * size, 2)}, {1, size, size}, 0);
  Tensor& w = *m.find_param("layer0.W");
  Tensor& b = *m.find_param("layer0.b");
  std::fill(w.data.begin(), w.data.end(), 0.0f);
  std::fill(b.data.begin(), b.data.end(), 0.0f);
  for (int i = 0; i < size * size; ++i) w.data[size_t(i)] = 1.0f / float(size * size);
  return m;
}

double raster_mean(const Tensor& img) {
  double sum = 0;
  for (float v : img.data) sum += v;
  return sum / double(img.data.size());
}

DrawingGenome one_blob(double cx, double cy, double r, double intensity) {
  DrawingGenome g;
  g.blobs.push_back({cx, cy, r, intensity});
  return g;
}

bool same_genome(const DrawingGenome& a, const DrawingGenome& b) {
  if (a.strokes.size() != b.strokes.size() || a.blobs.size() != b.blobs.size()) return false;
  for (size_t i = 0; i < a.strokes.size(); ++i) {
    const Stroke &s = a.strokes[i], &t = b.strokes[i];
    if (s.x0 != t.x0 || s.y0 != t.y0 || s.x1 != t.x1 || s.y1 != t.y1 || s.x2 != t.x2 ||
        s.y2 != t.y2 || s.thickness != t.thickness || s.intensity != t.intensity)
      return false;
  }
  for (size_t i = 0; i < a.blobs.size(); ++i) {
    const Blob &s = a.blobs[i], &t = b.blobs[i];
    if (s.cx != t.cx || s.cy != t.cy || s.radius != t.radius || s.intensity != t.intensity)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("random genomes are deterministic and inside every box") {
  const DrawingGenome g = random_genome(6, 3, 11);
  REQUIRE(g.strokes.size() == 6);
  REQUIRE(g.blobs.size() == 3);
  REQUIRE(g.param_count() == 8 * 6 + 4 * 3);
  REQUIRE(genome_in_bounds(g));
  REQUIRE(same_genome(g, random_genome(6, 3, 11)));
  REQUIRE_FALSE(same_genome(g, random_genome(6, 3, 12)));
  for (uint64_t seed = 0; seed < 40; ++seed) REQUIRE(genome_in_bounds(random_genome(4, 2, seed)));
  REQUIRE(random_genome(0, 0, 1).param_count() == 0);
  REQUIRE_THROWS_AS(random_genome(-1, 0, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(random_genome(0, -2, 1), std::invalid_argument);
}

TEST_CASE("rasterization is pure and anti-aliased shapes land where aimed") {
  SECTION("all intensities zero give a black image") {
    DrawingGenome g = random_genome(3, 2, 5);
    for (auto& s : g.strokes) s.intensity = 0;
    for (auto& b : g.blobs) b.intensity = 0;
    const Tensor img = rasterize(g, 24);
    REQUIRE(img.dims == std::vector<int>{1, 24, 24});
    for (float v : img.data) REQUIRE(v == 0.0f);
  }
  SECTION("a centered blob covers the center and misses the corner") {
    const Tensor img = rasterize(one_blob(0.5, 0.5, 0.3, 1.0), 64);
    REQUIRE(img(0, 32, 32) == 1.0f);
    REQUIRE(img(0, 0, 0) == 0.0f);
    for (float v : img.data) {
      REQUIRE(v >= 0.0f);
      REQUIRE(v <= 1.0f);
    }
  }
  SECTION("the same genome rasterizes bit-identically every time") {
    const DrawingGenome g = random_genome(5, 3, 9);
    const Tensor a = rasterize(g, 32);
    const Tensor b = rasterize(g, 32);
    REQUIRE(a.data == b.data);
  }
  SECTION("out-of-box genomes and bad sizes are rejected") {
    DrawingGenome g = one_blob(0.5, 0.5, 0.5, 1.0);  // radius above its box
    REQUIRE_THROWS_AS(rasterize(g, 16), std::invalid_argument);
    g.blobs[0].radius = 0.2;
    REQUIRE_NOTHROW(rasterize(g, 16));
    g.blobs[0].cx = 1.5;
    REQUIRE_THROWS_AS(rasterize(g, 16), std::invalid_argument);
    REQUIRE_THROWS_AS(rasterize(one_blob(0.5, 0.5, 0.1, 1.0), 0), std::invalid_argument);
  }
}

TEST_CASE("score is a softmax probability with an analytic brightness oracle") {
  SECTION("a one-class classifier always answers 1.0") {
    const Model k1 = build_model({LayerSpec::dense(16 * 16, 1)}, {1, 16, 16}, 3);
    REQUIRE(score(random_genome(2, 1, 7), k1, 0) == 1.0);
  }
  SECTION("scores lie in (0,1) and sum to one over classes") {
    const Model m = make_glyph_classifier(16, 5, 3, 6, 21);
    const DrawingGenome g = random_genome(3, 2, 4);
    double sum = 0;
    for (int c = 0; c < 5; ++c) {
      const double p = score(g, m, c);
      REQUIRE(p > 0.0);
      REQUIRE(p < 1.0);
      sum += p;
    }
    REQUIRE(sum == Catch::Approx(1.0).epsilon(1e-9));
  }
  SECTION("brighter genomes win under the mean-intensity classifier") {
    const Model m = mean_intensity_classifier(32);
    const DrawingGenome bright = one_blob(0.5, 0.5, 0.25, 1.0);
    const DrawingGenome dim = one_blob(0.5, 0.5, 0.25, 0.3);
    const double p_bright = score(bright, m, 0);
    const double p_dim = score(dim, m, 0);
    REQUIRE(p_bright > p_dim);
    // the probability is exactly sigmoid(mean intensity) for this model
    const double mean = raster_mean(rasterize(bright, 32));
    REQUIRE(p_bright == Catch::Approx(1.0 / (1.0 + std::exp(-mean))).margin(1e-6));
  }
  SECTION("an out-of-range class is rejected") {
    const Model m = make_glyph_classifier(16, 4, 3, 6, 2);
    REQUIRE_THROWS_AS(score(random_genome(1, 1, 0), m, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(score(random_genome(1, 1, 0), m, -1), std::invalid_argument);
  }
}

TEST_CASE("mutation chains never leave the parameter boxes") {
  DrawingGenome g = random_genome(3, 2, 17);
  Rng rng(99);
  for (int step = 0; step < 300; ++step) {
    detail::mutate_genome(g, rng, 0.5, 1.0);  // violent noise, every parameter
    REQUIRE(genome_in_bounds(g));
  }
}

TEST_CASE("evolution is elitist, deterministic, and improves an analytic fitness") {
  const Model oracle = mean_intensity_classifier(16);
  EvolutionConfig cfg;
  cfg.seed = 13;

  SECTION("zero iterations return the start genome and a single-entry trace") {
    cfg.iterations = 0;
    const DrawingGenome g0 = random_genome(2, 1, 8);
    const EvolveResult res = evolve(g0, {oracle}, 0, cfg);
    REQUIRE(res.trace.size() == 1);
    REQUIRE(same_genome(res.genome, g0));
  }
  SECTION("the fitness trace never decreases") {
    cfg.iterations = 40;
    const EvolveResult res = evolve(random_genome(2, 1, 8), {oracle}, 0, cfg);
    REQUIRE(res.trace.size() == 41);
    for (size_t i = 1; i < res.trace.size(); ++i) REQUIRE(res.trace[i] >= res.trace[i - 1]);
  }
  SECTION("two hundred iterations brighten the raster under the brightness oracle") {
    cfg.iterations = 200;
    const DrawingGenome g0 = random_genome(2, 1, 8);
    const EvolveResult res = evolve(g0, {oracle}, 0, cfg);
    REQUIRE(raster_mean(rasterize(res.genome, 16)) > raster_mean(rasterize(g0, 16)));
    REQUIRE(res.trace.back() > res.trace.front());
    // the winner is still a genome: re-rasterizing reproduces its image bit-exactly
    REQUIRE(rasterize(res.genome, 16).data == rasterize(res.genome, 16).data);
    REQUIRE(genome_in_bounds(res.genome));
  }
  SECTION("the same seed reproduces the run and a different seed departs") {
    cfg.iterations = 15;
    const DrawingGenome g0 = random_genome(2, 1, 8);
    const EvolveResult a = evolve(g0, {oracle}, 0, cfg);
    const EvolveResult b = evolve(g0, {oracle}, 0, cfg);
    REQUIRE(a.trace == b.trace);
    REQUIRE(same_genome(a.genome, b.genome));
    cfg.seed = 14;
    const EvolveResult c = evolve(g0, {oracle}, 0, cfg);
    REQUIRE(a.trace != c.trace);
  }
  SECTION("malformed configurations and classifier sets are rejected") {
    const DrawingGenome g0 = random_genome(1, 1, 2);
    EvolutionConfig bad;
    bad.iterations = -1;
    REQUIRE_THROWS_AS(evolve(g0, {oracle}, 0, bad), std::invalid_argument);
    bad = {};
    bad.lambda = 0;
    REQUIRE_THROWS_AS(evolve(g0, {oracle}, 0, bad), std::invalid_argument);
    bad = {};
    bad.mutation_sigma = 0;
    REQUIRE_THROWS_AS(evolve(g0, {oracle}, 0, bad), std::invalid_argument);
    bad = {};
    bad.mutation_rate = 1.5;
    REQUIRE_THROWS_AS(evolve(g0, {oracle}, 0, bad), std::invalid_argument);
    REQUIRE_THROWS_AS(evolve(g0, {}, 0, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(evolve(g0, {oracle}, 2, {}), std::invalid_argument);
    const Model three = build_model({LayerSpec::dense(16 * 16, 3)}, {1, 16, 16}, 1);
    REQUIRE_THROWS_AS(evolve(g0, {oracle, three}, 0, {}), std::invalid_argument);
  }
}

TEST_CASE("transfer reports count agreeing classifier pairs") {
  const Model a = make_glyph_classifier(16, 4, 3, 6, 31);
  const DrawingGenome g = random_genome(4, 2, 6);

  SECTION("a classifier agrees with its own copy") {
    const TransferReport rep = transfer_report(g, {a, a});
    REQUIRE(rep.top_class.size() == 2);
    REQUIRE(rep.top_class[0] == rep.top_class[1]);
    REQUIRE(rep.agreement == 1.0);
    const TransferReport rep4 = transfer_report(g, {a, a, a, a});
    REQUIRE(rep4.agreement == 1.0);
  }
  SECTION("agreement counts pairs, not classifiers") {
    // force a disagreeing third vote with a hand-rigged one-hot logit model
    Model rig = build_model({LayerSpec::dense(16 * 16, 4)}, {1, 16, 16}, 0);
    std::fill(rig.find_param("layer0.W")->data.begin(), rig.find_param("layer0.W")->data.end(),
              0.0f);
    std::fill(rig.find_param("layer0.b")->data.begin(), rig.find_param("layer0.b")->data.end(),
              0.0f);
    const int other = transfer_report(g, {a, a}).top_class[0] == 3 ? 2 : 3;
    rig.find_param("layer0.b")->data[size_t(other)] = 5.0f;
    const TransferReport rep = transfer_report(g, {a, a, rig});
    REQUIRE(rep.top_class[2] == other);
    REQUIRE(rep.agreement == Catch::Approx(1.0 / 3.0));
  }
  SECTION("fewer than two classifiers or mismatched class counts are rejected") {
    REQUIRE_THROWS_AS(transfer_report(g, {a}), std::invalid_argument);
    const Model three = build_model({LayerSpec::dense(16 * 16, 3)}, {1, 16, 16}, 1);
    REQUIRE_THROWS_AS(transfer_report(g, {a, three}), std::invalid_argument);
  }
}

TEST_CASE("dominance compares the drawing with real examples of its class") {
  const auto classes = glyph_class_names();
  const LabeledImageSet real = gen_glyphs(classes, 4, 32, 77);

  SECTION("an untrained classifier scores everything near uniform") {
    const Model untrained = make_glyph_classifier(32, int(classes.size()), 4, 8, 55);
    const DrawingGenome g = random_genome(6, 3, 1);
    const DominanceReport rep = dominance_check(g, untrained, 4, real);
    const double uniform = 1.0 / double(classes.size());
    REQUIRE(rep.genome_score == Catch::Approx(uniform).margin(0.1));
    REQUIRE(rep.real_mean_score == Catch::Approx(uniform).margin(0.1));
    REQUIRE(rep.dominates == (rep.genome_score > rep.real_mean_score));
  }
  SECTION("a class with no real examples is rejected") {
    LabeledImageSet only_bars = real;
    only_bars.images.clear();
    only_bars.labels.clear();
    for (size_t i = 0; i < real.images.size(); ++i)
      if (real.labels[i] == 5) {
        only_bars.images.push_back(real.images[i]);
        only_bars.labels.push_back(real.labels[i]);
      }
    const Model untrained = make_glyph_classifier(32, int(classes.size()), 4, 8, 55);
    REQUIRE_THROWS_AS(dominance_check(random_genome(1, 1, 0), untrained, 4, only_bars),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(dominance_check(random_genome(1, 1, 0), untrained, 99, real),
                      std::invalid_argument);
  }
  SECTION("the brightness oracle makes dominance analytic") {
    // real examples: dim blobs; challenger: the brightest legal blob
    const Model oracle = mean_intensity_classifier(32);
    LabeledImageSet dim_set;
    dim_set.class_names = {"bright", "rest"};
    for (int i = 0; i < 3; ++i) {
      dim_set.images.push_back(rasterize(one_blob(0.5, 0.5, 0.1, 0.2), 32));
      dim_set.labels.push_back(0);
    }
    DrawingGenome g;
    for (int i = 0; i < 4; ++i) g.blobs.push_back({0.3 + 0.1 * i, 0.5, 0.3, 1.0});
    const DominanceReport rep = dominance_check(g, oracle, 0, dim_set);
    REQUIRE(rep.genome_score > rep.real_mean_score);
    REQUIRE(rep.dominates);
  }
}
