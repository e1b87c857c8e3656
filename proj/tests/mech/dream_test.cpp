#include <catch2/catch_amalgamated.hpp>

#include "genlab/classifier.hpp"
#include "genlab/dream.hpp"
#include "genlab/model.hpp"
#include "genlab/rng.hpp"
#include "genlab/synthdata.hpp"

using namespace genlab;

namespace {

Model small_conv_net(uint64_t seed) {
  return build_model({LayerSpec::conv2d(1, 3, 3, 1, 1), LayerSpec::relu(),
                      LayerSpec::maxpool2(), LayerSpec::dense(3 * 4 * 4, 5)},
                     {1, 8, 8}, seed);
}

Tensor gray(double v, int s) {
  Tensor t({1, s, s});
  t.fill(float(v));
  return t;
}

}  // namespace

TEST_CASE("zero steps returns the start image and a single trace entry") {
  const auto model = small_conv_net(1);
  const Tensor start = gray(0.5, 8);
  DreamTarget target{3, DreamSelector::kUnit, 2};
  DreamConfig cfg;
  cfg.steps = 0;
  const auto res = maximize_activation(model, start, target, cfg);
  REQUIRE(res.image.data == start.data);
  REQUIRE(res.trace.size() == 1);
  REQUIRE(res.trace[0] == dream_objective(model, start, target, 0.0));
}

TEST_CASE("linear unit follows the analytic ascent schedule") {
  // Single dense unit a = w.x (bias zero): each accepted step adds
  // step_size * |w|^2 to the objective.
  auto model = build_model({LayerSpec::dense(4, 1)}, {4}, 9);
  Tensor* w = model.find_param("layer0.W");
  const std::vector<float> wv{0.05f, -0.04f, 0.03f, 0.02f};
  w->data = wv;
  model.find_param("layer0.b")->fill(0.0f);
  Tensor start({4});
  start.fill(0.5f);
  DreamConfig cfg;
  cfg.steps = 3;
  cfg.step_size = 0.1;
  const auto res = maximize_activation(model, start, {0, DreamSelector::kUnit, 0}, cfg);
  double wx = 0.0, ww = 0.0;
  for (size_t i = 0; i < wv.size(); ++i) {
    wx += 0.5 * double(wv[i]);
    ww += double(wv[i]) * double(wv[i]);
  }
  REQUIRE(res.trace.size() == 4);
  REQUIRE(res.halvings == 0);
  for (int n = 0; n <= 3; ++n)
    REQUIRE_THAT(res.trace[size_t(n)],
                 Catch::Matchers::WithinAbs(wx + n * cfg.step_size * ww, 1e-6));
}

TEST_CASE("whole-layer climb is monotone, clamped, and deterministic") {
  const auto model = small_conv_net(4);
  Rng rng(17);
  Tensor start({1, 8, 8});
  for (auto& v : start.data) v = rng.next_float();
  DreamTarget target{1, DreamSelector::kWholeLayer, 0};
  DreamConfig cfg;
  cfg.steps = 25;
  cfg.step_size = 0.5;
  cfg.l2_decay = 1e-4;
  const auto res = maximize_activation(model, start, target, cfg);
  REQUIRE(res.trace.size() == 26);
  for (size_t i = 1; i < res.trace.size(); ++i) REQUIRE(res.trace[i] >= res.trace[i - 1]);
  for (float v : res.image.data) {
    REQUIRE(v >= 0.0f);
    REQUIRE(v <= 1.0f);
  }
  const auto again = maximize_activation(model, start, target, cfg);
  REQUIRE(again.trace == res.trace);
  REQUIRE(again.image.data == res.image.data);
}

TEST_CASE("channel selector and jitter produce valid runs") {
  const auto model = small_conv_net(6);
  const Tensor start = gray(0.3, 8);
  DreamTarget target{0, DreamSelector::kChannel, 1};
  DreamConfig cfg;
  cfg.steps = 10;
  cfg.step_size = 0.2;
  cfg.jitter = 2;
  cfg.seed = 5;
  const auto res = maximize_activation(model, start, target, cfg);
  REQUIRE(res.trace.size() == 11);
  for (float v : res.image.data) {
    REQUIRE(v >= 0.0f);
    REQUIRE(v <= 1.0f);
  }
  // The jittered run is still deterministic for a fixed seed.
  const auto again = maximize_activation(model, start, target, cfg);
  REQUIRE(again.trace == res.trace);
}

TEST_CASE("invalid dream arguments are rejected") {
  const auto model = small_conv_net(2);
  const Tensor start = gray(0.5, 8);
  DreamConfig cfg;
  const auto run = [&](DreamTarget t, DreamConfig c) {
    return maximize_activation(model, start, t, c);
  };
  REQUIRE_THROWS_AS(run({4, DreamSelector::kWholeLayer, 0}, cfg), std::invalid_argument);
  REQUIRE_THROWS_AS(run({-1, DreamSelector::kWholeLayer, 0}, cfg), std::invalid_argument);
  REQUIRE_THROWS_AS(run({3, DreamSelector::kUnit, 5}, cfg), std::invalid_argument);
  REQUIRE_THROWS_AS(run({3, DreamSelector::kChannel, 0}, cfg), std::invalid_argument);
  REQUIRE_THROWS_AS(run({0, DreamSelector::kChannel, 3}, cfg), std::invalid_argument);
  DreamConfig bad = cfg;
  bad.steps = -1;
  REQUIRE_THROWS_AS(run({0, DreamSelector::kWholeLayer, 0}, bad), std::invalid_argument);
  bad = cfg;
  bad.step_size = 0.0;
  REQUIRE_THROWS_AS(run({0, DreamSelector::kWholeLayer, 0}, bad), std::invalid_argument);
  bad = cfg;
  bad.jitter = -2;
  REQUIRE_THROWS_AS(run({0, DreamSelector::kWholeLayer, 0}, bad), std::invalid_argument);
  Tensor wrong({1, 4, 4});
  REQUIRE_THROWS_AS(maximize_activation(model, wrong, {0, DreamSelector::kWholeLayer, 0}, cfg),
                    std::invalid_argument);
}

TEST_CASE("dreaming on a trained classifier amplifies the cross class") {
  // Pinned regression fixture: a small trained classifier, maximizing the
  // softmax probability of "cross" from flat gray. Measured once at this
  // seed: 0.0209 -> 1.0, ratio ~48; asserted with margin.
  const std::vector<std::string> classes{"circle", "square", "cross"};
  const uint64_t seed = 3;
  const auto all = gen_glyphs(classes, 50, 16, seed);
  const auto [train, test] = split_image_set(all, 40);
  auto model = make_glyph_classifier(16, 3, 4, 8, seed);
  train_classifier(model, train, test, 10, 5e-3, 4, seed);
  const auto prob_model = with_softmax(model);
  Tensor gray({1, 16, 16});
  gray.fill(0.5f);
  DreamConfig cfg;
  cfg.steps = 200;
  cfg.step_size = 20.0;
  cfg.l2_decay = 0.0;
  cfg.seed = seed;
  const auto res = maximize_activation(prob_model, gray, {7, DreamSelector::kUnit, 2}, cfg);
  REQUIRE(res.trace.front() > 0.0);
  REQUIRE(res.trace.back() / res.trace.front() >= 5.0);
  REQUIRE(res.trace.back() > 0.9);
  for (size_t i = 1; i < res.trace.size(); ++i) REQUIRE(res.trace[i] >= res.trace[i - 1]);
}

TEST_CASE("laplacian energy has a hand-checkable value") {
  Tensor d({1, 3, 3});
  d(0, 1, 1) = 1.0f;  // single spike; only interior pixel
  REQUIRE(high_frequency_energy(d) == 4.0);
  Tensor flat({1, 5, 5});
  flat.fill(0.7f);
  REQUIRE(high_frequency_energy(flat) == 0.0);
  Tensor tiny({1, 2, 2});
  REQUIRE(high_frequency_energy(tiny) == 0.0);
}

TEST_CASE("dream_compare degenerate cases") {
  const auto model = small_conv_net(8);
  const Tensor start = gray(0.4, 8);
  DreamConfig cfg;
  cfg.steps = 0;
  auto out = dream_compare(model, start, 0, 3, cfg);
  REQUIRE(out.peripheral.image.data == start.data);
  REQUIRE(out.deep.image.data == start.data);
  REQUIRE(out.energy_peripheral == 0.0);
  REQUIRE(out.energy_deep == 0.0);

  cfg.steps = 5;
  cfg.step_size = 0.3;
  out = dream_compare(model, start, 1, 1, cfg);
  REQUIRE(out.energy_peripheral == out.energy_deep);
  REQUIRE(out.peripheral.image.data == out.deep.image.data);

  REQUIRE_THROWS_AS(dream_compare(model, start, 3, 1, cfg), std::invalid_argument);
}
