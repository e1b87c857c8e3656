#pragma once
// Procedural datasets: glyph images, polarity-labeled product reviews,
// and a relational corpus with paired words in parallel contexts. Every
// generator is a pure function of its arguments; per-sample RNG streams
// are keyed by (seed, class/index) so one sample's draw never perturbs
// another's.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "raster.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace genlab {

// ------------------------------------------------------------- glyphs

struct LabeledImageSet {
  std::vector<Tensor> images;  // each [1,S,S], values in [0,1]
  std::vector<int> labels;     // index into class_names
  std::vector<std::string> class_names;
  uint64_t seed = 0;
};

inline const std::vector<std::string>& glyph_class_names() {
  static const std::vector<std::string> kNames = {"circle", "ring",     "square", "triangle",
                                                  "cross",  "bar",      "dot-grid", "chevron"};
  return kNames;
}

namespace detail {

inline bool glyph_rotates(const std::string& cls) {
  return cls == "triangle" || cls == "cross" || cls == "bar" || cls == "chevron";
}

inline void draw_glyph(Canvas& canvas, const std::string& cls, double cx, double cy, double f,
                       double rot, double wmul) {
  if (cls == "circle") {
    canvas.disc(cx, cy, 0.22 * f, 1.0);
  } else if (cls == "ring") {
    canvas.annulus(cx, cy, 0.24 * f, 0.045 * wmul * f, 1.0);
  } else if (cls == "square") {
    canvas.box(cx, cy, 0.20 * f, 0.20 * f, 0.0, 1.0);
  } else if (cls == "triangle") {
    canvas.triangle(cx, cy, 0.26 * f, rot, 1.0);
  } else if (cls == "cross") {
    const double hw = 0.055 * wmul * f;
    canvas.box(cx, cy, 0.26 * f, hw, rot, 1.0);
    canvas.box(cx, cy, hw, 0.26 * f, rot, 1.0);
  } else if (cls == "bar") {
    canvas.box(cx, cy, 0.30 * f, 0.05 * wmul * f, rot, 1.0);
  } else if (cls == "dot-grid") {
    const double gap = 0.15 * f, r = 0.042 * f;
    for (int gy = -1; gy <= 1; ++gy)
      for (int gx = -1; gx <= 1; ++gx) canvas.disc(cx + gx * gap, cy + gy * gap, r, 1.0);
  } else if (cls == "chevron") {
    const double c = std::cos(rot), s = std::sin(rot);
    auto place = [&](double lx, double ly, double& ox, double& oy) {
      ox = cx + (c * lx - s * ly) * f;
      oy = cy + (s * lx + c * ly) * f;
    };
    double ax, ay, bx, by, ex, ey;
    place(-0.24, 0.13, ax, ay);
    place(0.0, -0.15, bx, by);
    place(0.24, 0.13, ex, ey);
    const double th = 0.07 * wmul * f;
    canvas.capsule(ax, ay, bx, by, th, 1.0);
    canvas.capsule(bx, by, ex, ey, th, 1.0);
  } else {
    throw std::invalid_argument("unknown glyph class '" + cls + "'");
  }
}

}  // namespace detail

// One shape per image: jittered position (+-15%), scale (+-25%),
// rotation for the orientation-bearing classes, stroke width (+-30% on
// the stroked classes), then additive Gaussian pixel noise (sigma 0.03)
// clamped back to [0,1].
inline Tensor gen_glyph_image(const std::string& cls, int size, uint64_t stream_seed) {
  Rng rng(stream_seed);
  Canvas canvas(size);
  const double cx = 0.5 + rng.uniform(-0.15, 0.15);
  const double cy = 0.5 + rng.uniform(-0.15, 0.15);
  const double f = rng.uniform(0.75, 1.25);
  const double rot = detail::glyph_rotates(cls) ? rng.uniform(0.0, 2.0 * kPi) : 0.0;
  const double wmul = rng.uniform(0.7, 1.3);
  detail::draw_glyph(canvas, cls, cx, cy, f, rot, wmul);
  for (auto& v : canvas.img.data) {
    v += float(rng.gaussian() * 0.03);
    v = std::clamp(v, 0.0f, 1.0f);
  }
  return canvas.img;
}

inline LabeledImageSet gen_glyphs(const std::vector<std::string>& classes, int n_per_class,
                                  int size, uint64_t seed) {
  if (size < 16) throw std::invalid_argument("glyph size must be >= 16");
  if (n_per_class < 1) throw std::invalid_argument("need n_per_class >= 1");
  if (classes.empty()) throw std::invalid_argument("need at least one class");
  const auto& known = glyph_class_names();
  for (const auto& c : classes)
    if (std::find(known.begin(), known.end(), c) == known.end())
      throw std::invalid_argument("unknown glyph class '" + c + "'");
  LabeledImageSet set;
  set.class_names = classes;
  set.seed = seed;
  for (size_t ci = 0; ci < classes.size(); ++ci)
    for (int i = 0; i < n_per_class; ++i) {
      set.images.push_back(gen_glyph_image(
          classes[ci], size, derive_seed(seed, "glyph/" + classes[ci] + "/" + std::to_string(i))));
      set.labels.push_back(int(ci));
    }
  return set;
}

// ------------------------------------------------------------ reviews

struct ReviewDoc {
  std::string text;
  bool positive = false;
};

struct ReviewCorpus {
  std::vector<ReviewDoc> docs;
  std::vector<std::string> pos_words, neg_words;
  uint64_t seed = 0;
};

// The lexicons are fixed vocabulary, not seed-dependent, so any text can
// be polarity-scored without the corpus in hand.
inline const std::vector<std::string>& positive_lexicon() {
  static const std::vector<std::string> kWords = {"great",     "excellent", "wonderful",
                                                  "fantastic", "superb",    "delightful",
                                                  "amazing",   "splendid"};
  return kWords;
}
inline const std::vector<std::string>& negative_lexicon() {
  static const std::vector<std::string> kWords = {"terrible", "awful",         "horrible",
                                                  "dreadful", "shoddy",        "disappointing",
                                                  "useless",  "defective"};
  return kWords;
}

namespace detail {

inline std::vector<std::string> tokenize_words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch >= 'a' && ch <= 'z') {
      cur.push_back(ch);
    } else if (ch >= 'A' && ch <= 'Z') {
      cur.push_back(char(ch - 'A' + 'a'));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace detail

// positive-word count minus negative-word count, on exact word tokens
inline int lexicon_polarity(const std::string& text) {
  int score = 0;
  for (const auto& w : detail::tokenize_words(text)) {
    for (const auto& p : positive_lexicon())
      if (w == p) ++score;
    for (const auto& n : negative_lexicon())
      if (w == n) --score;
  }
  return score;
}

// Review shape: a lexicon-free polar opener, two neutral fillers, a closer
// holding the review's only lexicon word, and a per-class sign-off ending
// in a shared word. The long neutral gap is deliberate: the only way a
// next-char model can predict the closer's polarity family is to carry one
// bit of sentiment from the opener across the whole gap, which rewards a
// single persistent state feature. The sign-off is identical within a
// class, so final states vary within a class only through what the
// recurrent state carried, and the shared last word means the final
// characters alone identify no class: the label is recoverable from the
// final state only through that carried feature.
inline std::string gen_review_text(bool positive, uint64_t stream_seed) {
  static const std::vector<std::string> kNouns = {"lamp",    "kettle",  "router", "backpack",
                                                  "blender", "keyboard", "charger", "tripod",
                                                  "speaker", "toaster"};
  static const std::vector<std::string> kIntensifiers = {"really",   "truly",    "quite",
                                                         "absolutely", "honestly", "remarkably"};
  static const std::vector<std::string> kPosOpeners = {"i am so glad i bought this {N}",
                                                       "buying this {N} was a fine idea"};
  static const std::vector<std::string> kNegOpeners = {"i am so upset i bought this {N}",
                                                       "buying this {N} was a bad idea"};
  static const std::vector<std::string> kFillers = {
      "the box arrived later in plain packaging", "my cousin set it up on the kitchen table",
      "i filed the warranty card that evening", "the manual covers buttons in three pages"};
  // the single polarity-word slot {A} of the whole review
  static const std::vector<std::string> kClosers = {
      "overall it felt {I} {A}", "final word is {I} {A}", "my verdict is {I} {A}"};
  Rng rng(stream_seed);
  const auto& lex = positive ? positive_lexicon() : negative_lexicon();
  const auto& openers = positive ? kPosOpeners : kNegOpeners;
  std::string text = openers[size_t(rng.next_below(openers.size()))];
  auto fill = [&text](const std::string& key, const std::string& value) {
    const size_t at = text.find(key);
    text = text.substr(0, at) + value + text.substr(at + key.size());
  };
  fill("{N}", kNouns[size_t(rng.next_below(kNouns.size()))]);
  text += " " + kFillers[size_t(rng.next_below(kFillers.size()))];
  text += " " + kFillers[size_t(rng.next_below(kFillers.size()))];
  text += " " + kClosers[size_t(rng.next_below(kClosers.size()))];
  fill("{I}", kIntensifiers[size_t(rng.next_below(kIntensifiers.size()))]);
  fill("{A}", lex[size_t(rng.next_below(lex.size()))]);
  text += positive ? " i am happy overall" : " i am angry overall";
  return text;
}

// Balanced alternating labels (even index positive). Each doc holds at
// least one own-lexicon word and zero opposite-lexicon words, so the
// label is recoverable from lexicon counts alone.
inline ReviewCorpus gen_reviews(int n_docs, uint64_t seed) {
  if (n_docs < 2) throw std::invalid_argument("need n_docs >= 2");
  ReviewCorpus corpus;
  corpus.pos_words = positive_lexicon();
  corpus.neg_words = negative_lexicon();
  corpus.seed = seed;
  for (int i = 0; i < n_docs; ++i) {
    ReviewDoc doc;
    doc.positive = (i % 2 == 0);
    doc.text = gen_review_text(doc.positive, derive_seed(seed, "review/" + std::to_string(i)));
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

// one doc per line, "+\t" / "-\t" label prefix
inline std::string encode_reviews(const ReviewCorpus& corpus) {
  std::string out;
  for (const auto& d : corpus.docs) {
    out += d.positive ? "+\t" : "-\t";
    out += d.text;
    out += '\n';
  }
  return out;
}

inline ReviewCorpus decode_reviews(const std::string& text, uint64_t seed = 0) {
  ReviewCorpus corpus;
  corpus.pos_words = positive_lexicon();
  corpus.neg_words = negative_lexicon();
  corpus.seed = seed;
  size_t pos = 0;
  int line_no = 1;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    if (line.size() < 2 || (line[0] != '+' && line[0] != '-') || line[1] != '\t')
      throw std::runtime_error("review line " + std::to_string(line_no) +
                               " lacks the +/- tab prefix");
    corpus.docs.push_back({line.substr(2), line[0] == '+'});
    ++line_no;
  }
  return corpus;
}

// --------------------------------------------------------- relational

struct RelationalCorpus {
  std::vector<std::string> sentences;
  std::vector<std::pair<std::string, std::string>> pairs;  // (base, related)
  std::vector<std::string> markers;                        // one per pair, same order
  uint64_t seed = 0;
};

namespace detail {

// W distinct templates from carrier x filler combinations; "@" marks the
// slot. Fillers cycle so any W is reachable.
inline std::vector<std::string> slot_templates(const std::vector<std::string>& carriers,
                                               const std::vector<std::string>& fillers, int w) {
  if (w > int(carriers.size() * fillers.size()))
    throw std::invalid_argument("templates_per_slot above " +
                                std::to_string(carriers.size() * fillers.size()) +
                                " exceeds the template stock");
  std::vector<std::string> out;
  for (int i = 0; i < w; ++i) {
    std::string t = carriers[size_t(i) % carriers.size()];
    const std::string& filler = fillers[(size_t(i) / carriers.size()) % fillers.size()];
    const size_t at = t.find('#');
    out.push_back(t.substr(0, at) + filler + t.substr(at + 1));
  }
  return out;
}

inline std::string fill_slot(const std::string& tmpl, char key, const std::string& word) {
  const size_t at = tmpl.find(key);
  return tmpl.substr(0, at) + word + tmpl.substr(at + 1);
}

}  // namespace detail

// Base words share one template family and related words a parallel second
// family, which separates the two roles. Each pair also owns a marker noun
// ("the farm dog", "the farm puppy") adjacent to both members in every
// sentence; predicting the shared marker is what pulls a pair's two input
// rows toward a common pair-specific direction, so different pairs end up
// with parallel base-to-related offsets.
inline RelationalCorpus gen_relational(
    const std::vector<std::pair<std::string, std::string>>& pairs, int templates_per_slot,
    uint64_t seed) {
  static const std::vector<std::string> kMarkers = {"farm",  "mill",  "dock",  "camp",
                                                    "inn",   "forge", "manor", "tower",
                                                    "den",   "loft",  "cove",  "glen"};
  if (pairs.size() < 2) throw std::invalid_argument("need at least 2 pairs");
  if (pairs.size() > kMarkers.size())
    throw std::invalid_argument("at most " + std::to_string(kMarkers.size()) +
                                " pairs supported");
  if (templates_per_slot < 5) throw std::invalid_argument("need templates_per_slot >= 5");
  {
    std::vector<std::string> seen;
    for (const auto& pr : pairs)
      for (const std::string& w : {pr.first, pr.second}) {
        if (std::find(seen.begin(), seen.end(), w) != seen.end())
          throw std::invalid_argument("word '" + w + "' appears in more than one pair");
        if (std::find(kMarkers.begin(), kMarkers.end(), w) != kMarkers.end())
          throw std::invalid_argument("word '" + w + "' collides with a marker noun");
        seen.push_back(w);
      }
  }
  static const std::vector<std::string> kBaseCarriers = {
      "the ~ @ sleeps near the #", "a ~ @ walks past the #", "the ~ @ waits by the #",
      "one ~ @ rests under the #", "the ~ @ runs around the #"};
  static const std::vector<std::string> kRelCarriers = {
      "the ~ @ plays on the #", "a ~ @ naps inside the #", "the ~ @ hides behind the #",
      "one ~ @ tumbles over the #", "the ~ @ squeaks at the #"};
  static const std::vector<std::string> kPlaces = {"barn",   "gate",  "river", "garden",
                                                   "market", "bridge", "meadow", "shed"};
  static const std::vector<std::string> kSpots = {"rug",    "basket", "porch", "stairs",
                                                  "fence",  "table",  "lawn",  "steps"};
  const auto base_templates =
      detail::slot_templates(kBaseCarriers, kPlaces, templates_per_slot);
  const auto rel_templates = detail::slot_templates(kRelCarriers, kSpots, templates_per_slot);

  RelationalCorpus corpus;
  corpus.pairs = pairs;
  corpus.seed = seed;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const std::string& marker = kMarkers[i];
    corpus.markers.push_back(marker);
    for (const auto& t : base_templates)
      corpus.sentences.push_back(
          detail::fill_slot(detail::fill_slot(t, '~', marker), '@', pairs[i].first));
    for (const auto& t : rel_templates)
      corpus.sentences.push_back(
          detail::fill_slot(detail::fill_slot(t, '~', marker), '@', pairs[i].second));
  }
  Rng rng(derive_seed(seed, "relational/order"));
  rng.shuffle(corpus.sentences);
  return corpus;
}

inline std::string encode_sentences(const RelationalCorpus& corpus) {
  std::string out;
  for (const auto& s : corpus.sentences) {
    out += s;
    out += '\n';
  }
  return out;
}

// --------------------------------------------------------- text files

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(content.data(), std::streamsize(content.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace genlab
