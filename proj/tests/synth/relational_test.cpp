#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "genlab/synthdata.hpp"

using namespace genlab;

namespace {

const std::vector<std::pair<std::string, std::string>> kPairs = {
    {"dog", "puppy"}, {"cat", "kitten"}, {"cow", "calf"}, {"horse", "foal"}};

int occurrences(const RelationalCorpus& c, const std::string& word) {
  int n = 0;
  for (const auto& s : c.sentences)
    for (const auto& tok : detail::tokenize_words(s))
      if (tok == word) ++n;
  return n;
}

// sentences containing `word`, with the word and this pair's marker replaced
// by slot symbols so template families can be compared across pairs
std::set<std::string> slot_contexts(const RelationalCorpus& c, const std::string& word,
                                    const std::string& marker) {
  std::set<std::string> out;
  for (const auto& s : c.sentences) {
    auto toks = detail::tokenize_words(s);
    bool hit = false;
    for (auto& t : toks) {
      if (t == word) {
        t = "@";
        hit = true;
      } else if (t == marker) {
        t = "~";
      }
    }
    if (!hit) continue;
    std::string flat;
    for (const auto& t : toks) flat += t + " ";
    out.insert(flat);
  }
  return out;
}

}  // namespace

TEST_CASE("every pair word occurs at least templates_per_slot times") {
  const int w = 20;
  const auto corpus = gen_relational(kPairs, w, 9);
  for (const auto& pr : kPairs) {
    REQUIRE(occurrences(corpus, pr.first) >= w);
    REQUIRE(occurrences(corpus, pr.second) >= w);
  }
}

TEST_CASE("same seed gives the identical sentence list") {
  const auto a = gen_relational(kPairs, 10, 4);
  const auto b = gen_relational(kPairs, 10, 4);
  REQUIRE(a.sentences == b.sentences);
  REQUIRE(a.markers == b.markers);
}

TEST_CASE("vocabulary is closed over templates, pair words, and markers") {
  const auto small = gen_relational({{"dog", "puppy"}, {"cat", "kitten"}}, 10, 2);
  const auto large = gen_relational(kPairs, 10, 2);
  std::set<std::string> small_vocab, large_vocab;
  for (const auto& s : small.sentences)
    for (const auto& t : detail::tokenize_words(s)) small_vocab.insert(t);
  for (const auto& s : large.sentences)
    for (const auto& t : detail::tokenize_words(s)) large_vocab.insert(t);
  // adding pairs adds exactly the new pair words plus their markers
  std::set<std::string> expected = {"cow", "calf", "horse", "foal"};
  REQUIRE(large.markers.size() == 4);
  expected.insert(large.markers[2]);
  expected.insert(large.markers[3]);
  std::set<std::string> extra;
  std::set_difference(large_vocab.begin(), large_vocab.end(), small_vocab.begin(),
                      small_vocab.end(), std::inserter(extra, extra.begin()));
  REQUIRE(extra == expected);
  for (const char* w : {"dog", "puppy", "cat", "kitten"}) REQUIRE(small_vocab.count(w) == 1);
}

TEST_CASE("pair words of the same role fill identical template slots") {
  const auto corpus = gen_relational(kPairs, 8, 3);
  REQUIRE(slot_contexts(corpus, "puppy", corpus.markers[0]) ==
          slot_contexts(corpus, "kitten", corpus.markers[1]));
  REQUIRE(slot_contexts(corpus, "dog", corpus.markers[0]) ==
          slot_contexts(corpus, "cat", corpus.markers[1]));
  // the two roles use disjoint families
  std::set<std::string> base = slot_contexts(corpus, "dog", corpus.markers[0]);
  std::set<std::string> rel = slot_contexts(corpus, "puppy", corpus.markers[0]);
  for (const auto& s : base) REQUIRE(rel.count(s) == 0);
}

TEST_CASE("both members sit within a two-token window of their own marker") {
  const auto corpus = gen_relational(kPairs, 8, 3);
  for (size_t p = 0; p < kPairs.size(); ++p) {
    for (const std::string& word : {kPairs[p].first, kPairs[p].second}) {
      int coupled = 0;
      for (const auto& s : corpus.sentences) {
        const auto toks = detail::tokenize_words(s);
        for (size_t i = 0; i < toks.size(); ++i)
          for (size_t j = 0; j < toks.size(); ++j)
            if (toks[i] == word && toks[j] == corpus.markers[p] &&
                std::abs(int(i) - int(j)) <= 2)
              ++coupled;
        // no sentence mixes a member with a foreign marker
        for (size_t q = 0; q < kPairs.size(); ++q) {
          if (q == p) continue;
          bool has_word = false, has_foreign = false;
          for (const auto& t : toks) {
            if (t == word) has_word = true;
            if (t == corpus.markers[q]) has_foreign = true;
          }
          REQUIRE(!(has_word && has_foreign));
        }
      }
      REQUIRE(coupled >= 8);
    }
  }
}

TEST_CASE("preconditions are enforced") {
  REQUIRE_THROWS_AS(gen_relational({{"dog", "puppy"}}, 10, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(gen_relational(kPairs, 4, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(gen_relational({{"dog", "puppy"}, {"dog", "kitten"}}, 10, 0),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(gen_relational(kPairs, 1000, 0), std::invalid_argument);
  // marker nouns cannot double as pair words
  REQUIRE_THROWS_AS(gen_relational({{"farm", "puppy"}, {"cat", "kitten"}}, 10, 0),
                    std::invalid_argument);
  // more pairs than marker nouns
  std::vector<std::pair<std::string, std::string>> many;
  for (char c = 'a'; c < 'a' + 13; ++c)
    many.push_back({std::string("q") + c, std::string("z") + c});
  REQUIRE_THROWS_AS(gen_relational(many, 10, 0), std::invalid_argument);
}
