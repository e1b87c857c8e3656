#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "genlab/rng.hpp"

using namespace genlab;

TEST_CASE("same seed gives the same stream") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different streams") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  REQUIRE(same == 0);
}

TEST_CASE("doubles land in the half-open unit interval") {
  Rng r(7);
  for (int i = 0; i < 10000; ++i) {
    const double v = r.next_double();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("uniform respects its bounds") {
  Rng r(7);
  for (int i = 0; i < 10000; ++i) {
    const double v = r.uniform(-2.5, 3.5);
    REQUIRE(v >= -2.5);
    REQUIRE(v < 3.5);
  }
}

TEST_CASE("next_below stays under the bound and hits every residue") {
  Rng r(11);
  std::set<uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const uint64_t v = r.next_below(6);
    REQUIRE(v < 6);
    seen.insert(v);
  }
  REQUIRE(seen.size() == 6);
}

TEST_CASE("gaussian has roughly standard moments") {
  Rng r(13);
  double sum = 0, sumsq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double g = r.gaussian();
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  REQUIRE(std::abs(mean) < 0.03);
  REQUIRE(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("named streams are decorrelated and reproducible") {
  const uint64_t s1 = derive_seed(99, "alpha");
  const uint64_t s2 = derive_seed(99, "beta");
  REQUIRE(s1 != s2);
  REQUIRE(s1 == derive_seed(99, "alpha"));
  Rng a(s1), b(s2);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  REQUIRE(same == 0);
}

TEST_CASE("split does not advance the parent") {
  Rng parent(5);
  parent.next_u64();
  Rng copy = parent;
  Rng child = parent.split("child");
  (void)child.next_u64();
  REQUIRE(parent.next_u64() == copy.next_u64());
}

TEST_CASE("shuffle permutes without loss") {
  Rng r(3);
  std::vector<int> v = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto orig = v;
  r.shuffle(v);
  REQUIRE(v != orig);  // 1/10! odds of false alarm, pinned seed
  std::sort(v.begin(), v.end());
  REQUIRE(v == orig);
}

TEST_CASE("shuffle is seed deterministic") {
  std::vector<int> a = {1, 2, 3, 4, 5}, b = a;
  Rng r1(21), r2(21);
  r1.shuffle(a);
  r2.shuffle(b);
  REQUIRE(a == b);
}
