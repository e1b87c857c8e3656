#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "genlab/tensor.hpp"

using namespace genlab;

TEST_CASE("construction zero-fills and sizes from dims") {
  Tensor t({2, 3, 4});
  REQUIRE(t.rank() == 3);
  REQUIRE(t.numel() == 24);
  for (float v : t.data) REQUIRE(v == 0.0f);
}

TEST_CASE("non-positive dims are rejected") {
  REQUIRE_THROWS_AS(Tensor({2, 0}), std::invalid_argument);
  REQUIRE_THROWS_AS(Tensor({-1}), std::invalid_argument);
  REQUIRE_THROWS_AS(Tensor(std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("indexing is row-major") {
  Tensor t({2, 3});
  t(1, 2) = 5.0f;
  REQUIRE(t.data[5] == 5.0f);
  Tensor u({2, 2, 2});
  u(1, 0, 1) = 7.0f;
  REQUIRE(u.data[5] == 7.0f);
}

TEST_CASE("finiteness check catches NaN and infinity") {
  Tensor t({3});
  REQUIRE(t.all_finite());
  t.data[1] = std::numeric_limits<float>::quiet_NaN();
  REQUIRE(!t.all_finite());
  t.data[1] = std::numeric_limits<float>::infinity();
  REQUIRE(!t.all_finite());
  REQUIRE_THROWS_AS(ensure_finite(t, "unit"), std::runtime_error);
}

TEST_CASE("min and max scan the whole buffer") {
  Tensor t({4});
  t.data = {3.0f, -1.0f, 2.0f, 0.5f};
  REQUIRE(t.min_value() == -1.0f);
  REQUIRE(t.max_value() == 3.0f);
}

TEST_CASE("precision conversion round-trips") {
  Tensor t({2, 2});
  t.data = {0.25f, -1.5f, 3.0f, 0.125f};
  TensorT<double> d = to_double(t);
  Tensor back = to_float(d);
  REQUIRE(back.dims == t.dims);
  REQUIRE(back.data == t.data);
}
