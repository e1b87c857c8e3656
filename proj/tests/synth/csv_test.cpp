#include <catch2/catch_amalgamated.hpp>

#include "genlab/csv.hpp"

using namespace genlab;

TEST_CASE("header and rows join with commas and LF endings") {
  Csv csv({"step", "value"});
  csv.row({"0", g9(0.5)});
  csv.row({"1", g9(-1.25)});
  REQUIRE(csv.str() == "step,value\n0,0.5\n1,-1.25\n");
}

TEST_CASE("floats print with nine significant digits") {
  REQUIRE(g9(0.1) == "0.1");
  REQUIRE(g9(1.0 / 3.0) == "0.333333333");
  REQUIRE(g9(123456789.0) == "123456789");
  REQUIRE(g9(1234567891.0) == "1.23456789e+09");
  REQUIRE(g9(0.0) == "0");
  REQUIRE(g9(-2.0) == "-2");
}

TEST_CASE("row width must match the header") {
  Csv csv({"a", "b"});
  REQUIRE_THROWS_AS(csv.row({"1"}), std::invalid_argument);
  REQUIRE_THROWS_AS(csv.row({"1", "2", "3"}), std::invalid_argument);
}

TEST_CASE("cells that would need quoting are refused") {
  Csv csv({"a"});
  REQUIRE_THROWS_AS(csv.row({"x,y"}), std::invalid_argument);
  REQUIRE_THROWS_AS(csv.row({"x\ny"}), std::invalid_argument);
}
