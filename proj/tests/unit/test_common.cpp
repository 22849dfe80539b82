#include "doctest.h"
#include "stimnet/common.hpp"

using namespace stimnet;

TEST_CASE("number formatting round-trips") {
  for (double v : {0.0, 1.0, 0.1, 1e-9, 123456.789, -3.25, 1.0 / 3.0}) {
    const auto text = format_double(v);
    REQUIRE(parse_double(text).has_value());
    CHECK(*parse_double(text) == v);
  }
  CHECK(format_fixed(2.005, 1) == "2.0");
  CHECK(format_fixed(82.7349, 2) == "82.73");
}

TEST_CASE("strict parsing") {
  CHECK_FALSE(parse_double("1.5x").has_value());
  CHECK_FALSE(parse_double("").has_value());
  CHECK_FALSE(parse_integer("12 ").has_value());
  CHECK(parse_integer("-42") == -42);
}

TEST_CASE("seed mixing and hashing are stable") {
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(1, 2) != mix_seed(2, 2));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("error categories carry exit codes") {
  CHECK(ConfigError("x").exit_code() == 1);
  CHECK(DataError("x").exit_code() == 2);
  CHECK(InvariantError("x").exit_code() == 3);
}
