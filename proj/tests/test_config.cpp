#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stieltjes/config.hpp"

using namespace stieltjes;

TEST_CASE("parse_number: decimals and exact fractions") {
  CHECK(parse_number("0.5") == 0.5);
  CHECK(parse_number("1/3") == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
  CHECK(parse_number("-1/2") == -0.5);
  CHECK(parse_number(" 2 / 3 ") == doctest::Approx(2.0 / 3.0));
  CHECK(parse_number("1e3") == 1000.0);
  CHECK_THROWS_AS(parse_number("1/0"), Error);
  CHECK_THROWS_AS(parse_number("abc"), Error);
  CHECK_THROWS_AS(parse_number(""), Error);
}

TEST_CASE("parse_params_text: reference configuration") {
  const std::string text =
      "# first reference set\n"
      "n = 3\n"
      "a = 1/3, 1/3, 1/3\n"
      "m = 3\n"
      "d = 1/2\n"
      "beta = 0, 2/3, 1\n";
  const auto p = parse_params_text(text);
  CHECK(p.n == 3);
  CHECK(p.m == 3);
  CHECK(p.d == 0.5);
  REQUIRE(p.a.size() == 3);
  CHECK(p.a[0] == doctest::Approx(1.0 / 3.0));
  CHECK(p.beta[1] == doctest::Approx(2.0 / 3.0));
  CHECK(check(p).empty());
}

TEST_CASE("parse_params_text: unknown keys are rejected") {
  const std::string text = "n = 2\na = 1/2, 1/2\nm = 2\nd = 0\nbeta = 0, 1\nextra = 7\n";
  CHECK_THROWS_WITH_AS(parse_params_text(text), doctest::Contains("unknown key"), Error);
}

TEST_CASE("parse_params_text: missing and duplicate keys are rejected") {
  CHECK_THROWS_WITH_AS(parse_params_text("n = 2\na = 1/2, 1/2\nm = 2\nd = 0\n"),
                       doctest::Contains("missing key"), Error);
  CHECK_THROWS_WITH_AS(
      parse_params_text("n = 2\nn = 3\na = 1/2, 1/2\nm = 2\nd = 0\nbeta = 0, 1\n"),
      doctest::Contains("duplicate"), Error);
  CHECK_THROWS_WITH_AS(parse_params_text("nonsense line\n"), doctest::Contains("expected key"),
                       Error);
}

TEST_CASE("parse_params_text: raw values flow into validate") {
  const std::string text = "n = 3\na = 1/3, 1/3, 1/2\nm = 3\nd = 1/2\nbeta = 0, 1, 2\n";
  const auto p = parse_params_text(text);  // parse succeeds
  const auto violations = check(p);        // validation catches the bad tiling
  REQUIRE(!violations.empty());
  CHECK(violations[0].code == errc::lengths_do_not_sum_to_one);
}
