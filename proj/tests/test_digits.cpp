#include <random>

#include "doctest.h"
#include "smalldig/digits.hpp"
#include "smalldig/error.hpp"

using namespace smalldig;

TEST_CASE("parse integers and rationals")
{
  CHECK(parse_bigint("756") == 756);
  CHECK(parse_bigint(" +12 ") == 12);
  CHECK(parse_bigint("10^3") == 1000);
  CHECK(parse_bigint("10^94") == pow_ui(10, 94));
  CHECK_THROWS_AS(parse_bigint("12a"), InvalidArgument);
  CHECK_THROWS_AS(parse_bigint(""), InvalidArgument);
  CHECK(parse_rational("2/4") == Rational(1, 2));
  CHECK(parse_rational("3") == Rational(3));
  CHECK_THROWS_AS(parse_rational("0.5"), InvalidArgument);
  CHECK_THROWS_AS(parse_rational("1e-3"), InvalidArgument);
  CHECK_THROWS_AS(parse_rational("1/0"), InvalidArgument);
}

TEST_CASE("base spec smallness is strict at integer thresholds")
{
  const BaseSpec four(4, Rational(1, 2));
  CHECK(four.alphabet() == 2);
  CHECK(four.is_small(1));
  CHECK(four.is_large(2));

  const BaseSpec five = BaseSpec::parse("5");
  CHECK(five.kappa() == Rational(1, 2));
  CHECK(five.alphabet() == 3);
  CHECK(five.is_small(2));
  CHECK(five.is_large(3));

  const BaseSpec three = BaseSpec::parse("3:2/3");
  CHECK(three.alphabet() == 2);
  CHECK(three.to_string() == "3:2/3");

  CHECK_THROWS_AS(BaseSpec::parse("1"), InvalidArgument);
  CHECK_THROWS_AS(BaseSpec::parse("5:0"), InvalidArgument);
  CHECK_THROWS_AS(BaseSpec::parse("5:3/2"), InvalidArgument);
  CHECK_THROWS_AS(BaseSpec::parse("5:0.5"), InvalidArgument);
  CHECK_THROWS_AS(BaseSpec::parse_list("3,,5"), InvalidArgument);
  CHECK(BaseSpec::parse_list("3,5:1/5,7").size() == 3);
  CHECK_THROWS_AS(BaseSpec::parse("10^30").radix(), InvalidArgument);
}

TEST_CASE("worked expansions of 756")
{
  CHECK(to_digits(BigInt(756), 3).render() == "(1001000)_3");
  CHECK(to_digits(BigInt(756), 5).render() == "(11011)_5");
  CHECK(to_digits(BigInt(756), 7).render() == "(2130)_7");
  CHECK(to_digits(BigInt(0), 7).render() == "(0)_7");
  CHECK(to_digits(BigInt(0), 7).is_zero());
  CHECK(to_digits(std::uint64_t{169 + 12 * 13 + 10}, 13).render() == "(1[12][10])_13");

  const std::vector<BaseSpec> specs{BaseSpec::parse("3"), BaseSpec::parse("5"), BaseSpec::parse("7")};
  for (const auto& p : multi_base_profile(756, specs))
    CHECK(p.large == 0);
}

TEST_CASE("round trip against a naive conversion")
{
  std::mt19937_64 rng(20240611);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t g = 2 + rng() % 40;
    const std::uint64_t n = rng() >> (rng() % 64);
    const DigitVector d = to_digits(n, g);
    // naive: repeated division
    std::vector<Digit> naive;
    for (std::uint64_t m = n; m > 0; m /= g)
      naive.push_back(m % g);
    CHECK(d.digits == naive);
    CHECK(d == to_digits(from_u64(n), g));
    CHECK(from_digits(d) == from_u64(n));
  }
  BigInt big = pow_ui(7, 200) * 3 + 11;
  CHECK(from_digits(to_digits(big, 1000003)) == big);
}

TEST_CASE("from_digits rejects out-of-range digits")
{
  CHECK_THROWS_AS(from_digits(DigitVector{3, {0, 3}}), InvalidArgument);
}

TEST_CASE("large digit counts agree with the word fast path")
{
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t g = 3 + rng() % 10;
    const BaseSpec s(g, Rational(1, 2));
    const std::uint64_t n = rng() % 1000000;
    CHECK((large_digit_count(from_u64(n), s) == 0) == all_digits_below(n, g, s.alphabet_u64()));
  }
}

TEST_CASE("digit windows")
{
  CHECK(window_positions(3, Rational(1), Rational(27)) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(window_positions(3, Rational(2), Rational(26)) == std::vector<std::size_t>{1, 2});
  CHECK(window_positions(3, Rational(10), Rational(26)).empty());
  CHECK_THROWS_AS(window_positions(3, Rational(5), Rational(4)), InvalidArgument);
  CHECK_THROWS_AS(window_positions(3, Rational(0), Rational(4)), InvalidArgument);

  // 100 = (10201)_3: the only large digit (>= 2) sits at position 2
  const auto w = digit_window(BigInt(100), BaseSpec::parse("3"), Rational(1), Rational(81));
  CHECK(w.positions == std::vector<std::size_t>{0, 1, 2, 3, 4});
  CHECK(w.large_positions == std::vector<std::size_t>{2});
}

TEST_CASE("json round trip of digit vectors")
{
  const DigitVector d = to_digits(BigInt(756), 5);
  nlohmann::json j = d;
  CHECK(j.get<DigitVector>() == d);
}
