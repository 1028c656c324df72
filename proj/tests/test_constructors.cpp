#include <algorithm>

#include "doctest.h"
#include "smalldig/constructors.hpp"
#include "smalldig/error.hpp"

using namespace smalldig;

namespace {

const BaseSpec b3 = BaseSpec::parse("3:1/2");
const BaseSpec b5 = BaseSpec::parse("5:1/2");

bool all_small(const BigInt& n, const BaseSpec& s) { return large_digit_count(n, s) == 0; }

} // namespace

TEST_CASE("policy names")
{
  CHECK(parse_egrs_policy("smallest-first") == EgrsPolicy::kSmallestFirst);
  CHECK(parse_egrs_policy("example") == EgrsPolicy::kSmallestFirst);
  CHECK(parse_egrs_policy("largest-first") == EgrsPolicy::kLargestFirst);
  CHECK_THROWS_AS(parse_egrs_policy("random"), InvalidArgument);
}

TEST_CASE("highest large digit")
{
  // 531441 = (114001231)_5
  CHECK(*highest_large_digit(to_digits(BigInt(531441), 5), b5) == 6);
  CHECK_FALSE(highest_large_digit(to_digits(BigInt(756), 5), b5).has_value());
}

TEST_CASE("first repair step from 3^12")
{
  const RepairOutcome o = egrs_repair_step(pow_ui(3, 12), b3, b5, EgrsPolicy::kSmallestFirst, 12);
  REQUIRE(o.kind == RepairOutcome::Kind::kStep);
  CHECK(o.offender_position == 6);
  CHECK(o.step.exponent == 9);
  CHECK(o.step.multiplicity == 1);
  CHECK(o.step.value == 551124);

  // every admissible exponent satisfies 5^6 <= 3^e < 5^7
  for (const auto& c : egrs_candidates(pow_ui(3, 12), b3, b5, EgrsPolicy::kLargestFirst, 12)) {
    CHECK(pow_ui(5, 6) <= pow_ui(3, c.exponent));
    CHECK(pow_ui(3, c.exponent) < pow_ui(5, 7));
  }
}

TEST_CASE("worked repair from 3^12")
{
  const EgrsTrace t = egrs_construct(b3, b5, 12);
  REQUIRE(t.success);
  CHECK(t.condition_holds);
  std::vector<std::uint64_t> exps;
  for (const auto& s : t.steps)
    exps.push_back(s.exponent);
  CHECK(exps == std::vector<std::uint64_t>{9, 5, 3, 2, 1});
  CHECK(t.steps.front().value == 551124);
  CHECK(to_digits(t.steps.front().value, 5).render() == "(120113444)_5");
  CHECK(t.final_value == 551406);
  CHECK(to_digits(t.final_value, 3).render() == "(1001000101110)_3");
  CHECK(to_digits(t.final_value, 5).render() == "(120121111)_5");
  CHECK(t.large1 == 0);
  CHECK(t.large2 == 0);
}

TEST_CASE("repair successes are genuine witnesses")
{
  for (std::uint64_t N = 1; N <= 40; ++N)
    for (auto pol : {EgrsPolicy::kSmallestFirst, EgrsPolicy::kLargestFirst}) {
      const EgrsTrace t = egrs_construct(b3, b5, N, 20000, pol);
      if (!t.success)
        continue;
      CHECK(all_small(t.final_value, b3));
      CHECK(all_small(t.final_value, b5));
      CHECK(t.final_value >= pow_ui(3, N));
      // exponents strictly decrease
      for (std::size_t i = 1; i < t.steps.size(); ++i)
        CHECK(t.steps[i].exponent < t.steps[i - 1].exponent);
    }
}

TEST_CASE("repair rejects bad inputs and respects the budget")
{
  CHECK_THROWS_AS(egrs_construct(b3, b3, 5), InvalidArgument);
  CHECK_THROWS_AS(egrs_construct(b3, b5, 5, 0), InvalidArgument);
  const EgrsTrace t = egrs_construct(BaseSpec::parse("3:2/3"), BaseSpec::parse("5:2/5"), 30, 50);
  CHECK_FALSE(t.condition_holds);
  CHECK(t.nodes_expanded <= 50);
  if (!t.success)
    CHECK(t.large1 + t.large2 > 0);
}

TEST_CASE("block config validation")
{
  BlockConfig c;
  c.specs = {b3, b5};
  c.ell = 2;
  c.h = 6;
  c.H = 512;
  c.N = 4;
  CHECK_NOTHROW(c.validate());
  CHECK(c.L() == 64);
  c.ell = 3;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.ell = 2;
  c.H = 10;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.H = 512;
  c.c_pad = Rational(1, 2);
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("windows")
{
  BlockConfig c;
  c.specs = {b3, b5};
  c.ell = 2;
  c.h = 6;
  c.H = 512;
  c.N = 12;
  // default padding 8 with H/L = 8: the audit window is [64^(n+1), 64^(n+1)/8], empty
  const auto [lo, hi] = audit_window(c, 3);
  CHECK(lo > hi);
  CHECK(positions_in(3, lo, hi).empty());
  const auto [slo, shi] = shift_window(c, 3);
  CHECK(slo == Rational(8) * pow_ui(64, 3));
  CHECK(shi == Rational(pow_ui(64, 4) / 8));
}

TEST_CASE("block construction audits independently")
{
  BlockConfig c;
  c.specs = {b3, b5, BaseSpec::parse("7")};
  c.ell = 2;
  c.h = 8;
  c.H = 2048;
  c.c_pad = Rational(1);
  c.N = 6;
  c.threads = 2;
  const BlockTrace t = block_construct(c);
  CHECK(t.in_range);
  CHECK(t.shifts.size() == c.N + 1);
  CHECK(block_prefix(t, 0) == t.b);
  for (auto s : t.shifts) {
    CHECK(s >= 1);
    CHECK(s <= c.H);
  }
  for (auto n : t.good_blocks)
    for (const auto& spec : c.specs) {
      const auto [lo, hi] = audit_window(c, n);
      const DigitVector d = to_digits(t.b, spec.radix());
      for (auto k : positions_in(spec.radix(), lo, hi))
        CHECK(spec.is_small(d.at(k)));
    }
  for (std::uint64_t n = 0; n <= c.N; ++n)
    for (const auto& spec : c.specs)
      CHECK(stability_check(t, n, spec));
  for (const auto& a : t.audits) {
    CHECK(a.sharp_large == 0);
    CHECK(a.search_window_violations == 0);
    CHECK(a.sharp_positions + a.flat_positions + a.fringe_positions == a.total_digits);
  }

  // thread count does not change the result
  c.threads = 1;
  CHECK(block_construct(c).b == t.b);
}

TEST_CASE("digit grid marks large digits")
{
  const std::vector<BaseSpec> specs{b5};
  const std::string g = render_digit_grid(BigInt(531441), specs);
  CHECK(g.find("114001231") != std::string::npos);
  CHECK(g.find("^") != std::string::npos);
}
