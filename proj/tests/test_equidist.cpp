#include <cmath>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "doctest.h"
#include "smalldig/equidist.hpp"
#include "smalldig/error.hpp"

using namespace smalldig;
using boost::multiprecision::cpp_dec_float_50;

namespace {

// || sum_j g_j^{ {n ln L / ln g_j} } || at 50 decimal digits
cpp_dec_float_50 norm50(const std::vector<std::uint64_t>& gs, std::uint64_t L, std::uint64_t n)
{
  cpp_dec_float_50 s = 0;
  for (auto g : gs) {
    cpp_dec_float_50 e = cpp_dec_float_50(n) * log(cpp_dec_float_50(L)) / log(cpp_dec_float_50(g));
    e -= floor(e);
    s += pow(cpp_dec_float_50(g), e);
  }
  s -= floor(s);
  return s < 0.5 ? s : cpp_dec_float_50(1) - s;
}

double norm_double(const std::vector<std::uint64_t>& gs, std::uint64_t L, std::uint64_t n)
{
  double s = 0;
  for (auto g : gs) {
    double e = static_cast<double>(n) * std::log(static_cast<double>(L)) / std::log(static_cast<double>(g));
    e -= std::floor(e);
    s += std::pow(static_cast<double>(g), e);
  }
  s -= std::floor(s);
  return std::min(s, 1 - s);
}

} // namespace

TEST_CASE("minimal roots")
{
  CHECK(minimal_root(8) == 2);
  CHECK(minimal_root(12) == 12);
  CHECK(minimal_root(81) == 3);
  CHECK(minimal_root(36) == 6);
  CHECK(minimal_root(7) == 7);
}

TEST_CASE("system validation")
{
  CHECK_THROWS_AS(ExponentSystem({2, 3}, 2), InvalidArgument);
  CHECK_THROWS_AS(ExponentSystem({3, 9}, 2), InvalidArgument);
  CHECK_NOTHROW(ExponentSystem({3, 9}, 2, 1, {}, true));
  CHECK_THROWS_AS(ExponentSystem({3, 5}, 2, 0), InvalidArgument);
  CHECK_THROWS_AS(ExponentSystem({3, 5}, 2, 1, {Rational(1)}), InvalidArgument);
  const ExponentSystem s({3, 5}, 2, 3);
  CHECK(s.L() == 8);
  CHECK(s.theta(0).mid_double() == doctest::Approx(std::log(8.0) / std::log(3.0)));
}

TEST_CASE("fractional exponents")
{
  const ExponentSystem s({3}, 2);
  const auto f = frac_exponents(s, 1);
  CHECK(f[0].mid_double() == doctest::Approx(0.6309297535714574).epsilon(1e-15));
  CHECK(f[0].width() < 1e-50);
  for (std::uint64_t n = 1; n < 200; ++n) {
    const double e = n * std::log(2.0) / std::log(3.0);
    CHECK(frac_exponents_double(s, n)[0] == doctest::Approx(e - std::floor(e)).epsilon(1e-12));
  }
}

TEST_CASE("power-sum norm against a 50-digit oracle")
{
  const std::vector<std::uint64_t> gs{3, 5, 7};
  const ExponentSystem s(gs, 2);
  for (std::uint64_t n : {7, 11, 40, 101}) {
    const NormValue v = power_sum_norm(s, n);
    const cpp_dec_float_50 ref = norm50(gs, 2, n);
    CHECK(abs(cpp_dec_float_50(v.value) - ref) < 1e-15);
    CHECK(v.error < 1e-40);
    // the oracle lies in the enclosure up to its own 50-digit accuracy
    CHECK(abs(cpp_dec_float_50(v.enclosure.mid().to_string(45)) - ref) < cpp_dec_float_50("1e-40"));
  }
}

TEST_CASE("zeta weights")
{
  const ExponentSystem s({3, 5}, 2, 1, {Rational(1, 2), Rational(3)});
  const double e1 = 7 * std::log(2.0) / std::log(3.0), e2 = 7 * std::log(2.0) / std::log(5.0);
  double v = 0.5 * std::pow(3.0, e1 - std::floor(e1)) + 3.0 * std::pow(5.0, e2 - std::floor(e2));
  v -= std::floor(v);
  CHECK(power_sum_norm(s, 7).value == doctest::Approx(std::min(v, 1 - v)).epsilon(1e-12));
}

TEST_CASE("census agrees with a double-precision count away from the threshold")
{
  const std::vector<std::uint64_t> gs{3, 5};
  const ExponentSystem s(gs, 2);
  const CensusReport r = bad_n_census(s, Rational(1, 10), 3000);
  std::uint64_t count = 0, ambiguous = 0;
  for (std::uint64_t n = 1; n <= 3000; ++n) {
    const double v = norm_double(gs, 2, n);
    if (std::abs(v - 0.1) < 1e-9)
      ++ambiguous;
    count += v <= 0.1;
  }
  CHECK(ambiguous == 0);
  CHECK(r.count == count);
  CHECK(r.indeterminate == 0);
  REQUIRE(r.grid.size() == 5);
  CHECK(r.grid[0].epsilon == Rational(1, 10));
  CHECK(r.grid[4].epsilon == Rational(1, 160));
  for (std::size_t i = 1; i < r.grid.size(); ++i)
    CHECK(r.grid[i].count <= r.grid[i - 1].count);
  CHECK(bad_n_census(s, Rational(1, 10), 3000, {}, 1000, kCensusBudget, 4).count == r.count);
  CHECK_THROWS_AS(bad_n_census(s, Rational(1, 10), 3000, {}, 1000, 100), BudgetExceeded);
}

TEST_CASE("discrepancy")
{
  const ExponentSystem s({3}, 2);
  const auto a = discrepancy_estimate(s, 10000, 1000);
  const auto b = discrepancy_estimate(s, 100000, 1000);
  CHECK(a.estimate < 0.01);
  CHECK(b.estimate <= a.estimate);
  CHECK(a.bound == doctest::Approx(a.estimate + 0.001));
  const ExponentSystem s2({3, 5}, 2);
  CHECK(discrepancy_estimate(s2, 20000, 32).estimate < 0.05);
}

TEST_CASE("separation check")
{
  const auto r = power_sum_separation_check({2.0, 3.0}, {1.0, -1.0}, {0.5, 0.75});
  CHECK(r.delta == 0.25);
  CHECK(r.max_abs == doctest::Approx(std::pow(3.0, 0.75) - std::pow(2.0, 0.75)));
  CHECK(r.ratio == doctest::Approx(r.max_abs / 0.25));
  CHECK_THROWS_AS(power_sum_separation_check({2.0, 3.0}, {1.0, -1.0}, {0.5}), InvalidArgument);
  CHECK_THROWS_AS(power_sum_separation_check({2.0, 2.0}, {1.0, -1.0}, {0.2, 0.5}), InvalidArgument);
}

TEST_CASE("lattice minimum against a double brute force")
{
  const ExponentSystem s({2, 3}, 5);
  for (std::uint64_t M : {3, 10}) {
    const LatticeReport r = lattice_min_combination(s, M);
    CHECK(r.vectors == (2 * M + 1) * (2 * M + 1) - 1);
    const double t1 = std::log(5.0) / std::log(2.0), t2 = std::log(5.0) / std::log(3.0);
    double best = 1;
    const auto m = static_cast<std::int64_t>(M);
    for (std::int64_t a = -m; a <= m; ++a)
      for (std::int64_t b = -m; b <= m; ++b) {
        if (a == 0 && b == 0)
          continue;
        const double x = a * t1 + b * t2;
        best = std::min(best, std::abs(x - std::round(x)));
      }
    CHECK(r.min_norm_value == doctest::Approx(best).epsilon(1e-9));
    CHECK(r.min_norm_value > 0);
    REQUIRE(r.argmin.size() == 2);
    CHECK((r.argmin[0] > 0 || (r.argmin[0] == 0 && r.argmin[1] > 0)));
  }
}
