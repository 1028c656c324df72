#include "doctest.h"
#include "smalldig/digits.hpp"
#include "smalldig/error.hpp"
#include "smalldig/kummer.hpp"

using namespace smalldig;

namespace {

// v_p((2n)!) - 2 v_p(n!)
std::uint64_t legendre_central(std::uint64_t n, std::uint64_t p)
{
  auto vfact = [p](std::uint64_t m) {
    std::uint64_t v = 0;
    for (std::uint64_t q = p; q <= m; q *= p)
      v += m / q;
    return v;
  };
  return vfact(2 * n) - 2 * vfact(n);
}

} // namespace

TEST_CASE("primality")
{
  CHECK(is_prime_u64(2));
  CHECK(is_prime_u64(3));
  CHECK_FALSE(is_prime_u64(1));
  CHECK_FALSE(is_prime_u64(561));
  CHECK(is_prime_u64(1000000007ULL));
  CHECK(is_prime_u64(18446744073709551557ULL));
  CHECK_FALSE(is_prime_u64(18446744073709551555ULL));
  CHECK_FALSE(is_prime_u64(3215031751ULL)); // strong pseudoprime to 2, 3, 5, 7
}

TEST_CASE("valuation matches Legendre's formula")
{
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 97})
    for (std::uint64_t n = 1; n <= 3000; ++n)
      REQUIRE(central_binom_valuation(n, p) == legendre_central(n, p));
}

TEST_CASE("valuation for a big argument")
{
  // n = (222...2)_3 with 50 digits: 50 carries
  BigInt n = (pow_ui(3, 50) - 1);
  CHECK(central_binom_valuation(n, 3) == 50);
  CHECK(central_binom_valuation(BigInt(1), 2) == 1);
  CHECK_THROWS_AS(central_binom_valuation(BigInt(10), 9), InvalidArgument);
  CHECK_THROWS_AS(central_binom_valuation(BigInt(0), 3), InvalidArgument);
}

TEST_CASE("Graham split")
{
  const std::vector<std::uint64_t> primes{3, 5, 7};
  const GrahamSplit s = graham_split(BigInt(756), primes);
  CHECK(s.n2 == 1);
  CHECK(s.n2_log_ratio == 0.0);

  // 4 = (11)_3 = (4)_5 = (4)_7: v_3 = 0, v_5 = 1, v_7 = 1; binom(8,4) = 70
  const GrahamSplit t = graham_split(BigInt(4), primes);
  CHECK(t.valuations.at(3) == 0);
  CHECK(t.valuations.at(5) == 1);
  CHECK(t.valuations.at(7) == 1);
  CHECK(t.n2 == 35);

  const std::vector<std::uint64_t> dup{3, 3};
  CHECK_THROWS_AS(graham_split(BigInt(5), dup), InvalidArgument);
}

TEST_CASE("Lucas residue agrees with Kummer")
{
  for (std::uint64_t p : {3, 5, 7, 11, 13})
    for (std::uint64_t n = 1; n <= 2000; ++n)
      REQUIRE(lucas_coprime_oracle(BigInt(static_cast<unsigned long>(n)), p) == (central_binom_valuation(n, p) == 0));
  // binom(20, 10) = 184756 = 4 * 11 * 13 * 17 * 19, so mod 7 it is 184756 mod 7 = 3
  CHECK(lucas_central_binom_mod(BigInt(10), 7) == 184756 % 7);
}
