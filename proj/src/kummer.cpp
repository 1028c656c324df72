#include "smalldig/kummer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "smalldig/digits.hpp"
#include "smalldig/error.hpp"

namespace smalldig {

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m)
{
  std::uint64_t r = 1 % m;
  b %= m;
  while (e != 0) {
    if (e & 1)
      r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

void require_prime(std::uint64_t p)
{
  if (!is_prime_u64(p))
    fail_invalid(std::to_string(p) + " is not prime");
}

// binom(a, b) mod p for 0 <= b <= a < p, so every factor is invertible.
std::uint64_t small_binom_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p)
{
  b = std::min(b, a - b);
  std::uint64_t num = 1, den = 1;
  for (std::uint64_t i = 0; i < b; ++i) {
    num = mulmod(num, (a - i) % p, p);
    den = mulmod(den, (i + 1) % p, p);
  }
  return mulmod(num, powmod(den, p - 2, p), p);
}

} // namespace

bool is_prime_u64(std::uint64_t n)
{
  if (n < 2)
    return false;
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % q == 0)
      return n == q;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These twelve bases are a deterministic witness set below 3.3e24.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1)
      continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite)
      return false;
  }
  return true;
}

std::uint64_t central_binom_valuation(const BigInt& n, std::uint64_t p)
{
  require_prime(p);
  if (n < 1)
    fail_invalid("central_binom_valuation needs n >= 1");
  // carries in n + n
  std::uint64_t v = 0, carry = 0;
  for (Digit d : to_digits(n, p).digits) {
    carry = 2 * static_cast<u128>(d) + carry >= p ? 1 : 0;
    v += carry;
  }
  return v;
}

std::uint64_t central_binom_valuation(std::uint64_t n, std::uint64_t p)
{
  require_prime(p);
  if (n < 1)
    fail_invalid("central_binom_valuation needs n >= 1");
  std::uint64_t v = 0, carry = 0;
  while (n != 0) {
    carry = 2 * static_cast<u128>(n % p) + carry >= p ? 1 : 0;
    v += carry;
    n /= p;
  }
  return v;
}

GrahamSplit graham_split(const BigInt& n, std::span<const std::uint64_t> primes)
{
  if (n < 1)
    fail_invalid("graham_split needs n >= 1");
  std::set<std::uint64_t> seen;
  for (auto p : primes)
    if (!seen.insert(p).second)
      fail_invalid("duplicate prime " + std::to_string(p));

  GrahamSplit out;
  out.n = n;
  out.primes.assign(primes.begin(), primes.end());
  out.n2 = 1;
  double log_n2 = 0.0;
  for (auto p : primes) {
    const std::uint64_t v = central_binom_valuation(n, p);
    out.valuations[p] = v;
    out.n2 *= pow_ui(p, v);
    log_n2 += static_cast<double>(v) * std::log(static_cast<double>(p));
  }
  // n2 > 1 forces some valuation > 0, which needs n >= 1 with a digit >= p/2,
  // hence n >= 2 and log(n) > 0.
  out.n2_log_ratio = out.n2 == 1 ? 0.0 : log_n2 / log_double(n);
  return out;
}

std::uint64_t lucas_central_binom_mod(const BigInt& n, std::uint64_t p)
{
  require_prime(p);
  if (n < 0)
    fail_invalid("negative n");
  const DigitVector top = to_digits(BigInt(2 * n), p);
  const DigitVector bottom = to_digits(n, p);
  std::uint64_t acc = 1 % p;
  for (std::size_t i = 0; i < top.size(); ++i) {
    const std::uint64_t m = top.at(i), k = bottom.at(i);
    if (k > m)
      return 0;
    acc = mulmod(acc, small_binom_mod(m, k, p), p);
  }
  return acc;
}

bool lucas_coprime_oracle(const BigInt& n, std::uint64_t p)
{
  if (n < 1)
    fail_invalid("lucas_coprime_oracle needs n >= 1");
  return lucas_central_binom_mod(n, p) != 0;
}

} // namespace smalldig
