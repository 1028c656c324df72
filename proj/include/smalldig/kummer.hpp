#pragma once

// Kummer's theorem for central binomial coefficients: v_p(binom(2n, n)) is the
// number of carries when adding n + n in base p. It vanishes iff every base-p
// digit of n is < p/2; a digit (p-1)/2 receiving a carry also carries, so the
// count of digits >= p/2 is only a lower bound. On top of it, the split
// binom(2n, n) = n1 * n2 with n1 coprime to a fixed set of primes.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "smalldig/bigint.hpp"

namespace smalldig {

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime_u64(std::uint64_t n);

/// v_p(binom(2n, n)) as the carry count of n + n. Rejects composite p and n < 1.
std::uint64_t central_binom_valuation(const BigInt& n, std::uint64_t p);
std::uint64_t central_binom_valuation(std::uint64_t n, std::uint64_t p);

struct GrahamSplit {
  BigInt n;
  std::vector<std::uint64_t> primes;
  std::map<std::uint64_t, std::uint64_t> valuations;
  BigInt n2; // product of p^{v_p}
  double n2_log_ratio = 0.0; // log(n2) / log(n); 0 when n2 == 1
};

/// Rejects duplicate primes.
GrahamSplit graham_split(const BigInt& n, std::span<const std::uint64_t> primes);

/// binom(2n, n) mod p via Lucas' theorem: the product of binom(m_i, n_i) over
/// the base-p digits m_i of 2n and n_i of n.
std::uint64_t lucas_central_binom_mod(const BigInt& n, std::uint64_t p);

/// True iff p does not divide binom(2n, n), decided by the Lucas residue.
bool lucas_coprime_oracle(const BigInt& n, std::uint64_t p);

} // namespace smalldig
