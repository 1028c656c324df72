#pragma once

// Thin helpers around GMP's C++ classes. All integers that can grow without
// bound (the numbers being expanded, block sums, thresholds) are mpz_class;
// thresholds kappa are exact mpq_class.

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace smalldig {

using BigInt = mpz_class;
using Rational = mpq_class;

BigInt parse_bigint(std::string_view text);

// Accepts "p/q" or a plain integer "p"; decimal points are rejected so that
// no threshold is silently rounded.
Rational parse_rational(std::string_view text);

BigInt pow_ui(std::uint64_t base, std::uint64_t exp);
BigInt pow(const BigInt& base, std::uint64_t exp);

// ceil(q) for a rational q
BigInt ceil(const Rational& q);
BigInt floor(const Rational& q);

inline std::string to_string(const BigInt& n) { return n.get_str(); }
std::string to_string(const Rational& q);

bool fits_u64(const BigInt& n);
std::uint64_t to_u64(const BigInt& n);
BigInt from_u64(std::uint64_t v);

// Natural logarithm of a positive integer in double precision (handles values
// far beyond the double range).
double log_double(const BigInt& n);

} // namespace smalldig
