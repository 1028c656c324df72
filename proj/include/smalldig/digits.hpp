#pragma once

// Exact positional expansions of arbitrary-precision integers, windowed digit
// statistics and multi-base profiles.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "smalldig/bigint.hpp"

namespace smalldig {

using Digit = std::uint64_t;

/// A base g >= 2 together with a smallness threshold kappa in (0, 1].
///
/// A digit d is small iff d < kappa*g, compared exactly. Since digits are
/// integers this is the same as d < ceil(kappa*g), so the number of small
/// digits (the alphabet) is ceil(kappa*g). When kappa*g is an integer the
/// comparison stays strict: for g = 4, kappa = 1/2 the digit 2 is large.
///
/// The base itself is arbitrary precision because threshold conditions are
/// evaluated for bases such as 10^94; digit expansions need radix() to fit
/// in a machine word.
class BaseSpec {
public:
  BaseSpec(BigInt g, Rational kappa);
  BaseSpec(std::uint64_t g, Rational kappa) : BaseSpec(BigInt(static_cast<unsigned long>(g)), std::move(kappa)) {}

  /// Parses "g:p/q" (or "g" alone, meaning kappa = 1/2).
  static BaseSpec parse(std::string_view text);
  static std::vector<BaseSpec> parse_list(std::string_view text);

  const BigInt& base() const { return g_; }
  const Rational& kappa() const { return kappa_; }
  /// ceil(kappa * g): the number of small digits.
  const BigInt& alphabet() const { return alphabet_; }

  /// The base as a machine word; throws InvalidArgument if it does not fit.
  std::uint64_t radix() const;
  std::uint64_t alphabet_u64() const;

  bool is_small(Digit d) const { return d < small_bound_; }
  bool is_large(Digit d) const { return !is_small(d); }

  std::string to_string() const;

private:
  BigInt g_;
  Rational kappa_;
  BigInt alphabet_;
  std::uint64_t small_bound_ = 0; // alphabet if it fits, else saturated
};

bool operator==(const BaseSpec& a, const BaseSpec& b);

/// Digits of a non-negative integer, least significant first. Zero is the
/// empty sequence; there is never a most-significant zero.
struct DigitVector {
  std::uint64_t base = 10;
  std::vector<Digit> digits;

  std::size_t size() const { return digits.size(); }
  bool is_zero() const { return digits.empty(); }
  Digit at(std::size_t k) const { return k < digits.size() ? digits[k] : 0; }

  /// Renders as "(d_m...d_1d_0)_g". Digits >= 10 are bracketed, e.g. "(1[12]0)_13".
  std::string render() const;
};

bool operator==(const DigitVector& a, const DigitVector& b);

DigitVector to_digits(const BigInt& n, std::uint64_t g);
DigitVector to_digits(std::uint64_t n, std::uint64_t g);

/// Validates every digit and reconstructs by Horner's rule.
BigInt from_digits(const DigitVector& d);

std::size_t large_digit_count(const DigitVector& d, const BaseSpec& spec);
std::size_t large_digit_count(const BigInt& n, const BaseSpec& spec);

/// Fast path for machine-word values: true iff every base-g digit of n is
/// below `alphabet`.
bool all_digits_below(std::uint64_t n, std::uint64_t g, std::uint64_t alphabet);

struct DigitWindowReport {
  BaseSpec spec;
  Rational lo;
  Rational hi;
  std::vector<std::size_t> positions;       // every k with lo <= g^k <= hi
  std::vector<std::size_t> large_positions; // subset with digit >= kappa*g
};

/// Exponents k with lo <= g^k <= hi. Throws if lo > hi or lo <= 0.
std::vector<std::size_t> window_positions(std::uint64_t g, const Rational& lo, const Rational& hi);

DigitWindowReport digit_window(const BigInt& n, const BaseSpec& spec, const Rational& lo, const Rational& hi);
DigitWindowReport digit_window(const DigitVector& d, const BaseSpec& spec, const Rational& lo, const Rational& hi);

struct BaseProfile {
  BaseSpec spec;
  DigitVector digits;
  std::size_t total = 0;
  std::size_t large = 0;
};

std::vector<BaseProfile> multi_base_profile(const BigInt& n, std::span<const BaseSpec> specs);

void to_json(nlohmann::json& j, const DigitVector& d);
void from_json(const nlohmann::json& j, DigitVector& d);
void to_json(nlohmann::json& j, const BaseSpec& s);

} // namespace smalldig
