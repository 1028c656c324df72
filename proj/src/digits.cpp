#include "smalldig/digits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "smalldig/error.hpp"

static_assert(sizeof(unsigned long) == 8, "GMP ui functions are used for 64-bit words");

namespace smalldig {

namespace {

std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

bool is_integer_text(std::string_view s)
{
  if (!s.empty() && (s.front() == '+' || s.front() == '-'))
    s.remove_prefix(1);
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

} // namespace

BigInt parse_bigint(std::string_view text)
{
  text = trim(text);
  // Allow "10^94" as a convenience for huge bases.
  if (auto caret = text.find('^'); caret != std::string_view::npos) {
    const BigInt b = parse_bigint(text.substr(0, caret));
    const BigInt e = parse_bigint(text.substr(caret + 1));
    if (b < 0 || e < 0 || !e.fits_ulong_p())
      fail_invalid("bad power expression: " + std::string(text));
    return pow(b, e.get_ui());
  }
  if (!is_integer_text(text))
    fail_invalid("not an integer: '" + std::string(text) + "'");
  std::string s(text);
  if (s.front() == '+')
    s.erase(0, 1);
  return BigInt(s, 10);
}

Rational parse_rational(std::string_view text)
{
  text = trim(text);
  if (text.find('.') != std::string_view::npos || text.find('e') != std::string_view::npos ||
      text.find('E') != std::string_view::npos)
    fail_invalid("decimal rationals are not accepted, use p/q: '" + std::string(text) + "'");
  Rational q;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const BigInt num = parse_bigint(text.substr(0, slash));
    const BigInt den = parse_bigint(text.substr(slash + 1));
    if (den == 0)
      fail_invalid("zero denominator: '" + std::string(text) + "'");
    q = Rational(num, den);
  } else {
    q = Rational(parse_bigint(text));
  }
  q.canonicalize();
  return q;
}

BigInt pow_ui(std::uint64_t base, std::uint64_t exp)
{
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

BigInt pow(const BigInt& base, std::uint64_t exp)
{
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

BigInt ceil(const Rational& q)
{
  BigInt r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

BigInt floor(const Rational& q)
{
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

std::string to_string(const Rational& q)
{
  return q.get_str();
}

bool fits_u64(const BigInt& n)
{
  return n >= 0 && n.fits_ulong_p();
}

std::uint64_t to_u64(const BigInt& n)
{
  if (!fits_u64(n))
    fail_invalid("value does not fit in 64 bits: " + n.get_str());
  return n.get_ui();
}

BigInt from_u64(std::uint64_t v)
{
  return BigInt(static_cast<unsigned long>(v));
}

double log_double(const BigInt& n)
{
  if (n <= 0)
    fail_invalid("log of non-positive integer");
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

// ---------------------------------------------------------------------------
// BaseSpec

BaseSpec::BaseSpec(BigInt g, Rational kappa) : g_(std::move(g)), kappa_(std::move(kappa))
{
  kappa_.canonicalize();
  if (g_ < 2)
    fail_invalid("base must be >= 2, got " + g_.get_str());
  if (kappa_ <= 0 || kappa_ > 1)
    fail_invalid("kappa must lie in (0, 1], got " + kappa_.get_str());
  alphabet_ = ceil(Rational(kappa_ * g_));
  small_bound_ = alphabet_.fits_ulong_p() ? alphabet_.get_ui() : std::numeric_limits<std::uint64_t>::max();
}

BaseSpec BaseSpec::parse(std::string_view text)
{
  text = trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    return BaseSpec(parse_bigint(text), Rational(1, 2));
  return BaseSpec(parse_bigint(text.substr(0, colon)), parse_rational(text.substr(colon + 1)));
}

std::vector<BaseSpec> BaseSpec::parse_list(std::string_view text)
{
  std::vector<BaseSpec> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    if (trim(item).empty())
      fail_invalid("empty base spec in list");
    out.push_back(parse(item));
    if (comma == std::string_view::npos)
      break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty())
    fail_invalid("empty base spec list");
  return out;
}

std::uint64_t BaseSpec::radix() const
{
  if (!fits_u64(g_))
    fail_invalid("base " + g_.get_str() + " is too large for digit expansion");
  return g_.get_ui();
}

std::uint64_t BaseSpec::alphabet_u64() const
{
  return to_u64(alphabet_);
}

std::string BaseSpec::to_string() const
{
  return g_.get_str() + ":" + kappa_.get_str();
}

bool operator==(const BaseSpec& a, const BaseSpec& b)
{
  return a.base() == b.base() && a.kappa() == b.kappa();
}

// ---------------------------------------------------------------------------
// DigitVector

std::string DigitVector::render() const
{
  std::string out = "(";
  if (digits.empty())
    out += '0';
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (*it < 10)
      out += static_cast<char>('0' + *it);
    else
      out += "[" + std::to_string(*it) + "]";
  }
  out += ")_" + std::to_string(base);
  return out;
}

bool operator==(const DigitVector& a, const DigitVector& b)
{
  return a.base == b.base && a.digits == b.digits;
}

DigitVector to_digits(std::uint64_t n, std::uint64_t g)
{
  if (g < 2)
    fail_invalid("base must be >= 2");
  DigitVector out{g, {}};
  while (n != 0) {
    out.digits.push_back(n % g);
    n /= g;
  }
  return out;
}

DigitVector to_digits(const BigInt& n, std::uint64_t g)
{
  if (g < 2)
    fail_invalid("base must be >= 2");
  if (n < 0)
    fail_invalid("cannot expand a negative integer");
  if (n.fits_ulong_p())
    return to_digits(static_cast<std::uint64_t>(n.get_ui()), g);

  // Peel off chunks of g^m < 2^64 so the inner loop runs on machine words.
  unsigned m = 1;
  std::uint64_t chunk = g;
  while (chunk <= std::numeric_limits<std::uint64_t>::max() / g) {
    chunk *= g;
    ++m;
  }
  DigitVector out{g, {}};
  BigInt q = n;
  while (q != 0) {
    std::uint64_t rem = mpz_tdiv_q_ui(q.get_mpz_t(), q.get_mpz_t(), chunk);
    if (q == 0) {
      while (rem != 0) {
        out.digits.push_back(rem % g);
        rem /= g;
      }
    } else {
      for (unsigned i = 0; i < m; ++i) {
        out.digits.push_back(rem % g);
        rem /= g;
      }
    }
  }
  return out;
}

BigInt from_digits(const DigitVector& d)
{
  if (d.base < 2)
    fail_invalid("base must be >= 2");
  BigInt acc = 0;
  for (auto it = d.digits.rbegin(); it != d.digits.rend(); ++it) {
    if (*it >= d.base)
      fail_invalid("digit " + std::to_string(*it) + " out of range for base " + std::to_string(d.base));
    acc *= static_cast<unsigned long>(d.base);
    acc += static_cast<unsigned long>(*it);
  }
  return acc;
}

std::size_t large_digit_count(const DigitVector& d, const BaseSpec& spec)
{
  if (d.base != spec.radix())
    fail_invalid("digit vector base does not match spec");
  return static_cast<std::size_t>(
      std::count_if(d.digits.begin(), d.digits.end(), [&](Digit x) { return spec.is_large(x); }));
}

std::size_t large_digit_count(const BigInt& n, const BaseSpec& spec)
{
  return large_digit_count(to_digits(n, spec.radix()), spec);
}

bool all_digits_below(std::uint64_t n, std::uint64_t g, std::uint64_t alphabet)
{
  while (n != 0) {
    if (n % g >= alphabet)
      return false;
    n /= g;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Windows

std::vector<std::size_t> window_positions(std::uint64_t g, const Rational& lo, const Rational& hi)
{
  if (g < 2)
    fail_invalid("base must be >= 2");
  if (lo <= 0)
    fail_invalid("window lower bound must be positive");
  if (lo > hi)
    fail_invalid("empty window: lo > hi");
  std::vector<std::size_t> out;
  BigInt power = 1;
  for (std::size_t k = 0;; ++k) {
    if (cmp(Rational(power), hi) > 0)
      break;
    if (cmp(Rational(power), lo) >= 0)
      out.push_back(k);
    power *= static_cast<unsigned long>(g);
  }
  return out;
}

DigitWindowReport digit_window(const DigitVector& d, const BaseSpec& spec, const Rational& lo, const Rational& hi)
{
  if (d.base != spec.radix())
    fail_invalid("digit vector base does not match spec");
  DigitWindowReport rep{spec, lo, hi, window_positions(d.base, lo, hi), {}};
  for (std::size_t k : rep.positions)
    if (spec.is_large(d.at(k)))
      rep.large_positions.push_back(k);
  return rep;
}

DigitWindowReport digit_window(const BigInt& n, const BaseSpec& spec, const Rational& lo, const Rational& hi)
{
  return digit_window(to_digits(n, spec.radix()), spec, lo, hi);
}

std::vector<BaseProfile> multi_base_profile(const BigInt& n, std::span<const BaseSpec> specs)
{
  std::vector<BaseProfile> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    BaseProfile p{spec, to_digits(n, spec.radix()), 0, 0};
    p.total = p.digits.size();
    p.large = large_digit_count(p.digits, spec);
    out.push_back(std::move(p));
  }
  return out;
}

void to_json(nlohmann::json& j, const DigitVector& d)
{
  j = nlohmann::json{{"base", d.base}, {"digits_lsb", d.digits}};
}

void from_json(const nlohmann::json& j, DigitVector& d)
{
  d.base = j.at("base").get<std::uint64_t>();
  d.digits = j.at("digits_lsb").get<std::vector<Digit>>();
  if (d.base < 2)
    fail_invalid("base must be >= 2");
  for (Digit x : d.digits)
    if (x >= d.base)
      fail_invalid("digit out of range in JSON digit vector");
  if (!d.digits.empty() && d.digits.back() == 0)
    fail_invalid("non-canonical digit vector: most significant digit is zero");
}

void to_json(nlohmann::json& j, const BaseSpec& s)
{
  j = nlohmann::json{{"g", s.base().get_str()}, {"kappa", s.kappa().get_str()}};
}

} // namespace smalldig
