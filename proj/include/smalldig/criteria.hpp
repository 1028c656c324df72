#pragma once

// Threshold conditions on (g_j, kappa_j):
//
//   conjecture:  sum_j log_{g_j}(g_j / ceil(kappa_j g_j))                 < 1
//   theorem:     sum_j log_{g_j}(320 r^5 / kappa_j)                       < 1/(2r)
//   prop:        sum_j log_{g_j}(10 g_j / ceil(kappa_j g_j / (32 r^5)))   < 1/(2r)
//   two-base:    (ceil(k1 g1) - 1)/(g1 - 1) + (ceil(k2 g2) - 1)/(g2 - 1) >= 1
//
// Sums are enclosed in 256-bit MPFR intervals. When every term is an exact
// rational (log_g x with x and g powers of a common integer) the comparison is
// decided exactly; otherwise an enclosure within 1e-20 of the threshold is
// reported indeterminate.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "smalldig/bigint.hpp"
#include "smalldig/digits.hpp"
#include "smalldig/interval.hpp"

namespace smalldig {

inline constexpr mpfr_prec_t kCriteriaPrecision = 256;

enum class Verdict { kSatisfied, kNotSatisfied, kIndeterminate };
std::string to_string(Verdict v);

enum class ConditionKind { kConjecture, kTheorem, kProp, kTwoBase };
std::string to_string(ConditionKind k);
ConditionKind parse_condition_kind(std::string_view s);

struct ConditionTerm {
  BaseSpec spec;
  Rational argument; // x in log_g(x); for the two-base condition the term itself
  Interval value;
  std::optional<Rational> exact;
};

struct ConditionReport {
  ConditionKind kind = ConditionKind::kConjecture;
  Interval value;
  std::optional<Rational> exact;
  Rational threshold;
  bool strict = true; // value < threshold; otherwise value >= threshold
  Verdict verdict = Verdict::kIndeterminate;
  std::vector<ConditionTerm> terms;

  double value_double() const { return value.mid_double(); }
  std::string value_digits(int digits = 30) const { return value.to_string(digits); }
};

inline constexpr double kIndeterminateWindow = 1e-20;

/// log_g(x) as an exact rational when x and g are powers of a common integer.
std::optional<Rational> exact_log(const Rational& x, const BigInt& g);

ConditionReport conjecture_sum(std::span<const BaseSpec> specs);
/// r must equal specs.size().
ConditionReport theorem_sum(std::span<const BaseSpec> specs, std::uint64_t r);
ConditionReport prop_sum(std::span<const BaseSpec> specs, std::uint64_t r);
/// Requires kappa_i >= 1/g_i.
ConditionReport egrs_condition(const BaseSpec& s1, const BaseSpec& s2);

ConditionReport evaluate_condition(ConditionKind kind, std::span<const BaseSpec> specs);

struct ThresholdReport {
  ConditionKind kind = ConditionKind::kTheorem;
  std::uint64_t r = 1;
  Rational kappa;
  std::optional<BigInt> min_g;
  std::optional<std::uint64_t> min_power_of_ten; // least m with g = 10^m satisfying
  bool exhaustive = false; // min_g found by a complete scan (no monotonicity assumed)
  bool monotone = false;   // the equal-base inequality is monotone in g for this kind
  std::vector<std::uint64_t> nonmonotone_examples; // g satisfying with g+1 failing, from the scan
};

inline constexpr std::uint64_t kThresholdLinearScan = 1'000'000;
inline constexpr std::uint64_t kPowerOfTenCap = 100'000;

/// Equal-base inequality g_1 = ... = g_r = g decided in integer arithmetic.
bool equal_base_holds(ConditionKind kind, std::uint64_t r, const Rational& kappa, const BigInt& g);

ThresholdReport equal_base_threshold(std::uint64_t r, const Rational& kappa, ConditionKind kind);

void to_json(nlohmann::json& j, const ConditionReport& c);
void to_json(nlohmann::json& j, const ThresholdReport& t);

} // namespace smalldig
