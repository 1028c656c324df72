#pragma once

// Constructive engines for integers whose digits are small in several bases
// at once:
//
//  * the two-base greedy repair: start from g1^N and clear large base-g2
//    digits from the top down by adding ever smaller powers of g1;
//  * the top-down block construction: choose base-L digits s_N, ..., s_0 so
//    that each choice forces a window of digits to be small in every base.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "smalldig/bigint.hpp"
#include "smalldig/digits.hpp"

namespace smalldig {

// ---------------------------------------------------------------------------
// Two-base greedy repair

/// Order in which admissible powers g1^e are tried for an offending base-g2
/// digit at position m (admissible: g2^m <= g1^e < g2^(m+1) and e below the
/// previously added exponent).
enum class EgrsPolicy {
  kSmallestFirst, // reproduces the worked base-3/base-5 example
  kLargestFirst,
};

std::string to_string(EgrsPolicy p);
EgrsPolicy parse_egrs_policy(std::string_view s);

struct EgrsStep {
  std::uint64_t exponent = 0;      // power g1^exponent was added ...
  std::uint64_t multiplicity = 0;  // ... this many times
  std::size_t offender_position = 0; // highest large base-g2 digit before the step
  BigInt value;                    // value after the step
};

struct RepairOutcome {
  enum class Kind { kNoOffender, kStep, kDeadEnd };
  Kind kind = Kind::kNoOffender;
  std::size_t offender_position = 0; // meaningful unless kNoOffender
  EgrsStep step;                     // meaningful for kStep
};

/// Highest position holding a large digit, if any.
std::optional<std::size_t> highest_large_digit(const DigitVector& d, const BaseSpec& spec);

/// Every admissible move for `current`, in policy order. A move adds c copies
/// of g1^e, with c the least multiplicity (at most min(g2 - 1, alphabet1 - 1))
/// after which no base-g2 digit at or above the offender is large.
std::vector<EgrsStep> egrs_candidates(const BigInt& current, const BaseSpec& s1, const BaseSpec& s2,
                                      EgrsPolicy policy, std::optional<std::uint64_t> exponent_bound);

/// One greedy move. `exponent_bound` is the exponent added by the previous
/// step (moves must use strictly smaller exponents).
RepairOutcome egrs_repair_step(const BigInt& current, const BaseSpec& s1, const BaseSpec& s2,
                               EgrsPolicy policy, std::optional<std::uint64_t> exponent_bound = std::nullopt);

struct EgrsTrace {
  BaseSpec spec1;
  BaseSpec spec2;
  std::uint64_t start_exponent = 0;
  EgrsPolicy policy = EgrsPolicy::kSmallestFirst;
  std::uint64_t step_budget = 0;
  std::uint64_t nodes_expanded = 0;
  bool condition_holds = false; // the two-base sufficient condition, evaluated exactly
  bool success = false;
  std::vector<EgrsStep> steps; // successful path, or the path to the best partial value
  BigInt final_value;          // on failure: best partial value seen
  std::size_t large1 = 0;
  std::size_t large2 = 0;
};

inline constexpr std::uint64_t kDefaultEgrsBudget = 100000;

/// Depth-first search over greedy moves from g1^N with backtracking; stops at
/// the first value with every digit small in both bases or when the number of
/// expanded nodes reaches `step_budget`.
EgrsTrace egrs_construct(const BaseSpec& s1, const BaseSpec& s2, std::uint64_t start_exponent,
                         std::uint64_t step_budget = kDefaultEgrsBudget,
                         EgrsPolicy policy = EgrsPolicy::kSmallestFirst);

void to_json(nlohmann::json& j, const EgrsTrace& t);

// ---------------------------------------------------------------------------
// Block construction

struct BlockConfig {
  std::vector<BaseSpec> specs;
  std::uint64_t ell = 2;
  std::uint64_t h = 1;          // L = ell^h
  std::uint64_t H = 2;          // shifts range over [1, H]
  Rational c_pad = Rational(8); // window padding constant, >= 1
  std::uint64_t N = 1;          // top block index
  unsigned threads = 1;

  BigInt L() const { return pow_ui(ell, h); }
  /// Throws InvalidArgument unless gcd(ell, prod g_j) = 1, h >= 1, H >= L,
  /// c_pad >= 1 and every base fits a machine word.
  void validate() const;
};

inline constexpr std::uint64_t kMaxShiftScan = 100'000'000;

/// Search window for block n: [c_pad L^n, L^(n+1) / c_pad].
std::pair<Rational, Rational> shift_window(const BlockConfig& cfg, std::uint64_t n);
/// Audit window I_n = [c_pad (H/L) L^n, L^(n+1) / c_pad] (may be empty).
std::pair<Rational, Rational> audit_window(const BlockConfig& cfg, std::uint64_t n);
/// Exponents k with lo <= g^k <= hi; empty when lo > hi.
std::vector<std::size_t> positions_in(std::uint64_t g, const Rational& lo, const Rational& hi);

/// Least s in [1, H] such that every base-g_j digit of s L^n + beta whose
/// place value lies in the search window is small, for all j. nullopt when no
/// shift works.
std::optional<std::uint64_t> block_find_shift(std::uint64_t n, const BigInt& beta, const BlockConfig& cfg);

struct BaseAudit {
  BaseSpec spec;
  std::size_t total_digits = 0;
  std::size_t large_total = 0;
  std::size_t sharp_positions = 0; // in I_n for a good block n
  std::size_t sharp_large = 0;
  std::size_t flat_positions = 0;  // in I_n for a bad block n
  std::size_t flat_large = 0;
  std::size_t fringe_positions = 0; // in no I_n
  std::size_t fringe_large = 0;
  std::size_t max_window_positions = 0;
  // Large digits of b_{>=n} inside the search window of each good block; the
  // construction guarantees zero.
  std::size_t search_window_violations = 0;
  double bad_fraction = 0.0;   // large_total / total_digits
  double fraction_bound = 0.0; // (flat_positions + fringe_positions) / total_digits
};

struct BlockTrace {
  BlockConfig config;
  std::vector<std::uint64_t> shifts; // shifts[n] = s_n for n = 0..N
  std::vector<std::uint64_t> good_blocks;
  std::vector<std::uint64_t> bad_blocks;
  BigInt b;
  std::vector<BaseAudit> audits;
  bool in_range = false; // L^N <= b <= H L^(N+1)
};

/// b_{>=d} = sum_{d <= i <= N} s_i L^i.
BigInt block_prefix(const BlockTrace& t, std::uint64_t d);

BlockTrace block_construct(const BlockConfig& cfg);

/// Digits of b and b_{>=n} agree at every position k with
/// g^k > g H L^n / (L - 1).
bool stability_check(const BlockTrace& t, std::uint64_t n, const BaseSpec& spec);

void to_json(nlohmann::json& j, const BlockTrace& t);

/// One block per base: the expansion most significant digit first, with a
/// marker line flagging large digits.
std::string render_digit_grid(const BigInt& n, std::span<const BaseSpec> specs);

} // namespace smalldig
