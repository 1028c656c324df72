#pragma once

// Exponential sums over small-digit families A = {sum c_i g^i : 0 <= c_i < t},
// large-spectrum enumeration with its analytic bound, multi-base spectrum
// vectors, and the compactly supported bump function built from squared
// sinc factors.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "smalldig/bigint.hpp"

namespace smalldig {

struct SmallDigitFamily {
  std::uint64_t g = 2;
  std::uint64_t t = 1; // 1 <= t < g
  std::uint64_t R = 1;

  void validate() const;
  BigInt size() const { return pow_ui(t, R); }
  BigInt modulus() const { return pow_ui(g, R); }
};

struct ExpSum {
  double re = 0.0;
  double im = 0.0;
  double magnitude = 0.0;
};

/// sum_{n in A} e(nk / g^R) as a product of R geometric sums. Each factor uses
/// the exact residue k g^i mod g^R; only the centred ratio r / g^R is ever
/// converted to floating point.
ExpSum exp_sum_product(const SmallDigitFamily& f, const BigInt& k);

inline constexpr std::uint64_t kDirectSumCap = 1'000'000;
/// Literal sum over all t^R elements; refuses when t^R > cap.
ExpSum exp_sum_direct(const SmallDigitFamily& f, const BigInt& k, std::uint64_t cap = kDirectSumCap);

struct SpectrumQuery {
  SmallDigitFamily family;
  // (K, eta) mode: frequencies 0 <= k < g^K, threshold eta.
  std::optional<std::uint64_t> K;
  std::optional<double> eta;
  // (M, delta) mode: frequencies 0 <= k < M, eta = M^-delta.
  std::optional<std::uint64_t> M;
  std::optional<double> delta;

  void validate() const;
  bool k_mode() const { return K.has_value(); }
  double threshold() const;          // eta in either mode
  BigInt frequency_count() const;    // g^K or M
  std::uint64_t effective_K() const; // K, or the least K with g^K >= M
};

struct SpectrumHit {
  std::uint64_t k = 0;
  double magnitude = 0.0;
};

inline constexpr std::uint64_t kSpectrumBudget = 10'000'000;

/// Every k in range with |sum| >= eta |A| (up to a relative 1e-12 slack, so the
/// count can only err upwards), sorted by k.
std::vector<SpectrumHit> large_spectrum_enumerate(const SpectrumQuery& q, std::uint64_t budget = kSpectrumBudget,
                                                  unsigned threads = 1);

struct SpectrumBound {
  double log_bound = 0.0; // natural log of (10/t)^min(R,K) exp(2 sqrt(K log t log(1/eta))) g^K
  double bound = 0.0;     // exp(log_bound), +inf if it overflows
  double second_form_exponent = 0.0; // log_g(10g/t) + 2 sqrt(delta) in the M-parameterisation
};

SpectrumBound spectrum_bound(const SpectrumQuery& q);

struct GammaParams {
  std::vector<SmallDigitFamily> families; // one per base
  std::uint64_t M = 2;                    // ||k||_inf in [M/2, M)
  std::uint64_t h = 1;
  double c2 = 1.0;
  double C1 = 1.0;
  std::vector<double> deltas; // per base; empty means g^-(R+1)
};

struct GammaVector {
  std::vector<std::int64_t> k;
  double magnitude = 0.0; // |1_A^(k)| = prod_j |sum_{A_j} e(n k_j / g_j^R_j)|
};

/// Vectors k != 0 with M/2 <= ||k||_inf < M satisfying both
/// |1_A^(k)| >= c2 ||k||^(-(r+1)/h) |A| and |k_i| <= C1 log(1/delta)^2 / delta_i,
/// delta = min_i delta_i. Enumerated lexicographically.
std::vector<GammaVector> gamma_vectors(const GammaParams& p, std::uint64_t budget = kSpectrumBudget);

// ---------------------------------------------------------------------------
// Bump function

struct BumpParams {
  Rational delta = Rational(1, 10); // width in (0, 1)
  std::uint64_t J = 1;

  void validate() const;
  /// c_j = 1/(4 j^2)
  static Rational coefficient(std::uint64_t j) { return Rational(1, 4 * j * j); }
};

/// sin(pi x) with x reduced exactly; returns exactly 0 at integers.
double sin_pi(const Rational& x);

/// prod_{j <= J} sinc^2(pi c_j delta k); exactly 1 at k = 0.
double bump_fourier_coeff(const BumpParams& p, std::int64_t k);

/// min(1, (J^2 / (delta |k|))^(2J)), 1 at k = 0.
double bump_envelope(const BumpParams& p, std::int64_t k);

struct BumpReport {
  BumpParams params;
  std::uint64_t tail_cap = 0;
  double coeff_sum = 0.0;        // sum over |k| <= tail_cap
  double tail_lower = 0.0;       // certified bounds on the sum over |k| > tail_cap
  double tail_upper = 0.0;
  double target = 0.0;           // 4 / delta
  bool sum_ok = false;           // coeff_sum + tail_upper <= 4/delta + 1e-9
  std::uint64_t envelope_violations = 0;
  std::optional<std::uint64_t> first_violation;
  double max_envelope_ratio = 0.0; // max psi^(k) / envelope(k) over 1 <= k <= cap
  double support_leak = 0.0;       // max |psi(x)| at x in {0.6, 0.75, 0.9} delta and 1/4
  bool leak_ok = false;            // leak <= tail_upper + float slack
  double support_radius = 0.0;     // sum_j c_j delta
};

inline constexpr double kBumpSumTolerance = 1e-9;
inline constexpr double kBumpTailTarget = 1e-10;

/// Certified bounds on sum_{|k| > cap} psi^(k).
std::pair<double, double> bump_tail_bounds(const BumpParams& p, std::uint64_t cap);

/// Least power-of-two-refined cap whose tail uncertainty is below `target`.
std::uint64_t bump_required_tail_cap(const BumpParams& p, double target = kBumpTailTarget);

/// Throws InvalidArgument if the tail uncertainty at `tail_cap` exceeds 1e-6.
BumpReport bump_property_report(const BumpParams& p, std::uint64_t tail_cap);

void to_json(nlohmann::json& j, const BumpReport& r);

} // namespace smalldig
