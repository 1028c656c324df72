#pragma once

// Fractional parts {n / log_L g_j}, power sums sum_j zeta_j g_j^{n / log_L g_j},
// bad-n counts, box-count discrepancy, and the small-linear-form experiment
// for reciprocal logarithms. Everything that feeds a comparison is computed
// with MPFR intervals.

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"

#include "smalldig/bigint.hpp"
#include "smalldig/interval.hpp"

namespace smalldig {

inline constexpr mpfr_prec_t kEquidistPrecision = 192;

class ExponentSystem {
public:
  /// zetas may be empty (meaning all ones) or one per base. Throws unless
  /// gcd(ell, prod g) = 1, h >= 1 and the bases are pairwise multiplicatively
  /// independent (the last check can be waived for synthetic inputs).
  ExponentSystem(std::vector<std::uint64_t> bases, std::uint64_t ell, std::uint64_t h = 1,
                 std::vector<Rational> zetas = {}, bool allow_dependent = false,
                 mpfr_prec_t prec = kEquidistPrecision);

  std::size_t r() const { return bases_.size(); }
  const std::vector<std::uint64_t>& bases() const { return bases_; }
  const std::vector<Rational>& zetas() const { return zetas_; }
  std::uint64_t ell() const { return ell_; }
  std::uint64_t h() const { return h_; }
  BigInt L() const { return pow_ui(ell_, h_); }
  mpfr_prec_t precision() const { return prec_; }

  /// theta_j = 1 / log_L g_j = ln L / ln g_j
  const Interval& theta(std::size_t j) const { return theta_[j]; }
  const Interval& log_base(std::size_t j) const { return log_g_[j]; }

private:
  std::vector<std::uint64_t> bases_;
  std::uint64_t ell_;
  std::uint64_t h_;
  std::vector<Rational> zetas_;
  mpfr_prec_t prec_;
  std::vector<Interval> theta_;
  std::vector<Interval> log_g_;
};

/// Smallest m with g = m^e for some e >= 1.
std::uint64_t minimal_root(std::uint64_t g);

inline constexpr double kFracErrorCap = 1e-12;

/// Enclosures of {n theta_j}; throws Indeterminate if an enclosure straddles
/// an integer or is wider than kFracErrorCap.
std::vector<Interval> frac_exponents(const ExponentSystem& sys, std::uint64_t n);
std::vector<double> frac_exponents_double(const ExponentSystem& sys, std::uint64_t n);

struct NormValue {
  Interval enclosure;
  double value = 0.0; // midpoint
  double error = 0.0; // radius
};

/// || sum_j zeta_j g_j^{ {n theta_j} } ||
NormValue power_sum_norm(const ExponentSystem& sys, std::uint64_t n);

struct CensusRow {
  Rational epsilon;
  std::uint64_t count = 0;         // certainly <= epsilon
  std::uint64_t indeterminate = 0; // enclosure straddles epsilon
};

struct CensusReport {
  std::uint64_t N = 0;
  Rational epsilon;
  std::uint64_t count = 0;
  std::uint64_t indeterminate = 0;
  std::vector<std::uint64_t> hits; // first `list_cap` n with norm <= epsilon
  std::vector<CensusRow> grid;     // includes epsilon itself
  std::optional<double> empirical_exponent; // least-squares slope of log(count/N) on log(eps)
  std::vector<double> residuals;
};

inline constexpr std::uint64_t kCensusBudget = 10'000'000;

/// Scans n = 1..N. The grid defaults to epsilon / 2^i, i = 0..4.
CensusReport bad_n_census(const ExponentSystem& sys, const Rational& epsilon, std::uint64_t N,
                          std::vector<Rational> grid = {}, std::size_t list_cap = 1000,
                          std::uint64_t budget = kCensusBudget, unsigned threads = 1);

struct DiscrepancyReport {
  std::uint64_t N = 0;
  std::uint64_t grid = 0;
  double estimate = 0.0; // max over grid corners of |count/N - volume|
  double bound = 0.0;    // estimate + 1 - (1 - 1/grid)^d
};

/// Anchored-box discrepancy of the points ({n theta_j})_j, n = 0..N-1, over a
/// grid^d lattice of corners; d <= 3.
DiscrepancyReport discrepancy_estimate(const ExponentSystem& sys, std::uint64_t N, std::uint64_t grid);

struct SeparationReport {
  double max_abs = 0.0;
  double delta = 0.0;
  double ratio = 0.0;
};

/// f(t) = sum c_i x_i^t at the 2^(r-1) given points.
SeparationReport power_sum_separation_check(const std::vector<double>& xs, const std::vector<double>& cs,
                                            const std::vector<double>& points);

struct LatticeReport {
  std::uint64_t M = 0;
  std::uint64_t vectors = 0; // (2M+1)^r - 1
  Interval min_norm;
  double min_norm_value = 0.0;
  double min_norm_error = 0.0;
  std::vector<std::int64_t> argmin; // first nonzero coordinate positive
  double reference = 0.0;           // M^-r
};

inline constexpr std::uint64_t kLatticeBudget = 50'000'000;

LatticeReport lattice_min_combination(const ExponentSystem& sys, std::uint64_t M, std::uint64_t budget = kLatticeBudget);

void to_json(nlohmann::json& j, const CensusReport& r);
void to_json(nlohmann::json& j, const DiscrepancyReport& r);
void to_json(nlohmann::json& j, const LatticeReport& r);

} // namespace smalldig
