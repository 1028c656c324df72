#pragma once

// Enumeration of integers whose digits are all small in one base (an
// odometer over the restricted alphabet), multi-base filtering with a
// resumable prefix-partitioned driver, density fits, and the census of n
// with binom(2n, n) coprime to a set of primes.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "smalldig/bigint.hpp"
#include "smalldig/digits.hpp"

namespace smalldig {

inline constexpr std::uint64_t kStreamBudget = 200'000'000;

/// Number of n in [0, limit) whose base-g digits are all small (digit DP).
BigInt count_small_below(const BaseSpec& spec, const BigInt& limit);

/// Calls `visit` for every n in [0, limit) with all digits small, ascending.
/// Throws BudgetExceeded if more than `budget` values would be produced.
void enumerate_small(const BaseSpec& spec, std::uint64_t limit, const std::function<void(std::uint64_t)>& visit,
                     std::uint64_t budget = kStreamBudget);
std::vector<std::uint64_t> enumerate_small(const BaseSpec& spec, std::uint64_t limit,
                                           std::uint64_t budget = kStreamBudget);

/// Index of the base whose stream below a large limit is sparsest: least
/// log(alphabet) / log(g).
std::size_t default_driver(std::span<const BaseSpec> specs);

struct SearchSpec {
  std::vector<BaseSpec> specs;
  std::uint64_t limit = 1; // search [0, limit)
  std::optional<std::size_t> driver;
  bool include_zero = true;
  unsigned threads = 1;
  std::uint64_t budget = kStreamBudget;

  void validate() const;
  std::size_t driver_index() const { return driver ? *driver : default_driver(specs); }
  nlohmann::json to_json() const;
};

struct CheckpointOptions {
  std::string path;                   // empty: no checkpointing
  bool resume = false;                // load `path` first if it exists
  std::uint64_t every = 64;           // prefixes between writes
  std::optional<std::uint64_t> stop_after; // process at most this many prefixes this session
};

struct SearchResult {
  std::vector<std::uint64_t> hits;
  std::uint64_t candidates = 0; // driver values examined this session
  std::uint64_t prefixes_total = 0;
  std::uint64_t prefixes_done = 0;
  bool complete = false;
  std::string digest; // FNV-1a of the comma-joined hit list
};

SearchResult multi_base_search(const SearchSpec& ss, const CheckpointOptions& ck = {});

/// Straightforward filter of every n in [0, limit); test oracle.
std::vector<std::uint64_t> brute_force_search(std::span<const BaseSpec> specs, std::uint64_t limit);

std::string hits_digest(std::span<const std::uint64_t> hits);

/// n, then per base the rendered digits and the large-digit count.
std::string hits_csv(std::span<const std::uint64_t> hits, std::span<const BaseSpec> specs);

struct DensityReport {
  std::vector<std::uint64_t> Ns;
  std::vector<std::uint64_t> counts;
  std::vector<double> exponents;          // log(count) / log(N)
  std::optional<double> fitted_exponent;  // least-squares slope of log count on log N
  double heuristic_exponent = 0.0;        // sum_j log_{g_j} ceil(kappa_j g_j) - (r - 1)
};

DensityReport density_vs_heuristic(std::span<const BaseSpec> specs, std::vector<std::uint64_t> Ns, unsigned threads = 1,
                                   std::uint64_t budget = kStreamBudget);

struct GrahamCensus {
  std::uint64_t limit = 0;
  std::vector<std::uint64_t> primes;
  std::vector<std::uint64_t> hits; // n in [1, limit] with every valuation zero
};

GrahamCensus graham_census(std::uint64_t limit, std::vector<std::uint64_t> primes = {3, 5, 7},
                           std::uint64_t budget = kStreamBudget);

} // namespace smalldig
