#include "smalldig/searcher.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "smalldig/error.hpp"
#include "smalldig/fnv.hpp"
#include "smalldig/kummer.hpp"

namespace smalldig {

BigInt count_small_below(const BaseSpec& spec, const BigInt& limit)
{
  if (limit <= 0)
    return 0;
  const DigitVector d = to_digits(limit, spec.radix());
  const BigInt a = spec.alphabet();
  // walk the digits of limit from the top; stay tight while they are small
  BigInt count = 0;
  for (std::size_t i = d.size(); i-- > 0;) {
    const BigInt di = from_u64(d.digits[i]);
    count += (di < a ? di : a) * pow(a, i);
    if (di >= a)
      return count;
  }
  return count;
}

namespace {

std::uint64_t checked_limit(const BaseSpec& spec, std::uint64_t limit, std::uint64_t budget)
{
  const BigInt c = count_small_below(spec, from_u64(limit));
  if (c > from_u64(budget))
    fail_budget("stream of " + c.get_str() + " small-digit values exceeds the budget");
  return c.get_ui();
}

// Odometer over k base-g digits drawn from [0, a), calling visit(offset + s)
// in increasing order of s while offset + s < limit. Returns false if the
// limit was reached.
template <class F>
bool odometer(std::uint64_t g, std::uint64_t a, std::size_t k, std::uint64_t offset, std::uint64_t limit, F&& visit)
{
  std::vector<std::uint64_t> digit(k + 1, 0);
  std::vector<std::uint64_t> place(k + 1, 1);
  for (std::size_t i = 1; i <= k; ++i)
    place[i] = place[i - 1] * g;
  std::uint64_t v = offset;
  while (true) {
    if (v >= limit)
      return false;
    visit(v);
    std::size_t i = 0;
    while (i < k && digit[i] == a - 1) {
      v -= (a - 1) * place[i];
      digit[i] = 0;
      ++i;
    }
    if (i == k)
      return true;
    ++digit[i];
    v += place[i];
  }
}

std::size_t digit_count(std::uint64_t n, std::uint64_t g)
{
  std::size_t k = 0;
  for (; n; n /= g)
    ++k;
  return k;
}

} // namespace

void enumerate_small(const BaseSpec& spec, std::uint64_t limit, const std::function<void(std::uint64_t)>& visit,
                     std::uint64_t budget)
{
  checked_limit(spec, limit, budget);
  if (limit == 0)
    return;
  const std::uint64_t g = spec.radix();
  const std::uint64_t a = std::min(spec.alphabet_u64(), g);
  odometer(g, a, digit_count(limit - 1, g), 0, limit, visit);
}

std::vector<std::uint64_t> enumerate_small(const BaseSpec& spec, std::uint64_t limit, std::uint64_t budget)
{
  std::vector<std::uint64_t> out;
  out.reserve(checked_limit(spec, limit, budget));
  enumerate_small(spec, limit, [&](std::uint64_t n) { out.push_back(n); }, budget);
  return out;
}

std::size_t default_driver(std::span<const BaseSpec> specs)
{
  if (specs.empty())
    fail_invalid("no bases given");
  std::size_t best = 0;
  double best_density = 2.0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const double dens = log_double(specs[i].alphabet()) / log_double(specs[i].base());
    if (dens < best_density) {
      best_density = dens;
      best = i;
    }
  }
  return best;
}

void SearchSpec::validate() const
{
  if (specs.empty())
    fail_invalid("search needs at least one base");
  for (const auto& s : specs)
    s.radix();
  if (limit < 1)
    fail_invalid("limit must be >= 1");
  if (driver && *driver >= specs.size())
    fail_invalid("driver base index out of range");
  if (threads == 0)
    fail_invalid("threads must be >= 1");
}

nlohmann::json SearchSpec::to_json() const
{
  return nlohmann::json{{"specs", specs},
                        {"limit", limit},
                        {"driver", driver_index()},
                        {"include_zero", include_zero}};
}

std::string hits_digest(std::span<const std::uint64_t> hits)
{
  std::string joined;
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (i)
      joined += ',';
    joined += std::to_string(hits[i]);
  }
  return fnv1a_hex(joined);
}

namespace {

void write_checkpoint(const std::string& path, const nlohmann::json& spec, std::size_t k, std::uint64_t cursor,
                      const std::vector<std::uint64_t>& hits)
{
  nlohmann::json j{{"format", "smalldig-search-checkpoint/1"},
                   {"spec", spec},
                   {"suffix_digits", k},
                   {"cursor", cursor},
                   {"hits", hits},
                   {"digest", hits_digest(hits)}};
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp);
    if (!os)
      fail_invalid("cannot write checkpoint " + tmp);
    os << j.dump(1) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

} // namespace

SearchResult multi_base_search(const SearchSpec& ss, const CheckpointOptions& ck)
{
  ss.validate();
  const std::size_t di = ss.driver_index();
  const BaseSpec& drv = ss.specs[di];
  const std::uint64_t g = drv.radix();
  const std::uint64_t a = std::min(drv.alphabet_u64(), g);
  checked_limit(drv, ss.limit, ss.budget);

  struct Other {
    std::uint64_t g, a;
  };
  std::vector<Other> others;
  for (std::size_t i = 0; i < ss.specs.size(); ++i)
    if (i != di)
      others.push_back({ss.specs[i].radix(), ss.specs[i].alphabet_u64()});

  // Split the driver space by its top digits: prefix p covers
  // [p g^k, (p+1) g^k). About six top digits are left to the prefix.
  const std::size_t D = digit_count(ss.limit - 1, g);
  std::size_t top = 0;
  for (std::uint64_t span = 1; span < 64 && top < D; span *= std::max<std::uint64_t>(a, 2))
    ++top;
  const std::size_t k = D - top;
  std::uint64_t gk = 1;
  for (std::size_t i = 0; i < k; ++i)
    gk *= g;
  const std::vector<std::uint64_t> prefixes = enumerate_small(drv, (ss.limit - 1) / gk + 1, ss.budget);

  SearchResult res;
  res.prefixes_total = prefixes.size();
  const nlohmann::json spec_json = ss.to_json();
  std::uint64_t cursor = 0;
  if (!ck.path.empty() && ck.resume && std::filesystem::exists(ck.path)) {
    std::ifstream is(ck.path);
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      fail_invalid(std::string("unreadable checkpoint: ") + e.what());
    }
    if (j.value("format", "") != "smalldig-search-checkpoint/1")
      fail_invalid("not a search checkpoint: " + ck.path);
    if (j.at("spec") != spec_json || j.at("suffix_digits").get<std::size_t>() != k)
      fail_invalid("checkpoint was written for a different search");
    res.hits = j.at("hits").get<std::vector<std::uint64_t>>();
    if (hits_digest(res.hits) != j.at("digest").get<std::string>())
      fail_invalid("checkpoint hit digest mismatch");
    cursor = j.at("cursor").get<std::uint64_t>();
    if (cursor > prefixes.size())
      fail_invalid("checkpoint cursor out of range");
  }

  std::uint64_t end = prefixes.size();
  if (ck.stop_after)
    end = std::min<std::uint64_t>(end, cursor + *ck.stop_after);
  const unsigned T = ss.threads;
  std::atomic<std::uint64_t> candidates{0};
  std::uint64_t last_write = cursor;

  while (cursor < end) {
    const std::uint64_t batch = std::min<std::uint64_t>(end - cursor, std::max<std::uint64_t>(4ULL * T, ck.every));
    std::vector<std::vector<std::uint64_t>> slot(batch);
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
      std::uint64_t local = 0;
      for (std::uint64_t i; (i = next.fetch_add(1)) < batch;) {
        const std::uint64_t base = prefixes[cursor + i] * gk;
        auto& out = slot[i];
        odometer(g, a, k, base, ss.limit, [&](std::uint64_t n) {
          ++local;
          for (const auto& o : others)
            if (!all_digits_below(n, o.g, o.a))
              return;
          if (n == 0 && !ss.include_zero)
            return;
          out.push_back(n);
        });
      }
      candidates += local;
    };
    if (T == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < T; ++w)
        pool.emplace_back(work);
      for (auto& th : pool)
        th.join();
    }
    for (auto& s : slot)
      res.hits.insert(res.hits.end(), s.begin(), s.end());
    cursor += batch;
    if (!ck.path.empty() && (cursor - last_write >= ck.every || cursor == end)) {
      write_checkpoint(ck.path, spec_json, k, cursor, res.hits);
      last_write = cursor;
    }
  }
  res.candidates = candidates;
  res.prefixes_done = cursor;
  res.complete = cursor == prefixes.size();
  res.digest = hits_digest(res.hits);
  return res;
}

std::vector<std::uint64_t> brute_force_search(std::span<const BaseSpec> specs, std::uint64_t limit)
{
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 0; n < limit; ++n) {
    bool ok = true;
    for (const auto& s : specs)
      if (large_digit_count(to_digits(n, s.radix()), s) != 0) {
        ok = false;
        break;
      }
    if (ok)
      out.push_back(n);
  }
  return out;
}

std::string hits_csv(std::span<const std::uint64_t> hits, std::span<const BaseSpec> specs)
{
  std::ostringstream os;
  os << "n";
  for (const auto& s : specs)
    os << ",digits_" << s.base().get_str();
  for (const auto& s : specs)
    os << ",large_" << s.base().get_str();
  os << '\n';
  for (auto n : hits) {
    os << n;
    std::vector<std::size_t> large;
    for (const auto& s : specs) {
      const DigitVector d = to_digits(n, s.radix());
      os << ',' << d.render();
      large.push_back(large_digit_count(d, s));
    }
    for (auto l : large)
      os << ',' << l;
    os << '\n';
  }
  return os.str();
}

DensityReport density_vs_heuristic(std::span<const BaseSpec> specs, std::vector<std::uint64_t> Ns, unsigned threads,
                                   std::uint64_t budget)
{
  if (Ns.empty())
    fail_invalid("density needs at least one N");
  std::sort(Ns.begin(), Ns.end());
  Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());
  if (Ns.front() < 2)
    fail_invalid("every N must be >= 2");
  SearchSpec ss;
  ss.specs.assign(specs.begin(), specs.end());
  ss.limit = Ns.back();
  ss.threads = threads;
  ss.budget = budget;
  const SearchResult res = multi_base_search(ss);

  DensityReport rep;
  rep.Ns = Ns;
  std::vector<std::pair<double, double>> pts;
  for (auto N : Ns) {
    const auto c = static_cast<std::uint64_t>(std::lower_bound(res.hits.begin(), res.hits.end(), N) - res.hits.begin());
    rep.counts.push_back(c);
    const double lc = c > 0 ? std::log(static_cast<double>(c)) : 0.0;
    rep.exponents.push_back(lc / std::log(static_cast<double>(N)));
    if (c > 0)
      pts.emplace_back(std::log(static_cast<double>(N)), lc);
  }
  if (pts.size() >= 2) {
    double mx = 0, my = 0;
    for (auto [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sxx += (x - mx) * (x - mx);
      sxy += (x - mx) * (y - my);
    }
    if (sxx > 0)
      rep.fitted_exponent = sxy / sxx;
  }
  double h = 0.0;
  for (const auto& s : specs)
    h += log_double(s.alphabet()) / log_double(s.base());
  rep.heuristic_exponent = h - static_cast<double>(specs.size() - 1);
  return rep;
}

GrahamCensus graham_census(std::uint64_t limit, std::vector<std::uint64_t> primes, std::uint64_t budget)
{
  if (primes.empty())
    fail_invalid("census needs at least one prime");
  if (std::set<std::uint64_t>(primes.begin(), primes.end()).size() != primes.size())
    fail_invalid("census primes must be distinct");
  for (auto p : primes)
    if (!is_prime_u64(p))
      fail_invalid(std::to_string(p) + " is not prime");
  if (limit > budget)
    fail_budget("census limit exceeds the budget");
  GrahamCensus c;
  c.limit = limit;
  c.primes = primes;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    bool ok = true;
    for (auto p : primes)
      if (central_binom_valuation(n, p) != 0) {
        ok = false;
        break;
      }
    if (ok)
      c.hits.push_back(n);
  }
  return c;
}

} // namespace smalldig
