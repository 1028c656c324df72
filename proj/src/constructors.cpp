#include "smalldig/constructors.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "smalldig/error.hpp"

namespace smalldig {

std::string to_string(EgrsPolicy p)
{
  return p == EgrsPolicy::kSmallestFirst ? "smallest-first" : "largest-first";
}

EgrsPolicy parse_egrs_policy(std::string_view s)
{
  if (s == "smallest-first" || s == "example")
    return EgrsPolicy::kSmallestFirst;
  if (s == "largest-first")
    return EgrsPolicy::kLargestFirst;
  fail_invalid("unknown repair policy '" + std::string(s) + "' (smallest-first|largest-first)");
}

std::optional<std::size_t> highest_large_digit(const DigitVector& d, const BaseSpec& spec)
{
  for (std::size_t k = d.size(); k-- > 0;)
    if (spec.is_large(d.digits[k]))
      return k;
  return std::nullopt;
}

namespace {

// Exponents e with g2^m <= g1^e < g2^(m+1).
std::vector<std::uint64_t> aligned_exponents(std::uint64_t g1, std::uint64_t g2, std::size_t m)
{
  const BigInt lo = pow_ui(g2, m);
  const BigInt hi = lo * static_cast<unsigned long>(g2);
  std::vector<std::uint64_t> out;
  BigInt p = 1;
  for (std::uint64_t e = 0; p < hi; ++e, p *= static_cast<unsigned long>(g1))
    if (p >= lo)
      out.push_back(e);
  return out;
}

} // namespace

std::vector<EgrsStep> egrs_candidates(const BigInt& current, const BaseSpec& s1, const BaseSpec& s2,
                                      EgrsPolicy policy, std::optional<std::uint64_t> exponent_bound)
{
  if (current < 1)
    fail_invalid("repair start value must be >= 1");
  const std::uint64_t g1 = s1.radix(), g2 = s2.radix();
  const auto off = highest_large_digit(to_digits(current, g2), s2);
  if (!off)
    return {};
  const std::size_t m = *off;
  const DigitVector d1 = to_digits(current, g1);
  const std::uint64_t a1 = s1.alphabet_u64();

  std::vector<std::uint64_t> exps = aligned_exponents(g1, g2, m);
  if (policy == EgrsPolicy::kLargestFirst)
    std::reverse(exps.begin(), exps.end());

  std::vector<EgrsStep> out;
  for (std::uint64_t e : exps) {
    if (exponent_bound && e >= *exponent_bound)
      continue;
    const Digit have = d1.at(e);
    if (have + 1 >= a1)
      continue; // no room to add without a large base-g1 digit or a carry
    const std::uint64_t cmax = std::min<std::uint64_t>(g2 - 1, a1 - 1 - have);
    const BigInt power = pow_ui(g1, e);
    BigInt v = current;
    for (std::uint64_t c = 1; c <= cmax; ++c) {
      v += power;
      const auto next = highest_large_digit(to_digits(v, g2), s2);
      if (!next || *next < m) {
        out.push_back({e, c, m, v});
        break;
      }
    }
  }
  return out;
}

RepairOutcome egrs_repair_step(const BigInt& current, const BaseSpec& s1, const BaseSpec& s2, EgrsPolicy policy,
                               std::optional<std::uint64_t> exponent_bound)
{
  if (current < 1)
    fail_invalid("repair start value must be >= 1");
  RepairOutcome r;
  const auto off = highest_large_digit(to_digits(current, s2.radix()), s2);
  if (!off)
    return r;
  r.offender_position = *off;
  auto cands = egrs_candidates(current, s1, s2, policy, exponent_bound);
  if (cands.empty()) {
    r.kind = RepairOutcome::Kind::kDeadEnd;
    return r;
  }
  r.kind = RepairOutcome::Kind::kStep;
  r.step = std::move(cands.front());
  return r;
}

EgrsTrace egrs_construct(const BaseSpec& s1, const BaseSpec& s2, std::uint64_t start_exponent,
                         std::uint64_t step_budget, EgrsPolicy policy)
{
  if (step_budget == 0)
    fail_invalid("step budget must be positive");
  if (s1.base() == s2.base())
    fail_invalid("the two bases must differ");
  EgrsTrace t{s1, s2, start_exponent, policy, step_budget, 0, false, false, {}, BigInt(0), 0, 0};
  t.start_exponent = start_exponent;
  t.policy = policy;
  t.step_budget = step_budget;
  const std::uint64_t g1 = s1.radix();
  {
    const Rational lhs = Rational(s1.alphabet() - 1, s1.base() - 1) + Rational(s2.alphabet() - 1, s2.base() - 1);
    t.condition_holds = lhs >= 1;
  }

  struct Frame {
    BigInt value;
    std::optional<std::uint64_t> bound;
    std::vector<EgrsStep> cands;
    std::size_t next = 0;
  };

  const BigInt start = pow_ui(g1, start_exponent);
  std::vector<Frame> stack;
  std::vector<EgrsStep> path;
  std::size_t best_score = std::numeric_limits<std::size_t>::max();

  auto visit = [&](const BigInt& v, std::optional<std::uint64_t> bound) -> bool {
    ++t.nodes_expanded;
    const std::size_t l1 = large_digit_count(v, s1);
    const std::size_t l2 = large_digit_count(v, s2);
    if (l1 + l2 < best_score) {
      best_score = l1 + l2;
      t.final_value = v;
      t.large1 = l1;
      t.large2 = l2;
      t.steps = path;
    }
    if (l1 == 0 && l2 == 0) {
      t.success = true;
      return true;
    }
    Frame f{v, bound, l1 == 0 ? egrs_candidates(v, s1, s2, policy, bound) : std::vector<EgrsStep>{}};
    stack.push_back(std::move(f));
    return false;
  };

  if (visit(start, std::nullopt))
    return t;
  while (!stack.empty() && t.nodes_expanded < step_budget) {
    Frame& f = stack.back();
    if (f.next == f.cands.size()) {
      stack.pop_back();
      if (!path.empty())
        path.pop_back();
      continue;
    }
    EgrsStep step = f.cands[f.next++];
    path.push_back(step);
    if (visit(step.value, step.exponent))
      return t;
  }
  return t;
}

void to_json(nlohmann::json& j, const EgrsTrace& t)
{
  using nlohmann::json;
  json steps = json::array();
  for (const auto& s : t.steps)
    steps.push_back({{"exponent", s.exponent},
                     {"multiplicity", s.multiplicity},
                     {"offender_position", s.offender_position},
                     {"value", s.value.get_str()},
                     {"base1", to_digits(s.value, t.spec1.radix()).render()},
                     {"base2", to_digits(s.value, t.spec2.radix()).render()}});
  j = json{{"spec1", t.spec1},
           {"spec2", t.spec2},
           {"start_exponent", t.start_exponent},
           {"policy", to_string(t.policy)},
           {"step_budget", t.step_budget},
           {"nodes_expanded", t.nodes_expanded},
           {"condition_holds", t.condition_holds},
           {"success", t.success},
           {"steps", steps},
           {"final", t.final_value.get_str()},
           {"final_base1", to_digits(t.final_value, t.spec1.radix()).render()},
           {"final_base2", to_digits(t.final_value, t.spec2.radix()).render()},
           {"large1", t.large1},
           {"large2", t.large2}};
}

// ---------------------------------------------------------------------------
// Block construction

void BlockConfig::validate() const
{
  if (specs.empty())
    fail_invalid("block construction needs at least one base");
  if (ell < 2)
    fail_invalid("ell must be >= 2");
  if (h < 1)
    fail_invalid("h must be >= 1");
  if (c_pad < 1)
    fail_invalid("C_pad must be >= 1");
  for (const auto& s : specs) {
    const std::uint64_t g = s.radix();
    if (std::gcd(g, ell) != 1)
      fail_invalid("ell must be coprime to every base (gcd(" + std::to_string(ell) + ", " + std::to_string(g) + ") > 1)");
  }
  if (from_u64(H) < L())
    fail_invalid("H must be >= L");
  if (H > kMaxShiftScan)
    fail_budget("H exceeds the shift scan budget");
  if (threads == 0)
    fail_invalid("threads must be >= 1");
}

std::pair<Rational, Rational> shift_window(const BlockConfig& cfg, std::uint64_t n)
{
  const BigInt Ln = pow(cfg.L(), n);
  return {cfg.c_pad * Ln, Rational(Ln * cfg.L()) / cfg.c_pad};
}

std::pair<Rational, Rational> audit_window(const BlockConfig& cfg, std::uint64_t n)
{
  const BigInt Ln = pow(cfg.L(), n);
  return {cfg.c_pad * Rational(from_u64(cfg.H), cfg.L()) * Ln, Rational(Ln * cfg.L()) / cfg.c_pad};
}

std::vector<std::size_t> positions_in(std::uint64_t g, const Rational& lo, const Rational& hi)
{
  if (lo > hi)
    return {};
  return window_positions(g, lo, hi);
}

namespace {

struct WindowCheck {
  std::uint64_t g;
  std::uint64_t alphabet;
  std::size_t count; // number of positions
  BigInt place;      // g^(first position)
};

bool window_small(const BigInt& v, const WindowCheck& w, BigInt& scratch)
{
  mpz_fdiv_q(scratch.get_mpz_t(), v.get_mpz_t(), w.place.get_mpz_t());
  for (std::size_t i = 0; i < w.count; ++i) {
    if (scratch == 0)
      return true;
    const std::uint64_t d = mpz_fdiv_q_ui(scratch.get_mpz_t(), scratch.get_mpz_t(), w.g);
    if (d >= w.alphabet)
      return false;
  }
  return true;
}

} // namespace

std::optional<std::uint64_t> block_find_shift(std::uint64_t n, const BigInt& beta, const BlockConfig& cfg)
{
  cfg.validate();
  if (n > cfg.N)
    fail_invalid("block index above N");
  if (beta < 0)
    fail_invalid("beta must be non-negative");
  const auto [lo, hi] = shift_window(cfg, n);
  std::vector<WindowCheck> checks;
  for (const auto& s : cfg.specs) {
    const auto pos = positions_in(s.radix(), lo, hi);
    if (pos.empty())
      continue;
    checks.push_back({s.radix(), s.alphabet_u64(), pos.size(), pow_ui(s.radix(), pos.front())});
  }
  if (checks.empty())
    return 1;

  const BigInt Ln = pow(cfg.L(), n);
  std::atomic<std::uint64_t> best{cfg.H + 1};
  auto scan = [&](std::uint64_t first, std::uint64_t stride) {
    BigInt v = Ln * static_cast<unsigned long>(first) + beta;
    const BigInt step = Ln * static_cast<unsigned long>(stride);
    BigInt scratch;
    for (std::uint64_t s = first; s <= cfg.H && s < best.load(std::memory_order_relaxed); s += stride, v += step) {
      bool ok = true;
      for (const auto& w : checks)
        if (!window_small(v, w, scratch)) {
          ok = false;
          break;
        }
      if (ok) {
        std::uint64_t cur = best.load();
        while (s < cur && !best.compare_exchange_weak(cur, s)) {
        }
        return;
      }
    }
  };

  const unsigned T = static_cast<unsigned>(std::min<std::uint64_t>(cfg.threads, cfg.H));
  if (T <= 1) {
    scan(1, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < T; ++i)
      pool.emplace_back(scan, 1 + i, T);
    for (auto& th : pool)
      th.join();
  }
  const std::uint64_t s = best.load();
  if (s > cfg.H)
    return std::nullopt;
  return s;
}

BigInt block_prefix(const BlockTrace& t, std::uint64_t d)
{
  const BigInt L = t.config.L();
  BigInt acc = 0;
  for (std::uint64_t i = t.config.N + 1; i-- > d;) {
    acc *= L;
    acc += static_cast<unsigned long>(t.shifts[i]);
  }
  return acc * pow(L, d);
}

BlockTrace block_construct(const BlockConfig& cfg)
{
  cfg.validate();
  BlockTrace t;
  t.config = cfg;
  t.shifts.assign(cfg.N + 1, 0);
  t.shifts[cfg.N] = 1;
  const BigInt L = cfg.L();
  BigInt beta = pow(L, cfg.N);
  for (std::uint64_t n = cfg.N; n-- > 0;) {
    if (auto s = block_find_shift(n, beta, cfg)) {
      t.shifts[n] = *s;
      t.good_blocks.push_back(n);
      beta += pow(L, n) * static_cast<unsigned long>(*s);
    } else {
      t.bad_blocks.push_back(n);
    }
  }
  std::sort(t.good_blocks.begin(), t.good_blocks.end());
  std::sort(t.bad_blocks.begin(), t.bad_blocks.end());
  t.b = beta;
  t.in_range = t.b >= pow(L, cfg.N) && t.b <= from_u64(cfg.H) * pow(L, cfg.N + 1);

  std::vector<bool> good(cfg.N, false);
  for (auto n : t.good_blocks)
    good[n] = true;

  for (const auto& spec : cfg.specs) {
    const std::uint64_t g = spec.radix();
    const DigitVector d = to_digits(t.b, g);
    BaseAudit a{spec};
    a.total_digits = d.size();
    a.large_total = large_digit_count(d, spec);
    // 0 = fringe, 1 = sharp, 2 = flat
    std::vector<int> cls(d.size(), 0);
    for (std::uint64_t n = 0; n < cfg.N; ++n) {
      const auto [lo, hi] = audit_window(cfg, n);
      const auto pos = positions_in(g, lo, hi);
      a.max_window_positions = std::max(a.max_window_positions, pos.size());
      for (auto k : pos)
        if (k < cls.size() && cls[k] != 1)
          cls[k] = good[n] ? 1 : 2;
    }
    for (std::size_t k = 0; k < d.size(); ++k) {
      const bool large = spec.is_large(d.digits[k]);
      switch (cls[k]) {
      case 1:
        ++a.sharp_positions;
        a.sharp_large += large;
        break;
      case 2:
        ++a.flat_positions;
        a.flat_large += large;
        break;
      default:
        ++a.fringe_positions;
        a.fringe_large += large;
      }
    }
    for (auto n : t.good_blocks) {
      const auto [lo, hi] = shift_window(cfg, n);
      if (lo > hi)
        continue;
      a.search_window_violations += digit_window(block_prefix(t, n), spec, lo, hi).large_positions.size();
    }
    if (a.total_digits > 0) {
      a.bad_fraction = static_cast<double>(a.large_total) / static_cast<double>(a.total_digits);
      a.fraction_bound =
          static_cast<double>(a.flat_positions + a.fringe_positions) / static_cast<double>(a.total_digits);
    }
    t.audits.push_back(std::move(a));
  }
  return t;
}

bool stability_check(const BlockTrace& t, std::uint64_t n, const BaseSpec& spec)
{
  if (n > t.config.N)
    fail_invalid("block index above N");
  const std::uint64_t g = spec.radix();
  const BigInt L = t.config.L();
  const Rational cutoff = Rational(from_u64(g) * from_u64(t.config.H) * pow(L, n), L - 1);
  const DigitVector full = to_digits(t.b, g);
  const DigitVector part = to_digits(block_prefix(t, n), g);
  const std::size_t len = std::max(full.size(), part.size());
  BigInt place = 1;
  for (std::size_t k = 0; k < len; ++k, place *= static_cast<unsigned long>(g)) {
    if (cmp(Rational(place), cutoff) <= 0)
      continue;
    if (full.at(k) != part.at(k))
      return false;
  }
  return true;
}

void to_json(nlohmann::json& j, const BlockTrace& t)
{
  using nlohmann::json;
  json audits = json::array();
  for (const auto& a : t.audits)
    audits.push_back({{"spec", a.spec},
                      {"total_digits", a.total_digits},
                      {"large_total", a.large_total},
                      {"sharp_positions", a.sharp_positions},
                      {"sharp_large", a.sharp_large},
                      {"flat_positions", a.flat_positions},
                      {"flat_large", a.flat_large},
                      {"fringe_positions", a.fringe_positions},
                      {"fringe_large", a.fringe_large},
                      {"max_window_positions", a.max_window_positions},
                      {"search_window_violations", a.search_window_violations},
                      {"bad_fraction", a.bad_fraction},
                      {"fraction_bound", a.fraction_bound}});
  json cfg{{"specs", t.config.specs},
           {"ell", t.config.ell},
           {"h", t.config.h},
           {"L", t.config.L().get_str()},
           {"H", t.config.H},
           {"C_pad", t.config.c_pad.get_str()},
           {"N", t.config.N}};
  j = json{{"config", cfg},
           {"shifts", t.shifts},
           {"good_blocks", t.good_blocks},
           {"bad_blocks", t.bad_blocks},
           {"b", t.b.get_str()},
           {"in_range", t.in_range},
           {"audits", audits}};
}

std::string render_digit_grid(const BigInt& n, std::span<const BaseSpec> specs)
{
  std::ostringstream os;
  for (const auto& spec : specs) {
    const std::uint64_t g = spec.radix();
    const DigitVector d = to_digits(n, g);
    const std::size_t w = std::to_string(g - 1).size();
    const std::string sep = w > 1 ? " " : "";
    std::string digits, marks;
    std::size_t large = 0;
    for (std::size_t i = d.size(); i-- > 0;) {
      std::string s = std::to_string(d.digits[i]);
      s.insert(0, w - s.size(), ' ');
      const bool big = spec.is_large(d.digits[i]);
      large += big;
      digits += s + (i ? sep : "");
      marks += std::string(w - 1, ' ') + (big ? '^' : ' ') + (i ? sep : "");
    }
    if (d.is_zero())
      digits = "0";
    os << "base " << spec.base().get_str() << " (kappa " << spec.kappa().get_str() << "), " << d.size()
       << " digits, " << large << " large\n  " << digits << "\n";
    if (large)
      os << "  " << marks << "\n";
  }
  return os.str();
}

} // namespace smalldig
