// Acceptance checks: one PASS/FAIL line per criterion.
//   acceptance            run all
//   acceptance 3 7        run the listed ones

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "smalldig/constructors.hpp"
#include "smalldig/criteria.hpp"
#include "smalldig/digits.hpp"
#include "smalldig/equidist.hpp"
#include "smalldig/harmonic.hpp"
#include "smalldig/kummer.hpp"
#include "smalldig/searcher.hpp"

using namespace smalldig;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int prec = 6)
{
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

Outcome worked_example()
{
  const std::vector<BaseSpec> specs = BaseSpec::parse_list("3,5,7");
  std::string line;
  for (const auto& p : multi_base_profile(BigInt(756), specs))
    line += (line.empty() ? "" : " ") + p.digits.render();
  const std::vector<std::uint64_t> primes{3, 5, 7};
  const auto split = graham_split(BigInt(756), primes);
  const bool ok = line == "(1001000)_3 (11011)_5 (2130)_7" && split.n2 == 1;
  return {ok, line + ", n2 = " + split.n2.get_str()};
}

Outcome repair_example()
{
  const EgrsTrace t = egrs_construct(BaseSpec::parse("3:1/2"), BaseSpec::parse("5:1/2"), 12);
  bool via = false;
  for (const auto& s : t.steps)
    via = via || (s.value == 551124 && to_digits(s.value, 5).render() == "(120113444)_5");
  const bool ok = t.success && via && t.final_value == 551406 &&
                  to_digits(t.final_value, 3).render() == "(1001000101110)_3" &&
                  to_digits(t.final_value, 5).render() == "(120121111)_5";
  return {ok, "final " + t.final_value.get_str() + " = " + to_digits(t.final_value, 3).render() + " = " +
                  to_digits(t.final_value, 5).render() + (via ? ", via 551124" : ", 551124 not visited")};
}

Outcome condition_constants()
{
  const auto c = conjecture_sum(BaseSpec::parse_list("3,5,7"));
  const auto z = conjecture_sum(BaseSpec::parse_list("3:2/3,5:2/5"));
  const auto e = egrs_condition(BaseSpec::parse("3:2/3"), BaseSpec::parse("5:2/5"));
  const auto t = equal_base_threshold(3, Rational(1, 2), ConditionKind::kTheorem);
  const bool c_ok = std::abs(c.value_double() - 0.974) <= 5e-4 && c.value.width() < 1e-25;
  const bool z_ok = std::abs(z.value_double() - 0.938) <= 5e-4 && z.value.width() < 1e-25;
  const bool e_ok = e.exact && *e.exact == Rational(3, 4);
  const bool t_ok = t.min_power_of_ten && *t.min_power_of_ten == 94;
  return {c_ok && z_ok && e_ok && t_ok,
          "conjecture(3,5,7) = " + c.value_digits(6) + ", {0,1} in 3,5 = " + z.value_digits(6) + ", two-base = " +
              (e.exact ? e.exact->get_str() : e.value_digits(6)) + ", theorem threshold 10^" +
              (t.min_power_of_ten ? std::to_string(*t.min_power_of_ten) : std::string("?"))};
}

Outcome small_digit_count()
{
  std::size_t cells = 0, bad = 0;
  for (std::uint64_t g = 2; g <= 16; ++g)
    for (std::uint64_t R = 1; R <= 5; ++R) {
      const BaseSpec s(g, Rational(1, 2));
      const std::uint64_t limit = pow_ui(g, R).get_ui();
      const auto count = enumerate_small(s, limit).size();
      const auto want = pow_ui((g + 1) / 2, R).get_ui();
      ++cells;
      bad += count != want || count_small_below(s, from_u64(limit)) != from_u64(want);
    }
  return {bad == 0, std::to_string(cells) + " (g, R) cells, " + std::to_string(bad) + " mismatches"};
}

std::uint64_t legendre_central(std::uint64_t n, std::uint64_t p)
{
  auto vfact = [p](std::uint64_t m) {
    std::uint64_t v = 0;
    for (std::uint64_t q = p; q <= m; q *= p)
      v += m / q;
    return v;
  };
  return vfact(2 * n) - 2 * vfact(n);
}

Outcome kummer_oracle()
{
  std::size_t checked = 0, bad = 0;
  for (std::uint64_t p : {3, 5, 7, 11, 13})
    for (std::uint64_t n = 1; n <= 5000; ++n, ++checked)
      bad += central_binom_valuation(BigInt(static_cast<unsigned long>(n)), p) != legendre_central(n, p);
  return {bad == 0, std::to_string(checked) + " valuations, " + std::to_string(bad) + " mismatches"};
}

Outcome spectrum_bound_check()
{
  std::size_t cells = 0, over = 0, freq = 0, mismatch = 0;
  double worst_ratio = 0, worst_diff = 0;
  for (std::uint64_t g : {3, 5, 7, 11})
    for (std::uint64_t t = 2; t <= (g + 1) / 2; ++t)
      for (std::uint64_t R = 1; R <= 3; ++R) {
        const SmallDigitFamily f{g, t, R};
        const double size = f.size().get_d();
        const std::uint64_t F = f.modulus().get_ui();
        for (std::uint64_t k = 0; k < F; ++k, ++freq) {
          const BigInt kk(static_cast<unsigned long>(k));
          const ExpSum a = exp_sum_product(f, kk), b = exp_sum_direct(f, kk);
          const double d = std::hypot(a.re - b.re, a.im - b.im);
          worst_diff = std::max(worst_diff, d / size);
          mismatch += d > 1e-9 * size;
        }
        for (double eta : {0.1, 0.3, 0.5, 0.9}) {
          SpectrumQuery q;
          q.family = f;
          q.K = R;
          q.eta = eta;
          const double count = static_cast<double>(large_spectrum_enumerate(q).size());
          const double bound = spectrum_bound(q).bound;
          ++cells;
          over += count > bound;
          worst_ratio = std::max(worst_ratio, count / bound);
        }
      }
  return {over == 0 && mismatch == 0, std::to_string(cells) + " cells, max count/bound " + num(worst_ratio) + "; " +
                                           std::to_string(freq) + " frequencies, max |product - direct|/t^R " +
                                           num(worst_diff, 3)};
}

Outcome bump_properties()
{
  std::string failures;
  std::size_t checked = 0;
  double worst_sum = -1e300;
  for (const char* d : {"1/10", "1/100"})
    for (std::uint64_t J = 1; J <= 6; ++J) {
      BumpParams p;
      p.delta = parse_rational(d);
      p.J = J;
      const BumpReport r = bump_property_report(p, bump_required_tail_cap(p));
      ++checked;
      worst_sum = std::max(worst_sum, r.coeff_sum + r.tail_upper - r.target);
      std::string why;
      if (bump_fourier_coeff(p, 0) != 1.0)
        why += " psi(0) != 1";
      if (r.envelope_violations)
        why += " " + std::to_string(r.envelope_violations) + " envelope violations from k = " +
               std::to_string(*r.first_violation) + " (max ratio " + num(r.max_envelope_ratio, 4) + ")";
      if (!r.sum_ok)
        why += " sum exceeds 4/delta";
      if (!why.empty())
        failures += std::string(failures.empty() ? "" : ";") + " delta=" + d + " J=" + std::to_string(J) + ":" + why;
    }
  return {failures.empty(), std::to_string(checked) + " (delta, J) pairs, max sum - 4/delta = " + num(worst_sum, 3) +
                                (failures.empty() ? "" : ";" + failures)};
}

Outcome block_audit()
{
  BlockConfig c;
  c.specs = BaseSpec::parse_list("3:1/2,5:1/2");
  c.ell = 2;
  c.h = 6;
  c.H = 512;
  c.c_pad = Rational(8);
  c.N = 12;
  const BlockTrace t = block_construct(c);
  bool ok = t.in_range;
  std::size_t audited = 0;
  for (const auto& a : t.audits) {
    ok = ok && a.sharp_large == 0 && a.search_window_violations == 0;
    audited += a.sharp_positions;
  }
  for (std::uint64_t n = 0; n <= c.N; ++n)
    for (const auto& s : c.specs)
      ok = ok && stability_check(t, n, s);
  std::string detail = "b in range, " + std::to_string(t.good_blocks.size()) + " good / " +
                       std::to_string(t.bad_blocks.size()) + " bad blocks, " + std::to_string(audited) +
                       " audited window digits";
  if (audited == 0)
    detail += " (audit windows empty at C_pad = 8)";
  // same construction with padding 1, reported as data
  c.c_pad = Rational(1);
  const BlockTrace u = block_construct(c);
  std::size_t pos = 0, large = 0;
  for (const auto& a : u.audits) {
    pos += a.sharp_positions;
    large += a.sharp_large;
  }
  detail += "; C_pad = 1: " + std::to_string(large) + " large of " + std::to_string(pos) + " audited";
  return {ok, detail};
}

Outcome discrepancy()
{
  const ExponentSystem s({3}, 2);
  const auto a = discrepancy_estimate(s, 100000, 4096);
  const auto b = discrepancy_estimate(s, 1000000, 4096);
  return {b.estimate < 0.01 && b.estimate < a.estimate,
          "N = 1e5: " + num(a.estimate, 4) + ", N = 1e6: " + num(b.estimate, 4)};
}

Outcome lattice()
{
  const ExponentSystem s({2, 3}, 5);
  const auto a = lattice_min_combination(s, 10), b = lattice_min_combination(s, 10);
  const bool positive = a.min_norm.certainly_greater(Rational(0));
  const bool same = a.min_norm.to_string(50) == b.min_norm.to_string(50) && a.argmin == b.argmin;
  bool monotone = true;
  double prev = a.min_norm_value;
  for (std::uint64_t M = 11; M <= 20; ++M) {
    const double v = lattice_min_combination(s, M).min_norm_value;
    monotone = monotone && v <= prev;
    prev = v;
  }
  return {a.vectors == 440 && positive && same && monotone,
          std::to_string(a.vectors) + " vectors, min " + a.min_norm.to_string(12) + " vs M^-2 = " + num(a.reference) +
              ", min at M = 20: " + num(prev)};
}

} // namespace

int main(int argc, char** argv)
{
  const std::vector<std::function<Outcome()>> checks{worked_example, repair_example, condition_constants,
                                                     small_digit_count, kummer_oracle,  spectrum_bound_check,
                                                     bump_properties, block_audit,   discrepancy,
                                                     lattice};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i)
    which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= 10; ++i)
      which.push_back(i);

  int failed = 0;
  for (int c : which) {
    if (c < 1 || c > 10) {
      std::printf("FAIL criterion %d: no such criterion\n", c);
      ++failed;
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[static_cast<std::size_t>(c - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s [%.3f s]\n", o.pass ? "PASS" : "FAIL", c, o.detail.c_str(), secs);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
