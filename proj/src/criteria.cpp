#include "smalldig/criteria.hpp"

#include <algorithm>

#include "smalldig/error.hpp"

namespace smalldig {

std::string to_string(Verdict v)
{
  switch (v) {
  case Verdict::kSatisfied:
    return "SATISFIED";
  case Verdict::kNotSatisfied:
    return "NOT SATISFIED";
  default:
    return "INDETERMINATE";
  }
}

std::string to_string(ConditionKind k)
{
  switch (k) {
  case ConditionKind::kConjecture:
    return "conjecture";
  case ConditionKind::kTheorem:
    return "theorem";
  case ConditionKind::kProp:
    return "prop";
  default:
    return "egrs";
  }
}

ConditionKind parse_condition_kind(std::string_view s)
{
  if (s == "conjecture")
    return ConditionKind::kConjecture;
  if (s == "theorem")
    return ConditionKind::kTheorem;
  if (s == "prop")
    return ConditionKind::kProp;
  if (s == "egrs" || s == "two-base")
    return ConditionKind::kTwoBase;
  fail_invalid("unknown condition '" + std::string(s) + "' (conjecture|theorem|prop|egrs)");
}

namespace {

// g = c^q with c minimal
std::pair<BigInt, unsigned long> perfect_power_root(const BigInt& g)
{
  const std::size_t bits = mpz_sizeinbase(g.get_mpz_t(), 2);
  BigInt root;
  for (unsigned long e = bits; e >= 2; --e)
    if (mpz_root(root.get_mpz_t(), g.get_mpz_t(), e) != 0)
      return {root, e};
  return {g, 1};
}

// x = c^p, or nullopt
std::optional<unsigned long> power_of(BigInt x, const BigInt& c)
{
  unsigned long p = 0;
  while (x > 1) {
    if (!mpz_divisible_p(x.get_mpz_t(), c.get_mpz_t()))
      return std::nullopt;
    mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
    ++p;
  }
  if (x != 1)
    return std::nullopt;
  return p;
}

Interval log_ratio(const Rational& x, const BigInt& g)
{
  return Interval::from_rational(x, kCriteriaPrecision).log() / Interval::from_int(g, kCriteriaPrecision).log();
}

ConditionTerm make_log_term(const BaseSpec& spec, const Rational& arg)
{
  if (arg <= 0)
    fail_invalid("logarithm argument must be positive");
  return ConditionTerm{spec, arg, log_ratio(arg, spec.base()), exact_log(arg, spec.base())};
}

void finish(ConditionReport& rep)
{
  Interval sum = Interval::exact(0, kCriteriaPrecision);
  bool all_exact = true;
  Rational exact_sum = 0;
  for (const auto& t : rep.terms) {
    sum += t.value;
    if (t.exact)
      exact_sum += *t.exact;
    else
      all_exact = false;
  }
  rep.value = sum;
  if (all_exact) {
    rep.exact = exact_sum;
    rep.value = Interval::from_rational(exact_sum, kCriteriaPrecision);
    const bool ok = rep.strict ? exact_sum < rep.threshold : exact_sum >= rep.threshold;
    rep.verdict = ok ? Verdict::kSatisfied : Verdict::kNotSatisfied;
    return;
  }
  const Rational w = Rational(1, BigInt("100000000000000000000"));
  const bool below = rep.value.certainly_less(rep.threshold - w);
  const bool above = rep.value.certainly_greater(rep.threshold + w);
  if (!below && !above)
    rep.verdict = Verdict::kIndeterminate;
  else if (rep.strict)
    rep.verdict = below ? Verdict::kSatisfied : Verdict::kNotSatisfied;
  else
    rep.verdict = above ? Verdict::kSatisfied : Verdict::kNotSatisfied;
}

void check_r(std::span<const BaseSpec> specs, std::uint64_t r)
{
  if (specs.empty())
    fail_invalid("condition needs at least one base");
  if (r != specs.size())
    fail_invalid("r = " + std::to_string(r) + " does not match the " + std::to_string(specs.size()) + " bases given");
}

BigInt r5(std::uint64_t r)
{
  return pow_ui(r, 5);
}

} // namespace

std::optional<Rational> exact_log(const Rational& x, const BigInt& g)
{
  if (x <= 0 || g < 2)
    return std::nullopt;
  if (x == 1)
    return Rational(0);
  const auto [c, q] = perfect_power_root(g);
  const auto pn = power_of(x.get_num(), c);
  const auto pd = power_of(x.get_den(), c);
  if (!pn || !pd)
    return std::nullopt;
  Rational out(BigInt(static_cast<long>(*pn)) - BigInt(static_cast<long>(*pd)), BigInt(q));
  out.canonicalize();
  return out;
}

ConditionReport conjecture_sum(std::span<const BaseSpec> specs)
{
  if (specs.empty())
    fail_invalid("condition needs at least one base");
  ConditionReport rep;
  rep.kind = ConditionKind::kConjecture;
  rep.threshold = 1;
  rep.strict = true;
  for (const auto& s : specs)
    rep.terms.push_back(make_log_term(s, Rational(s.base(), s.alphabet())));
  finish(rep);
  return rep;
}

ConditionReport theorem_sum(std::span<const BaseSpec> specs, std::uint64_t r)
{
  check_r(specs, r);
  ConditionReport rep;
  rep.kind = ConditionKind::kTheorem;
  rep.threshold = Rational(1, 2 * r);
  for (const auto& s : specs)
    rep.terms.push_back(make_log_term(s, Rational(320 * r5(r)) / s.kappa()));
  finish(rep);
  return rep;
}

ConditionReport prop_sum(std::span<const BaseSpec> specs, std::uint64_t r)
{
  check_r(specs, r);
  ConditionReport rep;
  rep.kind = ConditionKind::kProp;
  rep.threshold = Rational(1, 2 * r);
  for (const auto& s : specs) {
    const BigInt a = ceil(s.kappa() / Rational(32 * r5(r)) * s.base());
    rep.terms.push_back(make_log_term(s, Rational(10 * s.base(), a)));
  }
  finish(rep);
  return rep;
}

ConditionReport egrs_condition(const BaseSpec& s1, const BaseSpec& s2)
{
  ConditionReport rep;
  rep.kind = ConditionKind::kTwoBase;
  rep.threshold = 1;
  rep.strict = false;
  for (const auto* s : {&s1, &s2}) {
    if (s->kappa() * s->base() < 1)
      fail_invalid("the two-base condition needs kappa >= 1/g (base " + s->base().get_str() + ")");
    const Rational term(s->alphabet() - 1, s->base() - 1);
    rep.terms.push_back(ConditionTerm{*s, term, Interval::from_rational(term, kCriteriaPrecision), term});
  }
  finish(rep);
  return rep;
}

ConditionReport evaluate_condition(ConditionKind kind, std::span<const BaseSpec> specs)
{
  switch (kind) {
  case ConditionKind::kConjecture:
    return conjecture_sum(specs);
  case ConditionKind::kTheorem:
    return theorem_sum(specs, specs.size());
  case ConditionKind::kProp:
    return prop_sum(specs, specs.size());
  default:
    if (specs.size() != 2)
      fail_invalid("the two-base condition takes exactly two bases");
    return egrs_condition(specs[0], specs[1]);
  }
}

// ---------------------------------------------------------------------------
// Equal-base thresholds

bool equal_base_holds(ConditionKind kind, std::uint64_t r, const Rational& kappa, const BigInt& g)
{
  if (g < 2)
    return false;
  switch (kind) {
  case ConditionKind::kConjecture: {
    // r log_g(g/a) < 1  <=>  g^(r-1) < a^r
    const BigInt a = ceil(kappa * g);
    return pow(g, r - 1) < pow(a, r);
  }
  case ConditionKind::kTheorem: {
    // r log_g X < 1/(2r)  <=>  X^(2r^2) < g
    const Rational X = Rational(320 * r5(r)) / kappa;
    const std::uint64_t e = 2 * r * r;
    return pow(X.get_num(), e) < g * pow(X.get_den(), e);
  }
  case ConditionKind::kProp: {
    // r log_g(10g/a) < 1/(2r)  <=>  10^(2r^2) g^(2r^2-1) < a^(2r^2)
    const BigInt a = ceil(kappa / Rational(32 * r5(r)) * g);
    const std::uint64_t e = 2 * r * r;
    return pow_ui(10, e) * pow(g, e - 1) < pow(a, e);
  }
  default: {
    if (r != 2)
      fail_invalid("the two-base condition has r = 2");
    const BigInt a = ceil(kappa * g);
    return 2 * (a - 1) >= g - 1;
  }
  }
}

ThresholdReport equal_base_threshold(std::uint64_t r, const Rational& kappa, ConditionKind kind)
{
  if (r < 1 || r > 64)
    fail_invalid("r must lie in [1, 64]");
  if (kappa <= 0 || kappa > 1)
    fail_invalid("kappa must lie in (0, 1]");
  ThresholdReport rep;
  rep.kind = kind;
  rep.r = r;
  rep.kappa = kappa;
  auto holds = [&](const BigInt& g) { return equal_base_holds(kind, r, kappa, g); };

  for (std::uint64_t g = 2; g < 2000 && rep.nonmonotone_examples.size() < 16; ++g)
    if (holds(from_u64(g)) && !holds(from_u64(g + 1)))
      rep.nonmonotone_examples.push_back(g);

  if (kind == ConditionKind::kTheorem) {
    rep.monotone = true;
    rep.exhaustive = true;
    const Rational X = Rational(320 * r5(r)) / kappa;
    const std::uint64_t e = 2 * r * r;
    BigInt g = floor(Rational(pow(X.get_num(), e), pow(X.get_den(), e))) + 1;
    if (g < 2)
      g = 2;
    rep.min_g = g;
  } else {
    // Within a block of constant a = ceil(c g) the inequality favours the
    // smallest g, so only g_min(a) = floor((a-1)/c) + 1 needs testing.
    const Rational c = kind == ConditionKind::kProp ? kappa / Rational(32 * r5(r)) : kappa;
    auto gmin = [&](const BigInt& a) {
      BigInt g = floor(Rational(a - 1) / c) + 1;
      return g < 2 ? BigInt(2) : g;
    };
    const std::uint64_t scan = std::max<std::uint64_t>(1000, kThresholdLinearScan / (r * r));
    for (std::uint64_t a = 1; a <= scan; ++a) {
      const BigInt g = gmin(from_u64(a));
      if (holds(g)) {
        rep.min_g = g;
        rep.exhaustive = true;
        break;
      }
    }
    if (!rep.min_g) {
      // beyond the scan the block minima are assumed monotone in a
      BigInt lo = from_u64(scan), hi = lo * 2;
      while (!holds(gmin(hi))) {
        if (mpz_sizeinbase(hi.get_mpz_t(), 2) > 65536)
          break;
        lo = hi;
        hi *= 2;
      }
      if (holds(gmin(hi))) {
        while (hi - lo > 1) {
          const BigInt mid = (lo + hi) / 2;
          (holds(gmin(mid)) ? hi : lo) = mid;
        }
        rep.min_g = gmin(hi);
      }
    }
  }

  for (std::uint64_t m = 1; m <= kPowerOfTenCap; ++m) {
    if (holds(pow_ui(10, m))) {
      rep.min_power_of_ten = m;
      break;
    }
  }
  return rep;
}

void to_json(nlohmann::json& j, const ConditionReport& c)
{
  using nlohmann::json;
  json terms = json::array();
  for (const auto& t : c.terms)
    terms.push_back({{"spec", t.spec},
                     {"argument", t.argument.get_str()},
                     {"value", t.value.to_string(30)},
                     {"exact", t.exact ? json(t.exact->get_str()) : json()}});
  j = json{{"condition", to_string(c.kind)},
           {"value", c.value.to_string(30)},
           {"value_double", c.value_double()},
           {"error", c.value.radius()},
           {"exact", c.exact ? json(c.exact->get_str()) : json()},
           {"threshold", c.threshold.get_str()},
           {"comparison", c.strict ? "<" : ">="},
           {"verdict", to_string(c.verdict)},
           {"terms", terms}};
}

void to_json(nlohmann::json& j, const ThresholdReport& t)
{
  using nlohmann::json;
  j = json{{"condition", to_string(t.kind)},
           {"r", t.r},
           {"kappa", t.kappa.get_str()},
           {"min_g", t.min_g ? json(t.min_g->get_str()) : json()},
           {"min_power_of_ten", t.min_power_of_ten ? json(*t.min_power_of_ten) : json()},
           {"exhaustive", t.exhaustive},
           {"monotone", t.monotone},
           {"nonmonotone_examples", t.nonmonotone_examples}};
}

} // namespace smalldig
