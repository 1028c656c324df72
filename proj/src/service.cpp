#include "service.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "smalldig/constructors.hpp"
#include "smalldig/criteria.hpp"
#include "smalldig/digits.hpp"
#include "smalldig/equidist.hpp"
#include "smalldig/error.hpp"
#include "smalldig/harmonic.hpp"
#include "smalldig/kummer.hpp"
#include "smalldig/searcher.hpp"

namespace smalldig::service {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// parameter access

std::string text_of(const json& v, const std::string& key)
{
  if (v.is_string())
    return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned())
    return v.dump();
  fail_invalid("parameter '" + key + "' must be a string or an integer");
}

bool has(const json& p, const std::string& key)
{
  return p.contains(key) && !p.at(key).is_null();
}

std::string get_text(const json& p, const std::string& key, const std::string& def)
{
  return has(p, key) ? text_of(p.at(key), key) : def;
}

std::uint64_t get_u64(const json& p, const std::string& key, std::uint64_t def)
{
  if (!has(p, key))
    return def;
  const json& v = p.at(key);
  if (v.is_number_unsigned())
    return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0)
      fail_invalid("parameter '" + key + "' must be non-negative");
    return v.get<std::uint64_t>();
  }
  return to_u64(parse_bigint(text_of(v, key)));
}

bool get_bool(const json& p, const std::string& key, bool def)
{
  if (!has(p, key))
    return def;
  if (!p.at(key).is_boolean())
    fail_invalid("parameter '" + key + "' must be a boolean");
  return p.at(key).get<bool>();
}

double get_double(const json& p, const std::string& key, double def)
{
  if (!has(p, key))
    return def;
  const json& v = p.at(key);
  if (v.is_number())
    return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find('/') != std::string::npos)
      return parse_rational(s).get_d();
    std::size_t used = 0;
    double d = 0;
    try {
      d = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty())
      fail_invalid("parameter '" + key + "' is not a number: '" + s + "'");
    return d;
  }
  fail_invalid("parameter '" + key + "' must be a number");
}

// Exact rational from "p/q", an integer, or a plain decimal such as "0.1"
// (read digit by digit, never through a double).
Rational parse_exact_decimal(const std::string& s)
{
  const auto dot = s.find('.');
  if (dot == std::string::npos)
    return parse_rational(s);
  std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
  bool neg = false;
  if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) {
    neg = ip[0] == '-';
    ip.erase(0, 1);
  }
  if (ip.empty())
    ip = "0";
  if (fp.empty() || !std::all_of(fp.begin(), fp.end(), [](char c) { return c >= '0' && c <= '9'; }))
    fail_invalid("not a decimal number: '" + s + "'");
  Rational q(parse_bigint(ip + fp), pow_ui(10, fp.size()));
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

Rational get_rational(const json& p, const std::string& key, const std::string& def, bool allow_decimal)
{
  const std::string s = get_text(p, key, def);
  return allow_decimal ? parse_exact_decimal(s) : parse_rational(s);
}

std::vector<std::string> split_list(const json& v, const std::string& key)
{
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& e : v)
      out.push_back(text_of(e, key));
    return out;
  }
  std::string s = text_of(v, key);
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty())
      out.push_back(item);
  return out;
}

std::vector<std::uint64_t> get_u64_list(const json& p, const std::string& key, std::vector<std::uint64_t> def)
{
  if (!has(p, key))
    return def;
  std::vector<std::uint64_t> out;
  for (const auto& s : split_list(p.at(key), key))
    out.push_back(to_u64(parse_bigint(s)));
  return out;
}

std::vector<BaseSpec> get_specs(const json& p, const std::string& key, const std::string& def)
{
  std::vector<BaseSpec> out;
  const json v = has(p, key) ? p.at(key) : json(def);
  for (const auto& s : split_list(v, key))
    out.push_back(BaseSpec::parse(s));
  if (out.empty())
    fail_invalid("parameter '" + key + "' lists no bases");
  return out;
}

json specs_json(const std::vector<BaseSpec>& specs)
{
  json a = json::array();
  for (const auto& s : specs)
    a.push_back(s.to_string());
  return a;
}

void reject_unknown(const json& p, std::initializer_list<const char*> known)
{
  if (!p.is_object())
    fail_invalid("parameters must be a JSON object");
  for (auto it = p.begin(); it != p.end(); ++it)
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; }))
      fail_invalid("unknown parameter '" + it.key() + "'");
}

// Working precisions are fixed; a manifest may repeat them but not change them.
void check_precision(const json& p, long bits)
{
  if (has(p, "precision_bits") && get_u64(p, "precision_bits", 0) != static_cast<std::uint64_t>(bits))
    fail_invalid("precision_bits is fixed at " + std::to_string(bits));
}

std::string fmt(double v, int prec = 10)
{
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// commands

struct Command {
  std::function<json(const json&)> normalize;
  std::function<Result(const json&)> run;
};

// digits ---------------------------------------------------------------------

json norm_digits(const json& p)
{
  reject_unknown(p, {"n", "bases", "lo", "hi"});
  if (!has(p, "n"))
    fail_invalid("digits needs 'n'");
  const BigInt n = parse_bigint(get_text(p, "n", "0"));
  if (n < 0)
    fail_invalid("n must be non-negative");
  const auto specs = get_specs(p, "bases", "3,5,7");
  for (const auto& s : specs)
    s.radix();
  json out{{"n", n.get_str()}, {"bases", specs_json(specs)}};
  if (has(p, "lo") || has(p, "hi")) {
    const BigInt lo = parse_bigint(get_text(p, "lo", "1")), hi = parse_bigint(get_text(p, "hi", "1"));
    if (lo < 1 || lo > hi)
      fail_invalid("digit window needs 1 <= lo <= hi");
    out["lo"] = lo.get_str();
    out["hi"] = hi.get_str();
  }
  return out;
}

Result run_digits(const json& p)
{
  const BigInt n = parse_bigint(p.at("n").get<std::string>());
  const auto specs = get_specs(p, "bases", "");
  Result r;
  json bases = json::array();
  std::string line;
  r.csv = "base,kappa,rendered,total_digits,large_digits\n";
  for (const auto& prof : multi_base_profile(n, specs)) {
    json b{{"spec", prof.spec.to_string()},
           {"rendered", prof.digits.render()},
           {"digits_lsb", prof.digits.digits},
           {"total", prof.total},
           {"large", prof.large}};
    if (p.contains("lo")) {
      const auto w = digit_window(prof.digits, prof.spec, Rational(parse_bigint(p.at("lo").get<std::string>())),
                                  Rational(parse_bigint(p.at("hi").get<std::string>())));
      b["window"] = {{"positions", w.positions}, {"large_positions", w.large_positions}};
    }
    bases.push_back(b);
    line += (line.empty() ? "" : " ") + prof.digits.render();
    r.csv += prof.spec.base().get_str() + "," + prof.spec.kappa().get_str() + "," + prof.digits.render() + "," +
             std::to_string(prof.total) + "," + std::to_string(prof.large) + "\n";
  }
  r.result = {{"n", n.get_str()}, {"bases", bases}};
  r.summary = line + "\n";
  return r;
}

// kummer ---------------------------------------------------------------------

json norm_kummer(const json& p)
{
  reject_unknown(p, {"n", "primes"});
  if (!has(p, "n"))
    fail_invalid("kummer needs 'n'");
  const BigInt n = parse_bigint(get_text(p, "n", "1"));
  if (n < 1)
    fail_invalid("n must be >= 1");
  const auto primes = get_u64_list(p, "primes", {3, 5, 7});
  for (auto q : primes)
    if (!is_prime_u64(q))
      fail_invalid(std::to_string(q) + " is not prime");
  return {{"n", n.get_str()}, {"primes", primes}};
}

Result run_kummer(const json& p)
{
  const BigInt n = parse_bigint(p.at("n").get<std::string>());
  const auto primes = p.at("primes").get<std::vector<std::uint64_t>>();
  const GrahamSplit s = graham_split(n, primes);
  Result r;
  json vals = json::object();
  json oracle = json::object();
  std::string line = "n=" + n.get_str();
  r.csv = "n";
  for (auto q : primes)
    r.csv += ",v_" + std::to_string(q);
  r.csv += ",n2,n2_log_ratio\n" + n.get_str();
  for (auto q : primes) {
    const auto v = s.valuations.at(q);
    vals[std::to_string(q)] = v;
    oracle[std::to_string(q)] = lucas_coprime_oracle(n, q) == (v == 0);
    line += " v_" + std::to_string(q) + "=" + std::to_string(v);
    r.csv += "," + std::to_string(v);
  }
  r.csv += "," + s.n2.get_str() + "," + fmt(s.n2_log_ratio, 17) + "\n";
  r.result = {{"n", n.get_str()},
              {"valuations", vals},
              {"n2", s.n2.get_str()},
              {"n2_log_ratio", s.n2_log_ratio},
              {"lucas_agrees", oracle}};
  r.summary = line + " n2=" + s.n2.get_str() + "\n";
  return r;
}

// egrs -----------------------------------------------------------------------

json norm_egrs(const json& p)
{
  reject_unknown(p, {"spec1", "spec2", "N", "budget", "policy"});
  const BaseSpec s1 = BaseSpec::parse(get_text(p, "spec1", "3:1/2"));
  const BaseSpec s2 = BaseSpec::parse(get_text(p, "spec2", "5:1/2"));
  s1.radix();
  s2.radix();
  const auto budget = get_u64(p, "budget", kDefaultEgrsBudget);
  if (budget == 0)
    fail_invalid("budget must be positive");
  const auto N = get_u64(p, "N", 12);
  if (N > 100000)
    fail_invalid("start exponent N is too large");
  return {{"spec1", s1.to_string()},
          {"spec2", s2.to_string()},
          {"N", N},
          {"budget", budget},
          {"policy", to_string(parse_egrs_policy(get_text(p, "policy", "smallest-first")))}};
}

Result run_egrs(const json& p)
{
  const BaseSpec s1 = BaseSpec::parse(p.at("spec1").get<std::string>());
  const BaseSpec s2 = BaseSpec::parse(p.at("spec2").get<std::string>());
  const auto budget = p.at("budget").get<std::uint64_t>();
  const EgrsTrace t = egrs_construct(s1, s2, p.at("N").get<std::uint64_t>(), budget,
                                     parse_egrs_policy(p.at("policy").get<std::string>()));
  Result r;
  r.result = t;
  const std::string g1 = s1.base().get_str(), g2 = s2.base().get_str();
  std::ostringstream os;
  if (!t.condition_holds)
    os << "warning: the two-base sufficient condition fails for these bases; the repair is heuristic\n";
  const BigInt start = pow_ui(s1.radix(), t.start_exponent);
  os << "start " << g1 << "^" << t.start_exponent << " = " << start.get_str() << " = "
     << to_digits(start, s2.radix()).render() << "\n";
  r.csv = "step,exponent,multiplicity,offender_position,value,base1,base2\n";
  std::size_t i = 0;
  for (const auto& s : t.steps) {
    ++i;
    os << "+" << (s.multiplicity > 1 ? std::to_string(s.multiplicity) + "*" : "") << g1 << "^" << s.exponent
       << " -> " << s.value.get_str() << " = " << to_digits(s.value, s1.radix()).render() << " = "
       << to_digits(s.value, s2.radix()).render() << "\n";
    r.csv += std::to_string(i) + "," + std::to_string(s.exponent) + "," + std::to_string(s.multiplicity) + "," +
             std::to_string(s.offender_position) + "," + s.value.get_str() + "," +
             to_digits(s.value, s1.radix()).render() + "," + to_digits(s.value, s2.radix()).render() + "\n";
  }
  if (t.success) {
    os << "final " << t.final_value.get_str() << " = " << to_digits(t.final_value, s1.radix()).render() << " = "
       << to_digits(t.final_value, s2.radix()).render() << "\n";
  } else {
    os << "FAILED after " << t.nodes_expanded << " nodes; best partial " << t.final_value.get_str() << " with "
       << t.large1 << " large base-" << g1 << " and " << t.large2 << " large base-" << g2 << " digits\n";
    if (t.nodes_expanded >= budget)
      r.status = kBudget;
  }
  const std::vector<BaseSpec> both{s1, s2};
  os << render_digit_grid(t.final_value, both);
  r.summary = os.str();
  return r;
}

// blocks ---------------------------------------------------------------------

BlockConfig block_config(const json& p)
{
  BlockConfig c;
  c.specs = get_specs(p, "specs", "3:1/2,5:1/2");
  c.ell = get_u64(p, "ell", 2);
  c.h = get_u64(p, "h", 6);
  c.H = get_u64(p, "H", 512);
  c.c_pad = get_rational(p, "C_pad", "8", true);
  c.N = get_u64(p, "N", 12);
  c.threads = static_cast<unsigned>(get_u64(p, "threads", 1));
  if (c.N > 10000)
    fail_invalid("N is too large");
  c.validate();
  return c;
}

json norm_blocks(const json& p)
{
  reject_unknown(p, {"specs", "ell", "h", "H", "C_pad", "N", "threads"});
  const BlockConfig c = block_config(p);
  return {{"specs", specs_json(c.specs)}, {"ell", c.ell}, {"h", c.h},           {"H", c.H},
          {"C_pad", c.c_pad.get_str()},   {"N", c.N},     {"threads", c.threads}};
}

Result run_blocks(const json& p)
{
  const BlockConfig c = block_config(p);
  const BlockTrace t = block_construct(c);
  Result r;
  json j = t;
  json stab = json::array();
  bool all_stable = true;
  for (std::uint64_t n = 0; n <= c.N; ++n)
    for (const auto& s : c.specs) {
      const bool ok = stability_check(t, n, s);
      all_stable = all_stable && ok;
      if (!ok)
        stab.push_back({{"n", n}, {"base", s.to_string()}});
    }
  bool audit_ok = t.in_range;
  for (const auto& a : t.audits)
    audit_ok = audit_ok && a.sharp_large == 0 && a.search_window_violations == 0;
  j["stability_failures"] = stab;
  j["all_stable"] = all_stable;
  j["audit_ok"] = audit_ok;
  r.result = j;

  std::ostringstream os;
  os << "L = " << c.L().get_str() << ", H = " << c.H << ", C_pad = " << c.c_pad.get_str() << ", N = " << c.N << "\n";
  os << "shifts s_N..s_0:";
  for (std::uint64_t n = c.N + 1; n-- > 0;)
    os << " " << t.shifts[n];
  os << "\ngood blocks " << t.good_blocks.size() << ", bad blocks " << t.bad_blocks.size() << "\n";
  os << "b = " << t.b.get_str() << "\n";
  os << "audit " << (audit_ok ? "ok" : "FAILED") << ", stability " << (all_stable ? "ok" : "FAILED") << "\n";
  for (const auto& a : t.audits)
    os << "  base " << a.spec.to_string() << ": " << a.large_total << "/" << a.total_digits
       << " large (windows of good blocks " << a.sharp_large << "/" << a.sharp_positions << ", bad blocks "
       << a.flat_large << "/" << a.flat_positions << ", fringe " << a.fringe_large << "/" << a.fringe_positions
       << ")\n";
  os << render_digit_grid(t.b, c.specs);
  r.summary = os.str();

  r.csv = "n,shift,class\n";
  for (std::uint64_t n = c.N + 1; n-- > 0;) {
    const bool bad = std::find(t.bad_blocks.begin(), t.bad_blocks.end(), n) != t.bad_blocks.end();
    r.csv += std::to_string(n) + "," + std::to_string(t.shifts[n]) + "," + (n == c.N ? "top" : bad ? "bad" : "good") +
             "\n";
  }
  return r;
}

// spectrum -------------------------------------------------------------------

SpectrumQuery spectrum_query(const json& p)
{
  SpectrumQuery q;
  q.family.g = get_u64(p, "g", 5);
  q.family.t = get_u64(p, "t", 3);
  q.family.R = get_u64(p, "R", 2);
  if (has(p, "K"))
    q.K = get_u64(p, "K", 0);
  if (has(p, "eta"))
    q.eta = get_double(p, "eta", 0.5);
  if (has(p, "M"))
    q.M = get_u64(p, "M", 0);
  if (has(p, "delta"))
    q.delta = get_double(p, "delta", 0.0);
  if (!q.K && !q.eta && !q.M && !q.delta) {
    q.K = q.family.R;
    q.eta = 0.5;
  }
  q.validate();
  return q;
}

json norm_spectrum(const json& p)
{
  reject_unknown(p, {"g", "t", "R", "K", "eta", "M", "delta", "budget", "threads"});
  const SpectrumQuery q = spectrum_query(p);
  json out{{"g", q.family.g},
           {"t", q.family.t},
           {"R", q.family.R},
           {"budget", get_u64(p, "budget", kSpectrumBudget)},
           {"threads", get_u64(p, "threads", 1)}};
  if (q.k_mode()) {
    out["K"] = *q.K;
    out["eta"] = *q.eta;
  } else {
    out["M"] = *q.M;
    out["delta"] = *q.delta;
  }
  return out;
}

Result run_spectrum(const json& p)
{
  const SpectrumQuery q = spectrum_query(p);
  const auto hits = large_spectrum_enumerate(q, p.at("budget").get<std::uint64_t>(),
                                             static_cast<unsigned>(p.at("threads").get<std::uint64_t>()));
  const SpectrumBound b = spectrum_bound(q);
  const double size = q.family.size().get_d();
  Result r;
  r.csv = "k,magnitude,normalized\n";
  for (const auto& h : hits)
    r.csv += std::to_string(h.k) + "," + fmt(h.magnitude, 17) + "," + fmt(h.magnitude / size, 17) + "\n";
  const double count = static_cast<double>(hits.size());
  r.result = {{"params", p},
              {"frequencies", q.frequency_count().get_str()},
              {"eta", q.threshold()},
              {"count", hits.size()},
              {"bound", b.bound},
              {"log_bound", b.log_bound},
              {"ratio", count / b.bound},
              {"count_le_bound", count <= b.bound},
              {"second_form_exponent", b.second_form_exponent}};
  r.summary = "large spectrum: count " + std::to_string(hits.size()) + " of " + q.frequency_count().get_str() +
              " frequencies, bound " + fmt(b.bound) + (count <= b.bound ? ", count <= bound\n" : ", count > bound\n");
  return r;
}

// bump -----------------------------------------------------------------------

BumpParams bump_params(const json& p)
{
  BumpParams b;
  b.delta = get_rational(p, "delta", "1/10", true);
  b.J = get_u64(p, "J", 1);
  b.validate();
  return b;
}

json norm_bump(const json& p)
{
  reject_unknown(p, {"delta", "J", "tail_cap"});
  const BumpParams b = bump_params(p);
  const std::uint64_t cap = has(p, "tail_cap") ? get_u64(p, "tail_cap", 0) : bump_required_tail_cap(b);
  if (cap < 1 || cap > 100'000'000)
    fail_invalid("tail_cap must lie in [1, 1e8]");
  return {{"delta", b.delta.get_str()}, {"J", b.J}, {"tail_cap", cap}};
}

Result run_bump(const json& p)
{
  const BumpParams b = bump_params(p);
  const BumpReport rep = bump_property_report(b, p.at("tail_cap").get<std::uint64_t>());
  Result r;
  r.result = rep;
  std::ostringstream os;
  os << "delta = " << b.delta.get_str() << ", J = " << b.J << ", tail cap " << rep.tail_cap << "\n"
     << "coefficient sum " << fmt(rep.coeff_sum, 15) << " + tail <= " << fmt(rep.tail_upper, 3) << " vs 4/delta = "
     << fmt(rep.target, 15) << (rep.sum_ok ? "  ok" : "  EXCEEDED") << "\n"
     << "envelope violations " << rep.envelope_violations;
  if (rep.first_violation)
    os << " (first at k = " << *rep.first_violation << ", max ratio " << fmt(rep.max_envelope_ratio, 6) << ")";
  os << "\nsupport leak " << fmt(rep.support_leak, 3) << (rep.leak_ok ? "  ok" : "  ABOVE TAIL") << "\n";
  r.summary = os.str();
  r.csv = "k,coefficient,envelope\n";
  for (std::int64_t k = 0; k <= 64; ++k)
    r.csv += std::to_string(k) + "," + fmt(bump_fourier_coeff(b, k), 17) + "," + fmt(bump_envelope(b, k), 17) + "\n";
  return r;
}

// equidist -------------------------------------------------------------------

ExponentSystem exponent_system(const json& p, std::vector<std::uint64_t> default_bases)
{
  const auto bases = get_u64_list(p, "bases", std::move(default_bases));
  std::vector<Rational> zetas;
  if (has(p, "zetas"))
    for (const auto& s : split_list(p.at("zetas"), "zetas"))
      zetas.push_back(parse_exact_decimal(s));
  return ExponentSystem(bases, get_u64(p, "ell", 2), get_u64(p, "h", 1), zetas, get_bool(p, "allow_dependent", false));
}

json system_json(const ExponentSystem& s)
{
  json z = json::array();
  for (const auto& q : s.zetas())
    z.push_back(q.get_str());
  return {{"bases", s.bases()}, {"ell", s.ell()}, {"h", s.h()}, {"zetas", z}};
}

json norm_equidist(const json& p)
{
  reject_unknown(p, {"task", "bases", "ell", "h", "zetas", "allow_dependent", "epsilon", "N", "grid", "eps_grid", "n",
                     "xs", "cs", "points", "threads", "budget", "precision_bits"});
  const std::string task = get_text(p, "task", "census");
  check_precision(p, kEquidistPrecision);
  json out{{"task", task}, {"precision_bits", kEquidistPrecision}};
  if (task == "separation") {
    auto dl = [&](const char* key) {
      if (!has(p, key))
        fail_invalid(std::string("separation needs '") + key + "'");
      std::vector<double> v;
      const json& x = p.at(key);
      if (x.is_array() && std::all_of(x.begin(), x.end(), [](const json& e) { return e.is_number(); }))
        return x.get<std::vector<double>>();
      for (const auto& s : split_list(x, key))
        v.push_back(get_double(json{{key, s}}, key, 0.0));
      return v;
    };
    const auto xs = dl("xs"), cs = dl("cs"), pts = dl("points");
    power_sum_separation_check(xs, cs, pts);
    out.update({{"xs", xs}, {"cs", cs}, {"points", pts}});
    return out;
  }
  const ExponentSystem sys = exponent_system(p, {3, 5});
  out.update(system_json(sys));
  out["allow_dependent"] = get_bool(p, "allow_dependent", false);
  if (task == "census") {
    const Rational eps = get_rational(p, "epsilon", "1/10", true);
    if (eps <= 0)
      fail_invalid("epsilon must be positive");
    const auto N = get_u64(p, "N", 100000);
    const auto budget = get_u64(p, "budget", kCensusBudget);
    if (N < 1)
      fail_invalid("N must be >= 1");
    if (N > budget)
      fail_budget("census range exceeds the scan budget");
    json grid = json::array();
    if (has(p, "eps_grid"))
      for (const auto& s : split_list(p.at("eps_grid"), "eps_grid"))
        grid.push_back(parse_exact_decimal(s).get_str());
    out.update({{"epsilon", eps.get_str()}, {"N", N}, {"eps_grid", grid}, {"budget", budget},
                {"threads", get_u64(p, "threads", 1)}});
  } else if (task == "discrepancy") {
    if (sys.r() > 3)
      fail_invalid("box-count discrepancy supports dimension <= 3");
    out.update({{"N", get_u64(p, "N", 100000)}, {"grid", get_u64(p, "grid", sys.r() == 1 ? 1024 : 32)}});
  } else if (task == "norm") {
    out["n"] = get_u64_list(p, "n", {0, 1, 2, 3, 4, 5, 6, 7});
  } else {
    fail_invalid("unknown equidist task '" + task + "' (census|discrepancy|norm|separation)");
  }
  return out;
}

Result run_equidist(const json& p)
{
  const std::string task = p.at("task").get<std::string>();
  Result r;
  if (task == "separation") {
    const auto rep = power_sum_separation_check(p.at("xs").get<std::vector<double>>(), p.at("cs").get<std::vector<double>>(),
                                                p.at("points").get<std::vector<double>>());
    r.result = {{"max_abs", rep.max_abs}, {"delta", rep.delta}, {"ratio", rep.ratio}};
    r.summary = "max |f| = " + fmt(rep.max_abs) + ", Delta = " + fmt(rep.delta) + ", ratio = " + fmt(rep.ratio) + "\n";
    r.csv = "max_abs,delta,ratio\n" + fmt(rep.max_abs, 17) + "," + fmt(rep.delta, 17) + "," + fmt(rep.ratio, 17) + "\n";
    return r;
  }
  const ExponentSystem sys = exponent_system(p, {});
  if (task == "census") {
    std::vector<Rational> grid;
    for (const auto& s : p.at("eps_grid"))
      grid.push_back(parse_rational(s.get<std::string>()));
    const auto rep = bad_n_census(sys, parse_rational(p.at("epsilon").get<std::string>()), p.at("N").get<std::uint64_t>(),
                                  grid, 1000, p.at("budget").get<std::uint64_t>(),
                                  static_cast<unsigned>(p.at("threads").get<std::uint64_t>()));
    r.result = rep;
    r.csv = "epsilon,count,indeterminate,fraction\n";
    std::ostringstream os;
    os << "bad n census over n = 1.." << rep.N << "\n";
    for (const auto& row : rep.grid) {
      const double frac = static_cast<double>(row.count) / static_cast<double>(rep.N);
      r.csv += row.epsilon.get_str() + "," + std::to_string(row.count) + "," + std::to_string(row.indeterminate) + "," +
               fmt(frac, 17) + "\n";
      os << "  eps " << row.epsilon.get_str() << ": " << row.count << " (" << fmt(frac, 6) << ")";
      if (row.indeterminate)
        os << ", " << row.indeterminate << " indeterminate";
      os << "\n";
    }
    if (rep.empirical_exponent)
      os << "empirical exponent " << fmt(*rep.empirical_exponent, 6) << " (reference 1/r = " << fmt(1.0 / sys.r(), 6)
         << ")\n";
    r.summary = os.str();
    if (rep.indeterminate)
      r.status = kIndeterminate;
  } else if (task == "discrepancy") {
    const auto rep = discrepancy_estimate(sys, p.at("N").get<std::uint64_t>(), p.at("grid").get<std::uint64_t>());
    r.result = rep;
    r.csv = "N,grid,estimate,bound\n" + std::to_string(rep.N) + "," + std::to_string(rep.grid) + "," +
            fmt(rep.estimate, 17) + "," + fmt(rep.bound, 17) + "\n";
    r.summary = "discrepancy estimate " + fmt(rep.estimate) + " (grid bound " + fmt(rep.bound) + ") for N = " +
                std::to_string(rep.N) + "\n";
  } else {
    json rows = json::array();
    r.csv = "n";
    for (std::size_t j = 0; j < sys.r(); ++j)
      r.csv += ",frac_" + std::to_string(sys.bases()[j]);
    r.csv += ",norm,error\n";
    std::ostringstream os;
    for (auto n : p.at("n").get<std::vector<std::uint64_t>>()) {
      const auto fr = frac_exponents_double(sys, n);
      const auto nv = power_sum_norm(sys, n);
      rows.push_back({{"n", n}, {"frac", fr}, {"norm", nv.value}, {"error", nv.error},
                      {"norm_digits", nv.enclosure.to_string(40)}});
      r.csv += std::to_string(n);
      for (double f : fr)
        r.csv += "," + fmt(f, 17);
      r.csv += "," + fmt(nv.value, 17) + "," + fmt(nv.error, 3) + "\n";
      os << "n = " << n << ": norm " << nv.enclosure.to_string(25) << " (+- " << fmt(nv.error, 2) << ")\n";
    }
    r.result = {{"rows", rows}};
    r.summary = os.str();
  }
  return r;
}

// lattice --------------------------------------------------------------------

json norm_lattice(const json& p)
{
  reject_unknown(p, {"bases", "ell", "h", "M", "Ms", "allow_dependent", "budget", "precision_bits", "zetas"});
  check_precision(p, kEquidistPrecision);
  const ExponentSystem sys = exponent_system(p, {3, 5});
  json out = system_json(sys);
  std::vector<std::uint64_t> Ms = has(p, "Ms") ? get_u64_list(p, "Ms", {}) : std::vector<std::uint64_t>{get_u64(p, "M", 10)};
  if (!has(p, "ell"))
    out["ell"] = 2;
  for (auto M : Ms)
    if (M < 1)
      fail_invalid("M must be >= 1");
  out.erase("zetas");
  out.update({{"Ms", Ms}, {"allow_dependent", get_bool(p, "allow_dependent", false)},
              {"budget", get_u64(p, "budget", kLatticeBudget)}, {"precision_bits", kEquidistPrecision}});
  return out;
}

Result run_lattice(const json& p)
{
  const ExponentSystem sys = exponent_system(p, {});
  Result r;
  json rows = json::array();
  r.csv = "M,vectors,min_norm,error,argmin,reference\n";
  std::ostringstream os;
  for (auto M : p.at("Ms").get<std::vector<std::uint64_t>>()) {
    const auto rep = lattice_min_combination(sys, M, p.at("budget").get<std::uint64_t>());
    rows.push_back(rep);
    std::string am;
    for (std::size_t i = 0; i < rep.argmin.size(); ++i)
      am += (i ? " " : "") + std::to_string(rep.argmin[i]);
    r.csv += std::to_string(M) + "," + std::to_string(rep.vectors) + "," + fmt(rep.min_norm_value, 17) + "," +
             fmt(rep.min_norm_error, 3) + "," + am + "," + fmt(rep.reference, 17) + "\n";
    os << "M = " << M << ": min over " << rep.vectors << " vectors " << rep.min_norm.to_string(20) << " at (" << am
       << "), M^-r = " << fmt(rep.reference) << "\n";
  }
  r.result = {{"rows", rows}};
  r.summary = os.str();
  return r;
}

// conditions -----------------------------------------------------------------

json norm_conditions(const json& p)
{
  reject_unknown(p, {"condition", "specs", "threshold", "r", "kappa", "precision_bits"});
  const ConditionKind kind = parse_condition_kind(get_text(p, "condition", "conjecture"));
  check_precision(p, kCriteriaPrecision);
  json out{{"condition", to_string(kind)}, {"precision_bits", kCriteriaPrecision}};
  if (get_bool(p, "threshold", false)) {
    const auto r = get_u64(p, "r", 3);
    const Rational kappa = get_rational(p, "kappa", "1/2", false);
    if (r < 1 || r > 64)
      fail_invalid("r must lie in [1, 64]");
    if (kind == ConditionKind::kTwoBase && r != 2)
      fail_invalid("the two-base condition has r = 2");
    if (kappa <= 0 || kappa > 1)
      fail_invalid("kappa must lie in (0, 1]");
    out.update({{"threshold", true}, {"r", r}, {"kappa", kappa.get_str()}});
    return out;
  }
  const auto specs = get_specs(p, "specs", "3:1/2,5:1/2,7:1/2");
  if (kind == ConditionKind::kTwoBase && specs.size() != 2)
    fail_invalid("the two-base condition takes exactly two bases");
  out.update({{"threshold", false}, {"specs", specs_json(specs)}});
  return out;
}

Result run_conditions(const json& p)
{
  const ConditionKind kind = parse_condition_kind(p.at("condition").get<std::string>());
  Result r;
  if (p.at("threshold").get<bool>()) {
    const auto rep = equal_base_threshold(p.at("r").get<std::uint64_t>(), parse_rational(p.at("kappa").get<std::string>()), kind);
    r.result = rep;
    std::ostringstream os;
    os << to_string(kind) << " condition, r = " << rep.r << ", kappa = " << rep.kappa.get_str() << ", equal bases\n";
    os << "least g: " << (rep.min_g ? rep.min_g->get_str() : std::string("not found")) << "\n";
    os << "least power of ten: "
       << (rep.min_power_of_ten ? "10^" + std::to_string(*rep.min_power_of_ten) : std::string("not found")) << "\n";
    if (!rep.monotone)
      os << "note: not monotone in g";
    if (!rep.nonmonotone_examples.empty()) {
      os << " (holds at g but fails at g+1 for g =";
      for (auto g : rep.nonmonotone_examples)
        os << " " << g;
      os << ")";
    }
    if (!rep.monotone)
      os << "\n";
    r.summary = os.str();
    r.csv = "condition,r,kappa,min_g,min_power_of_ten\n" + to_string(kind) + "," + std::to_string(rep.r) + "," +
            rep.kappa.get_str() + "," + (rep.min_g ? rep.min_g->get_str() : "") + "," +
            (rep.min_power_of_ten ? std::to_string(*rep.min_power_of_ten) : "") + "\n";
    return r;
  }
  const auto specs = get_specs(p, "specs", "");
  const ConditionReport rep = evaluate_condition(kind, specs);
  r.result = rep;
  std::ostringstream os;
  os << to_string(kind) << " sum = " << rep.value_digits(25);
  if (rep.exact)
    os << " (exactly " << rep.exact->get_str() << ")";
  os << " " << (rep.strict ? "<" : ">=") << " " << rep.threshold.get_str() << ": " << to_string(rep.verdict) << "\n";
  r.csv = "base,kappa,argument,term\n";
  for (const auto& t : rep.terms) {
    os << "  " << t.spec.to_string() << "  " << t.value.to_string(20) << "\n";
    r.csv += t.spec.base().get_str() + "," + t.spec.kappa().get_str() + "," + t.argument.get_str() + "," +
             t.value.to_string(30) + "\n";
  }
  r.summary = os.str();
  if (rep.verdict == Verdict::kIndeterminate)
    r.status = kIndeterminate;
  return r;
}

// search ---------------------------------------------------------------------

json norm_search(const json& p)
{
  reject_unknown(p, {"specs", "limit", "driver", "include_zero", "threads", "budget", "checkpoint", "resume",
                     "checkpoint_every", "stop_after", "density"});
  SearchSpec ss;
  ss.specs = get_specs(p, "specs", "3:1/2,5:1/2,7:1/2");
  std::uint64_t def_limit = 1000;
  if (has(p, "density")) {
    const auto Ns = get_u64_list(p, "density", {});
    if (!Ns.empty())
      def_limit = *std::max_element(Ns.begin(), Ns.end());
  }
  ss.limit = get_u64(p, "limit", def_limit);
  if (has(p, "driver"))
    ss.driver = get_u64(p, "driver", 0);
  ss.include_zero = get_bool(p, "include_zero", true);
  ss.threads = static_cast<unsigned>(get_u64(p, "threads", 1));
  ss.budget = get_u64(p, "budget", kStreamBudget);
  ss.validate();
  const BigInt stream = count_small_below(ss.specs[ss.driver_index()], from_u64(ss.limit));
  if (stream > from_u64(ss.budget))
    fail_budget("driver stream of " + stream.get_str() + " values exceeds the budget");
  json out{{"specs", specs_json(ss.specs)}, {"limit", ss.limit},     {"driver", ss.driver_index()},
           {"include_zero", ss.include_zero}, {"threads", ss.threads}, {"budget", ss.budget}};
  if (has(p, "density")) {
    auto Ns = get_u64_list(p, "density", {});
    for (auto N : Ns)
      if (N < 2 || N > ss.limit)
        fail_invalid("density N values must lie in [2, limit]");
    out["density"] = Ns;
  }
  if (has(p, "checkpoint")) {
    out["checkpoint"] = get_text(p, "checkpoint", "");
    out["resume"] = get_bool(p, "resume", false);
    out["checkpoint_every"] = get_u64(p, "checkpoint_every", 64);
  }
  if (has(p, "stop_after"))
    out["stop_after"] = get_u64(p, "stop_after", 0);
  return out;
}

Result run_search(const json& p)
{
  SearchSpec ss;
  ss.specs = get_specs(p, "specs", "");
  ss.limit = p.at("limit").get<std::uint64_t>();
  ss.driver = p.at("driver").get<std::size_t>();
  ss.include_zero = p.at("include_zero").get<bool>();
  ss.threads = static_cast<unsigned>(p.at("threads").get<std::uint64_t>());
  ss.budget = p.at("budget").get<std::uint64_t>();
  Result r;
  if (p.contains("density")) {
    const auto rep = density_vs_heuristic(ss.specs, p.at("density").get<std::vector<std::uint64_t>>(), ss.threads, ss.budget);
    r.result = {{"Ns", rep.Ns},
                {"counts", rep.counts},
                {"exponents", rep.exponents},
                {"fitted_exponent", rep.fitted_exponent ? json(*rep.fitted_exponent) : json()},
                {"heuristic_exponent", rep.heuristic_exponent}};
    r.csv = "N,count,exponent\n";
    std::ostringstream os;
    for (std::size_t i = 0; i < rep.Ns.size(); ++i) {
      r.csv += std::to_string(rep.Ns[i]) + "," + std::to_string(rep.counts[i]) + "," + fmt(rep.exponents[i], 17) + "\n";
      os << "N = " << rep.Ns[i] << ": " << rep.counts[i] << " hits, exponent " << fmt(rep.exponents[i], 6) << "\n";
    }
    os << "fitted exponent " << (rep.fitted_exponent ? fmt(*rep.fitted_exponent, 6) : std::string("n/a"))
       << ", heuristic " << fmt(rep.heuristic_exponent, 6) << "\n";
    r.summary = os.str();
    return r;
  }
  CheckpointOptions ck;
  if (p.contains("checkpoint")) {
    ck.path = p.at("checkpoint").get<std::string>();
    ck.resume = p.at("resume").get<bool>();
    ck.every = p.at("checkpoint_every").get<std::uint64_t>();
  }
  if (p.contains("stop_after"))
    ck.stop_after = p.at("stop_after").get<std::uint64_t>();
  const SearchResult res = multi_base_search(ss, ck);
  r.result = {{"hits", res.hits},
              {"count", res.hits.size()},
              {"digest", res.digest},
              {"complete", res.complete},
              {"prefixes_done", res.prefixes_done},
              {"prefixes_total", res.prefixes_total},
              {"driver", ss.specs[ss.driver_index()].to_string()}};
  r.csv = hits_csv(res.hits, ss.specs);
  std::ostringstream os;
  os << res.hits.size() << " hits below " << ss.limit << (res.complete ? "" : " (partial run)") << ":";
  for (std::size_t i = 0; i < res.hits.size() && i < 50; ++i)
    os << " " << res.hits[i];
  if (res.hits.size() > 50)
    os << " ...";
  os << "\n";
  r.summary = os.str();
  return r;
}

// census ---------------------------------------------------------------------

json norm_census(const json& p)
{
  reject_unknown(p, {"limit", "primes", "cross_check", "budget"});
  const auto limit = get_u64(p, "limit", 1000);
  const auto primes = get_u64_list(p, "primes", {3, 5, 7});
  const auto budget = get_u64(p, "budget", kStreamBudget);
  if (limit > budget)
    fail_budget("census limit exceeds the budget");
  for (auto q : primes)
    if (!is_prime_u64(q))
      fail_invalid(std::to_string(q) + " is not prime");
  return {{"limit", limit}, {"primes", primes}, {"cross_check", get_bool(p, "cross_check", true)}, {"budget", budget}};
}

Result run_census(const json& p)
{
  const auto limit = p.at("limit").get<std::uint64_t>();
  const auto primes = p.at("primes").get<std::vector<std::uint64_t>>();
  const GrahamCensus c = graham_census(limit, primes, p.at("budget").get<std::uint64_t>());
  Result r;
  r.result = {{"limit", limit}, {"primes", primes}, {"hits", c.hits}, {"count", c.hits.size()}};
  if (p.at("cross_check").get<bool>()) {
    SearchSpec ss;
    for (auto q : primes)
      ss.specs.emplace_back(q, Rational(1, 2));
    ss.limit = limit + 1;
    ss.include_zero = false;
    const auto res = multi_base_search(ss);
    r.result["cross_check_equal"] = res.hits == c.hits;
  }
  std::vector<BaseSpec> specs;
  for (auto q : primes)
    specs.emplace_back(q, Rational(1, 2));
  r.csv = hits_csv(c.hits, specs);
  std::ostringstream os;
  os << c.hits.size() << " n in [1, " << limit << "] with binom(2n, n) coprime to";
  for (auto q : primes)
    os << " " << q;
  os << ":";
  for (std::size_t i = 0; i < c.hits.size() && i < 50; ++i)
    os << " " << c.hits[i];
  if (c.hits.size() > 50)
    os << " ...";
  os << "\n";
  if (r.result.contains("cross_check_equal"))
    os << "digit search cross-check: " << (r.result["cross_check_equal"].get<bool>() ? "equal" : "MISMATCH") << "\n";
  r.summary = os.str();
  return r;
}

const std::map<std::string, Command>& table()
{
  static const std::map<std::string, Command> t{
      {"digits", {norm_digits, run_digits}},       {"kummer", {norm_kummer, run_kummer}},
      {"egrs", {norm_egrs, run_egrs}},             {"blocks", {norm_blocks, run_blocks}},
      {"spectrum", {norm_spectrum, run_spectrum}}, {"bump", {norm_bump, run_bump}},
      {"equidist", {norm_equidist, run_equidist}}, {"lattice", {norm_lattice, run_lattice}},
      {"conditions", {norm_conditions, run_conditions}}, {"search", {norm_search, run_search}},
      {"census", {norm_census, run_census}},
  };
  return t;
}

const Command& find(const std::string& command)
{
  const auto& t = table();
  auto it = t.find(command);
  if (it == t.end())
    fail_invalid("unknown command '" + command + "'");
  return it->second;
}

} // namespace

const std::vector<std::string>& commands()
{
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : table())
      v.push_back(k);
    return v;
  }();
  return names;
}

json normalize(const std::string& command, const json& params)
{
  return find(command).normalize(params.is_null() ? json::object() : params);
}

Result run(const std::string& command, const json& params)
{
  const Command& c = find(command);
  const json p = c.normalize(params.is_null() ? json::object() : params);
  return c.run(p);
}

} // namespace smalldig::service
