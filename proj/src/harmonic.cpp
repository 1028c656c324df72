#include "smalldig/harmonic.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "smalldig/error.hpp"

namespace smalldig {

using i128 = __int128;
using u128 = unsigned __int128;

namespace {

constexpr double kPi = std::numbers::pi;

// sin(pi * num / den) for den > 0, reducing num mod 2 den exactly first.
double sin_pi_frac(i128 num, i128 den)
{
  const i128 two = 2 * den;
  num %= two;
  if (num <= -den)
    num += two;
  else if (num > den)
    num -= two;
  // now num/den in (-1, 1]; fold into [-1/2, 1/2]
  if (2 * num > den)
    num = den - num;
  else if (2 * num < -den)
    num = -den - num;
  if (num == 0)
    return 0.0;
  return std::sin(kPi * static_cast<double>(num) / static_cast<double>(den));
}

double cos_pi_frac(i128 num, i128 den)
{
  // cos(pi x) = sin(pi (x + 1/2))
  return sin_pi_frac(2 * num + den, 2 * den);
}

BigInt mod_nonneg(const BigInt& k, const BigInt& m)
{
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), k.get_mpz_t(), m.get_mpz_t());
  return r;
}

// Word-sized fast path: everything fits comfortably in 128-bit intermediates.
bool small_modulus(const SmallDigitFamily& f)
{
  return f.modulus() < BigInt(1UL << 62);
}

// Riesz product with residues in machine words; f.modulus() < 2^62.
ExpSum product_small(const SmallDigitFamily& f, std::uint64_t k)
{
  const std::uint64_t gR = to_u64(f.modulus());
  const i128 t = static_cast<i128>(f.t);
  k %= gR;
  double prod = 1.0;
  i128 phase = 0; // sum of centred residues
  std::uint64_t r = k;
  for (std::uint64_t i = 0; i < f.R; ++i) {
    const i128 c = (2 * static_cast<u128>(r) <= gR) ? static_cast<i128>(r) : static_cast<i128>(r) - gR;
    if (c != 0)
      prod *= sin_pi_frac(t * c, gR) / sin_pi_frac(c, gR);
    else
      prod *= static_cast<double>(f.t);
    phase += c;
    r = static_cast<std::uint64_t>((static_cast<u128>(r) * f.g) % gR);
  }
  // each geometric sum is e((t-1) c / (2 gR)) times the real ratio
  const i128 num = ((t - 1) * phase) % (2 * static_cast<i128>(gR));
  ExpSum s;
  s.re = prod * cos_pi_frac(num, gR);
  s.im = prod * sin_pi_frac(num, gR);
  s.magnitude = std::fabs(prod);
  return s;
}

double sin_pi_big(const BigInt& num, const BigInt& den)
{
  // reduce to a word-sized fraction with the same value mod 2 (to double accuracy)
  BigInt two = 2 * den;
  BigInt r = mod_nonneg(num, two);
  if (r > den)
    r -= two;
  const double x = Rational(r, den).get_d();
  if (x == 0.0)
    return 0.0;
  double y = x;
  if (y > 0.5)
    y = 1.0 - y;
  else if (y < -0.5)
    y = -1.0 - y;
  return std::sin(kPi * y);
}

ExpSum product_big(const SmallDigitFamily& f, const BigInt& k)
{
  const BigInt gR = f.modulus();
  BigInt r = mod_nonneg(k, gR);
  double prod = 1.0;
  BigInt phase = 0;
  const BigInt t = from_u64(f.t);
  for (std::uint64_t i = 0; i < f.R; ++i) {
    BigInt c = r;
    if (2 * c > gR)
      c -= gR;
    if (c != 0)
      prod *= sin_pi_big(t * c, gR) / sin_pi_big(c, gR);
    else
      prod *= static_cast<double>(f.t);
    phase += c;
    r = mod_nonneg(r * static_cast<unsigned long>(f.g), gR);
  }
  const BigInt num = (t - 1) * phase;
  ExpSum s;
  s.re = prod * sin_pi_big(2 * num + gR, 2 * gR);
  s.im = prod * sin_pi_big(num, gR);
  s.magnitude = std::fabs(prod);
  return s;
}

} // namespace

void SmallDigitFamily::validate() const
{
  if (g < 2)
    fail_invalid("family base must be >= 2");
  if (t < 1 || t >= g)
    fail_invalid("family digit bound t must satisfy 1 <= t < g");
  if (R < 1)
    fail_invalid("family length R must be >= 1");
}

ExpSum exp_sum_product(const SmallDigitFamily& f, const BigInt& k)
{
  f.validate();
  if (small_modulus(f)) {
    const BigInt r = mod_nonneg(k, f.modulus());
    return product_small(f, r.get_ui());
  }
  return product_big(f, k);
}

ExpSum exp_sum_direct(const SmallDigitFamily& f, const BigInt& k, std::uint64_t cap)
{
  f.validate();
  if (f.size() > from_u64(cap))
    fail_budget("direct exponential sum over t^R = " + f.size().get_str() + " elements exceeds the cap");
  const BigInt gR = f.modulus();
  const BigInt kr = mod_nonneg(k, gR);
  std::vector<std::uint64_t> digits(f.R, 0);
  long double re = 0, im = 0;
  const bool small = small_modulus(f);
  const std::uint64_t gRs = small ? gR.get_ui() : 0, ks = small ? kr.get_ui() : 0;
  std::vector<BigInt> powers;
  for (std::uint64_t i = 0; i < f.R; ++i)
    powers.push_back(pow_ui(f.g, i));
  while (true) {
    BigInt n = 0;
    for (std::uint64_t i = 0; i < f.R; ++i)
      n += powers[i] * static_cast<unsigned long>(digits[i]);
    // e(x) = cos(2 pi x) + i sin(2 pi x), x = n k / g^R
    if (small) {
      const i128 r = static_cast<i128>((static_cast<u128>(n.get_ui()) * ks) % gRs);
      re += cos_pi_frac(2 * r, gRs);
      im += sin_pi_frac(2 * r, gRs);
    } else {
      const BigInt r = mod_nonneg(n * kr, gR);
      re += sin_pi_big(4 * r + gR, 2 * gR);
      im += sin_pi_big(2 * r, gR);
    }
    std::uint64_t i = 0;
    while (i < f.R && ++digits[i] == f.t)
      digits[i++] = 0;
    if (i == f.R)
      break;
  }
  ExpSum s;
  s.re = static_cast<double>(re);
  s.im = static_cast<double>(im);
  s.magnitude = std::hypot(s.re, s.im);
  return s;
}

// ---------------------------------------------------------------------------
// Spectrum

void SpectrumQuery::validate() const
{
  family.validate();
  const bool km = K.has_value() || eta.has_value();
  const bool mm = M.has_value() || delta.has_value();
  if (km == mm)
    fail_invalid("spectrum query needs exactly one of (K, eta) or (M, delta)");
  if (km) {
    if (!K || !eta)
      fail_invalid("(K, eta) mode needs both K and eta");
    if (!(*eta > 0.0 && *eta <= 1.0))
      fail_invalid("eta must lie in (0, 1]");
  } else {
    if (!M || !delta)
      fail_invalid("(M, delta) mode needs both M and delta");
    if (*M < 1)
      fail_invalid("M must be >= 1");
    if (!(*delta >= 0.0))
      fail_invalid("delta must be >= 0");
  }
}

double SpectrumQuery::threshold() const
{
  if (k_mode())
    return *eta;
  return std::pow(static_cast<double>(*M), -*delta);
}

BigInt SpectrumQuery::frequency_count() const
{
  return k_mode() ? pow_ui(family.g, *K) : from_u64(*M);
}

std::uint64_t SpectrumQuery::effective_K() const
{
  if (k_mode())
    return *K;
  std::uint64_t k = 0;
  for (BigInt p = 1; p < from_u64(*M); p *= static_cast<unsigned long>(family.g))
    ++k;
  return k;
}

std::vector<SpectrumHit> large_spectrum_enumerate(const SpectrumQuery& q, std::uint64_t budget, unsigned threads)
{
  q.validate();
  const BigInt count = q.frequency_count();
  if (count > from_u64(budget))
    fail_budget("spectrum scan of " + count.get_str() + " frequencies exceeds the budget");
  const std::uint64_t n = count.get_ui();
  const double size = q.family.size().get_d();
  const double slack = 4.0 * static_cast<double>(q.family.R + 1) * DBL_EPSILON;
  const double thr = q.threshold() * size * (1.0 - slack);
  const bool small = small_modulus(q.family);

  const unsigned T = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(n, 1))));
  std::vector<std::vector<SpectrumHit>> parts(T);
  auto work = [&](unsigned w) {
    const std::uint64_t lo = n / T * w + std::min<std::uint64_t>(w, n % T);
    const std::uint64_t hi = lo + n / T + (w < n % T ? 1 : 0);
    for (std::uint64_t k = lo; k < hi; ++k) {
      const ExpSum s = small ? product_small(q.family, k) : product_big(q.family, from_u64(k));
      if (s.magnitude >= thr)
        parts[w].push_back({k, s.magnitude});
    }
  };
  if (T == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < T; ++w)
      pool.emplace_back(work, w);
    for (auto& th : pool)
      th.join();
  }
  std::vector<SpectrumHit> out;
  for (auto& p : parts)
    out.insert(out.end(), p.begin(), p.end());
  return out;
}

SpectrumBound spectrum_bound(const SpectrumQuery& q)
{
  q.validate();
  const auto& f = q.family;
  const double K = static_cast<double>(q.effective_K());
  const double eta = q.threshold();
  const double t = static_cast<double>(f.t), g = static_cast<double>(f.g);
  const double m = std::min(static_cast<double>(f.R), K);
  SpectrumBound b;
  b.log_bound = m * std::log(10.0 / t) + 2.0 * std::sqrt(K * std::log(t) * std::log(1.0 / eta)) + K * std::log(g);
  b.bound = std::exp(b.log_bound);
  const double delta = q.k_mode() ? 0.0 : *q.delta;
  b.second_form_exponent = std::log(10.0 * g / t) / std::log(g) + 2.0 * std::sqrt(delta);
  return b;
}

std::vector<GammaVector> gamma_vectors(const GammaParams& p, std::uint64_t budget)
{
  const std::size_t r = p.families.size();
  if (r == 0)
    fail_invalid("gamma vectors need at least one family");
  if (p.M < 2)
    fail_invalid("M must be >= 2");
  if (p.h < 1)
    fail_invalid("h must be >= 1");
  if (!p.deltas.empty() && p.deltas.size() != r)
    fail_invalid("one delta per base is required");
  for (const auto& f : p.families)
    f.validate();

  // box volume check
  long double vol = 1;
  for (std::size_t j = 0; j < r; ++j)
    vol *= static_cast<long double>(2 * p.M - 1);
  if (vol > static_cast<long double>(budget))
    fail_budget("gamma vector box exceeds the enumeration budget");

  std::vector<double> deltas = p.deltas;
  if (deltas.empty())
    for (const auto& f : p.families)
      deltas.push_back(std::pow(static_cast<double>(f.g), -static_cast<double>(f.R + 1)));
  for (double d : deltas)
    if (!(d > 0.0 && d < 1.0))
      fail_invalid("deltas must lie in (0, 1)");
  const double dmin = *std::min_element(deltas.begin(), deltas.end());
  const double L2 = std::pow(std::log(1.0 / dmin), 2);

  const std::int64_t Mi = static_cast<std::int64_t>(p.M);
  std::vector<std::vector<double>> mags(r);
  std::vector<std::int64_t> caps(r);
  double size = 1.0;
  for (std::size_t j = 0; j < r; ++j) {
    const auto& f = p.families[j];
    size *= f.size().get_d();
    mags[j].resize(p.M);
    for (std::uint64_t k = 0; k < p.M; ++k)
      mags[j][k] = exp_sum_product(f, from_u64(k)).magnitude;
    const double c = p.C1 * L2 / deltas[j];
    caps[j] = c >= static_cast<double>(Mi) ? Mi - 1 : static_cast<std::int64_t>(std::floor(c));
  }

  const double expo = -static_cast<double>(r + 1) / static_cast<double>(p.h);
  std::vector<GammaVector> out;
  std::vector<std::int64_t> k(r);
  for (std::size_t j = 0; j < r; ++j)
    k[j] = -caps[j];
  if (std::any_of(caps.begin(), caps.end(), [](std::int64_t c) { return c < 0; }))
    return out;
  while (true) {
    std::int64_t norm = 0;
    for (auto x : k)
      norm = std::max<std::int64_t>(norm, x < 0 ? -x : x);
    if (2 * norm >= Mi) {
      double m = 1.0;
      for (std::size_t j = 0; j < r; ++j)
        m *= mags[j][static_cast<std::size_t>(k[j] < 0 ? -k[j] : k[j])];
      const double thr = p.c2 * std::pow(static_cast<double>(norm), expo) * size;
      if (m >= thr * (1.0 - 1e-12))
        out.push_back({k, m});
    }
    std::size_t j = r;
    while (j-- > 0) {
      if (k[j] < caps[j]) {
        ++k[j];
        break;
      }
      k[j] = -caps[j];
      if (j == 0)
        return out;
    }
  }
}

// ---------------------------------------------------------------------------
// Bump function

void BumpParams::validate() const
{
  if (!(delta > 0 && delta < 1))
    fail_invalid("bump width delta must lie in (0, 1)");
  if (J < 1 || J > 64)
    fail_invalid("bump order J must lie in [1, 64]");
}

double sin_pi(const Rational& x)
{
  return sin_pi_big(x.get_num(), x.get_den());
}

namespace {

// c_j delta as word-sized fractions, for the hot loops.
struct BumpEval {
  std::vector<std::pair<i128, i128>> a; // numerator, denominator
  std::vector<double> a_d;

  explicit BumpEval(const BumpParams& p)
  {
    for (std::uint64_t j = 1; j <= p.J; ++j) {
      const Rational c = BumpParams::coefficient(j) * p.delta;
      if (!c.get_num().fits_slong_p() || !c.get_den().fits_slong_p() || c.get_den() > BigInt(1L << 40))
        fail_invalid("bump width has too large a denominator");
      a.emplace_back(c.get_num().get_si(), c.get_den().get_si());
      a_d.push_back(c.get_d());
    }
  }

  double coeff(std::int64_t k) const
  {
    if (k == 0)
      return 1.0;
    double v = 1.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double s = sin_pi_frac(static_cast<i128>(k) * a[j].first, a[j].second);
      if (s == 0.0)
        return 0.0;
      const double x = kPi * a_d[j] * static_cast<double>(k);
      const double q = s / x;
      v *= q * q;
    }
    return v;
  }
};

} // namespace

double bump_fourier_coeff(const BumpParams& p, std::int64_t k)
{
  p.validate();
  return BumpEval(p).coeff(k);
}

double bump_envelope(const BumpParams& p, std::int64_t k)
{
  p.validate();
  if (k == 0)
    return 1.0;
  const double J = static_cast<double>(p.J);
  const double dk = p.delta.get_d() * std::fabs(static_cast<double>(k));
  const double lg = 2.0 * J * (std::log(J * J) - std::log(dk));
  return lg >= 0.0 ? 1.0 : std::exp(lg);
}

std::pair<double, double> bump_tail_bounds(const BumpParams& p, std::uint64_t cap)
{
  p.validate();
  if (cap < 1)
    fail_invalid("tail cap must be >= 1");
  const double K = static_cast<double>(cap);
  if (p.J >= 2) {
    // psi^(k) <= B / k^(2J), B = prod (pi c_j delta)^-2; sum over k > K of a
    // convex function is at most the integral from K + 1/2.
    const double s = 2.0 * static_cast<double>(p.J);
    double logB = 0.0;
    for (std::uint64_t j = 1; j <= p.J; ++j)
      logB -= 2.0 * std::log(kPi * Rational(BumpParams::coefficient(j) * p.delta).get_d());
    const double one_side = std::exp(logB + (1.0 - s) * std::log(K + 0.5) - std::log(s - 1.0));
    return {0.0, 2.0 * one_side * (1.0 + 1e-12)};
  }
  // J = 1: psi^(k) = (1 - cos(2 pi a k)) / (2 pi^2 a^2 k^2), a = delta/4.
  const Rational a = p.delta / 4;
  const double ad = a.get_d();
  const double P = 1.0 / (2.0 * kPi * kPi * ad * ad);
  // sum_{k > K} 1/k^2, enveloping asymptotic series
  const double zhi = 1.0 / K - 1.0 / (2 * K * K) + 1.0 / (6 * K * K * K);
  const double zlo = zhi - 1.0 / (30 * std::pow(K, 5));
  // Re sum_{k >= m} z^k / k^2, z = e(a), by summation by parts twice
  const double m = K + 1;
  const i128 an = a.get_num().get_si(), ad_ = a.get_den().get_si();
  auto e = [&](std::uint64_t k) { // e(a k)
    const i128 num = 2 * static_cast<i128>(k) * an;
    return std::pair<double, double>{cos_pi_frac(num, ad_), sin_pi_frac(num, ad_)};
  };
  const auto [zr, zi] = e(1);
  const double wr = 1.0 - zr, wi = -zi; // 1 - z
  const double w2 = wr * wr + wi * wi;
  auto div = [&](double xr, double xi, double yr, double yi) {
    const double d = yr * yr + yi * yi;
    return std::pair<double, double>{(xr * yr + xi * yi) / d, (xi * yr - xr * yi) / d};
  };
  const double bm = 1.0 / (m * m);
  const double dm1 = 1.0 / ((m + 1) * (m + 1)) - bm;
  const auto [zmr, zmi] = e(cap + 1);
  const auto [zm1r, zm1i] = e(cap + 2);
  const auto t1 = div(zmr * bm, zmi * bm, wr, wi);
  const double w2r = wr * wr - wi * wi, w2i = 2 * wr * wi; // (1 - z)^2
  const auto t2 = div(zm1r * dm1, zm1i * dm1, w2r, w2i);
  const double lead = t1.first + t2.first;
  const double err = std::fabs(dm1) / w2;
  const double slack = 8.0 * DBL_EPSILON * (zhi + std::fabs(lead) + err);
  const double lo = P * (zlo - lead - err - slack);
  const double hi = P * (zhi - lead + err + slack);
  return {2.0 * std::max(0.0, lo), 2.0 * hi};
}

std::uint64_t bump_required_tail_cap(const BumpParams& p, double target)
{
  auto width = [&](std::uint64_t K) {
    const auto [lo, hi] = bump_tail_bounds(p, K);
    return hi - lo;
  };
  std::uint64_t hi = 1024;
  while (width(hi) >= target) {
    if (hi > (1ULL << 32))
      fail_budget("no tail cap below 2^32 reaches the requested tail accuracy");
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;
  if (width(lo) < target)
    return lo;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (width(mid) < target ? hi : lo) = mid;
  }
  return hi;
}

BumpReport bump_property_report(const BumpParams& p, std::uint64_t tail_cap)
{
  p.validate();
  BumpReport rep;
  rep.params = p;
  rep.tail_cap = tail_cap;
  std::tie(rep.tail_lower, rep.tail_upper) = bump_tail_bounds(p, tail_cap);
  if (rep.tail_upper - rep.tail_lower >= 1e-6)
    fail_invalid("insufficient tail cap: tail uncertainty " + std::to_string(rep.tail_upper - rep.tail_lower) +
                 " is not below 1e-6");
  const BumpEval ev(p);
  rep.target = 4.0 / p.delta.get_d();
  for (std::uint64_t j = 1; j <= p.J; ++j)
    rep.support_radius += Rational(BumpParams::coefficient(j) * p.delta).get_d();

  // Support probes as exact fractions n/d.
  const Rational probes_q[] = {p.delta * Rational(3, 5), p.delta * Rational(3, 4), p.delta * Rational(9, 10),
                               Rational(1, 4)};
  std::vector<std::pair<i128, i128>> probes;
  for (const auto& x : probes_q)
    probes.emplace_back(x.get_num().get_si(), x.get_den().get_si());
  std::vector<long double> series(probes.size(), 1.0L);

  // Kahan-compensated sum of the positive-k coefficients.
  long double sum = 0, comp = 0;
  for (std::uint64_t k = 1; k <= tail_cap; ++k) {
    const double c = ev.coeff(static_cast<std::int64_t>(k));
    const long double y = static_cast<long double>(c) - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    const double env = bump_envelope(p, static_cast<std::int64_t>(k));
    if (env > 0.0) {
      const double ratio = c / env;
      rep.max_envelope_ratio = std::max(rep.max_envelope_ratio, ratio);
      if (c > env * (1.0 + 1e-12)) {
        ++rep.envelope_violations;
        if (!rep.first_violation)
          rep.first_violation = k;
      }
    } else if (c > 0.0) {
      ++rep.envelope_violations;
      if (!rep.first_violation)
        rep.first_violation = k;
    }
    if (c != 0.0)
      for (std::size_t i = 0; i < probes.size(); ++i)
        series[i] += 2.0L * c * cos_pi_frac(2 * static_cast<i128>(k) * probes[i].first, probes[i].second);
  }
  rep.coeff_sum = static_cast<double>(1.0L + 2.0L * sum);
  rep.sum_ok = rep.coeff_sum + rep.tail_upper <= rep.target + kBumpSumTolerance;
  for (auto v : series)
    rep.support_leak = std::max(rep.support_leak, static_cast<double>(std::fabs(v)));
  rep.leak_ok = rep.support_leak <= rep.tail_upper + kBumpSumTolerance;
  return rep;
}

void to_json(nlohmann::json& j, const BumpReport& r)
{
  j = nlohmann::json{{"delta", r.params.delta.get_str()},
                     {"J", r.params.J},
                     {"tail_cap", r.tail_cap},
                     {"coeff_sum", r.coeff_sum},
                     {"tail_lower", r.tail_lower},
                     {"tail_upper", r.tail_upper},
                     {"target", r.target},
                     {"sum_ok", r.sum_ok},
                     {"envelope_violations", r.envelope_violations},
                     {"first_violation", r.first_violation ? nlohmann::json(*r.first_violation) : nlohmann::json()},
                     {"max_envelope_ratio", r.max_envelope_ratio},
                     {"support_leak", r.support_leak},
                     {"leak_ok", r.leak_ok},
                     {"support_radius", r.support_radius}};
}

} // namespace smalldig
