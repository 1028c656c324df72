#include "smalldig/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "smalldig/error.hpp"

namespace smalldig {

std::uint64_t minimal_root(std::uint64_t g)
{
  if (g < 2)
    fail_invalid("base must be >= 2");
  // try exponents from the largest down; the first exact root is minimal
  for (unsigned e = 63; e >= 2; --e) {
    auto m = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(g), 1.0 / e)));
    for (std::uint64_t c = (m > 1 ? m - 1 : 2); c <= m + 1; ++c) {
      if (c < 2)
        continue;
      if (pow_ui(c, e) == from_u64(g))
        return minimal_root(c);
    }
  }
  return g;
}

ExponentSystem::ExponentSystem(std::vector<std::uint64_t> bases, std::uint64_t ell, std::uint64_t h,
                               std::vector<Rational> zetas, bool allow_dependent, mpfr_prec_t prec)
    : bases_(std::move(bases)), ell_(ell), h_(h), zetas_(std::move(zetas)), prec_(prec)
{
  if (bases_.empty())
    fail_invalid("exponent system needs at least one base");
  if (ell_ < 2)
    fail_invalid("ell must be >= 2");
  if (h_ < 1)
    fail_invalid("h must be >= 1");
  if (prec_ < 64)
    fail_invalid("precision must be at least 64 bits");
  if (zetas_.empty())
    zetas_.assign(bases_.size(), Rational(1));
  if (zetas_.size() != bases_.size())
    fail_invalid("one zeta per base is required");
  for (auto g : bases_) {
    if (g < 2)
      fail_invalid("base must be >= 2");
    if (std::gcd(g, ell_) != 1)
      fail_invalid("ell must be coprime to every base");
  }
  if (!allow_dependent)
    for (std::size_t i = 0; i < bases_.size(); ++i)
      for (std::size_t j = i + 1; j < bases_.size(); ++j)
        if (minimal_root(bases_[i]) == minimal_root(bases_[j]))
          fail_invalid("bases " + std::to_string(bases_[i]) + " and " + std::to_string(bases_[j]) +
                       " are multiplicatively dependent");
  const Interval logL = Interval::from_int(L(), prec_).log();
  for (auto g : bases_) {
    log_g_.push_back(Interval::from_int(from_u64(g), prec_).log());
    theta_.push_back(logL / log_g_.back());
  }
}

namespace {

Interval frac_checked(const Interval& x)
{
  Interval f(x.precision());
  if (!x.frac(f))
    throw Indeterminate("fractional part enclosure straddles an integer");
  if (f.width() > kFracErrorCap)
    throw Indeterminate("fractional part enclosure wider than the error cap");
  return f;
}

bool certainly_le(const Interval& v, const Rational& t)
{
  return mpfr_cmp_q(v.hi().get(), t.get_mpq_t()) <= 0;
}

} // namespace

std::vector<Interval> frac_exponents(const ExponentSystem& sys, std::uint64_t n)
{
  const Interval nn = Interval::from_int(from_u64(n), sys.precision());
  std::vector<Interval> out;
  for (std::size_t j = 0; j < sys.r(); ++j)
    out.push_back(frac_checked(nn * sys.theta(j)));
  return out;
}

std::vector<double> frac_exponents_double(const ExponentSystem& sys, std::uint64_t n)
{
  std::vector<double> out;
  for (const auto& f : frac_exponents(sys, n))
    out.push_back(f.mid_double());
  return out;
}

NormValue power_sum_norm(const ExponentSystem& sys, std::uint64_t n)
{
  const auto fr = frac_exponents(sys, n);
  Interval s = Interval::exact(0, sys.precision());
  for (std::size_t j = 0; j < sys.r(); ++j)
    s += Interval::from_rational(sys.zetas()[j], sys.precision()) * (fr[j] * sys.log_base(j)).exp();
  NormValue v{s.dist_to_int()};
  v.value = v.enclosure.mid_double();
  v.error = v.enclosure.radius();
  return v;
}

CensusReport bad_n_census(const ExponentSystem& sys, const Rational& epsilon, std::uint64_t N,
                          std::vector<Rational> grid, std::size_t list_cap, std::uint64_t budget, unsigned threads)
{
  if (epsilon <= 0)
    fail_invalid("epsilon must be positive");
  if (N < 1)
    fail_invalid("N must be >= 1");
  if (N > budget)
    fail_budget("census range exceeds the scan budget");
  if (grid.empty())
    for (int i = 0; i < 5; ++i)
      grid.push_back(epsilon / (1 << i));
  for (const auto& e : grid)
    if (e <= 0)
      fail_invalid("grid epsilons must be positive");
  if (std::find(grid.begin(), grid.end(), epsilon) == grid.end())
    grid.insert(grid.begin(), epsilon);

  struct Part {
    std::vector<std::uint64_t> count, indet;
    std::vector<std::uint64_t> hits;
  };
  const unsigned T = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::uint64_t>(N, 1024))));
  std::vector<Part> parts(T);
  auto work = [&](unsigned w) {
    Part& p = parts[w];
    p.count.assign(grid.size(), 0);
    p.indet.assign(grid.size(), 0);
    const std::uint64_t lo = 1 + N / T * w + std::min<std::uint64_t>(w, N % T);
    const std::uint64_t hi = lo + N / T + (w < N % T ? 1 : 0);
    for (std::uint64_t n = lo; n < hi; ++n) {
      const NormValue v = power_sum_norm(sys, n);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (certainly_le(v.enclosure, grid[i])) {
          ++p.count[i];
          if (grid[i] == epsilon && p.hits.size() < list_cap)
            p.hits.push_back(n);
        } else if (!v.enclosure.certainly_greater(grid[i])) {
          ++p.indet[i];
        }
      }
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

  CensusReport rep;
  rep.N = N;
  rep.epsilon = epsilon;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CensusRow row;
    row.epsilon = grid[i];
    for (const auto& p : parts) {
      row.count += p.count[i];
      row.indeterminate += p.indet[i];
    }
    if (grid[i] == epsilon) {
      rep.count = row.count;
      rep.indeterminate = row.indeterminate;
    }
    rep.grid.push_back(row);
  }
  for (const auto& p : parts)
    for (auto n : p.hits)
      if (rep.hits.size() < list_cap)
        rep.hits.push_back(n);

  // log(count/N) = a + b log(eps)
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : rep.grid)
    if (row.count > 0)
      pts.emplace_back(std::log(row.epsilon.get_d()), std::log(static_cast<double>(row.count) / static_cast<double>(N)));
  if (pts.size() >= 2) {
    double sx = 0, sy = 0;
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
    }
    const double mx = sx / pts.size(), my = sy / pts.size();
    double sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sxx += (x - mx) * (x - mx);
      sxy += (x - mx) * (y - my);
    }
    if (sxx > 0) {
      const double b = sxy / sxx, a = my - b * mx;
      rep.empirical_exponent = b;
      for (auto [x, y] : pts)
        rep.residuals.push_back(y - (a + b * x));
    }
  }
  return rep;
}

DiscrepancyReport discrepancy_estimate(const ExponentSystem& sys, std::uint64_t N, std::uint64_t grid)
{
  const std::size_t d = sys.r();
  if (d > 3)
    fail_invalid("box-count discrepancy supports dimension <= 3");
  if (N < 1)
    fail_invalid("N must be >= 1");
  if (grid < 1)
    fail_invalid("grid must be >= 1");
  std::uint64_t cells = 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (cells > (1ULL << 24) / grid)
      fail_invalid("grid too fine: more than 2^24 cells");
    cells *= grid;
  }
  if (N > kCensusBudget * 10)
    fail_budget("discrepancy point count exceeds the budget");

  // n theta formed in 160-bit MPFR; only the fractional part goes to double.
  std::vector<std::uint64_t> hist(cells, 0);
  const mpfr_prec_t p = 160;
  std::vector<Real> th;
  for (std::size_t j = 0; j < d; ++j) {
    Real t(p);
    mpfr_set(t.get(), sys.theta(j).mid().get(), MPFR_RNDN);
    th.push_back(std::move(t));
  }
  Real x(p);
  for (std::uint64_t n = 0; n < N; ++n) {
    std::uint64_t idx = 0;
    for (std::size_t j = 0; j < d; ++j) {
      mpfr_mul_ui(x.get(), th[j].get(), n, MPFR_RNDN);
      mpfr_frac(x.get(), x.get(), MPFR_RNDN);
      auto c = static_cast<std::uint64_t>(std::floor(mpfr_get_d(x.get(), MPFR_RNDN) * static_cast<double>(grid)));
      c = std::min(c, grid - 1);
      idx = idx * grid + c;
    }
    ++hist[idx];
  }
  // inclusive prefix sums along each axis
  std::uint64_t stride = 1;
  for (std::size_t ax = 0; ax < d; ++ax) {
    for (std::uint64_t i = 0; i < cells; ++i)
      if ((i / stride) % grid != 0)
        hist[i] += hist[i - stride];
    stride *= grid;
  }
  DiscrepancyReport rep;
  rep.N = N;
  rep.grid = grid;
  const double invN = 1.0 / static_cast<double>(N);
  for (std::uint64_t i = 0; i < cells; ++i) {
    // corner (a_1/G, ..., a_d/G) with a = coordinate + 1
    double vol = 1.0;
    std::uint64_t rest = i;
    for (std::size_t j = 0; j < d; ++j) {
      vol *= static_cast<double>(rest % grid + 1) / static_cast<double>(grid);
      rest /= grid;
    }
    rep.estimate = std::max(rep.estimate, std::fabs(static_cast<double>(hist[i]) * invN - vol));
  }
  rep.bound = rep.estimate + 1.0 - std::pow(1.0 - 1.0 / static_cast<double>(grid), static_cast<double>(d));
  return rep;
}

SeparationReport power_sum_separation_check(const std::vector<double>& xs, const std::vector<double>& cs,
                                            const std::vector<double>& points)
{
  const std::size_t r = xs.size();
  if (r == 0 || r > 20)
    fail_invalid("need between 1 and 20 exponential bases");
  if (cs.size() != r)
    fail_invalid("one coefficient per base is required");
  if (points.size() != (std::size_t{1} << (r - 1)))
    fail_invalid("need exactly 2^(r-1) evaluation points");
  for (std::size_t i = 0; i < r; ++i) {
    if (!(xs[i] > 0.0))
      fail_invalid("bases must be positive");
    for (std::size_t j = i + 1; j < r; ++j)
      if (xs[i] == xs[j])
        fail_invalid("bases must be distinct");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i] > 0.0 && points[i] < 1.0))
      fail_invalid("points must lie in (0, 1)");
    if (i > 0 && !(points[i] > points[i - 1]))
      fail_invalid("points must be strictly increasing");
  }
  SeparationReport rep;
  rep.delta = 1.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    rep.delta = std::min(rep.delta, points[i] - points[i - 1]);
  for (double v : points) {
    long double f = 0;
    for (std::size_t i = 0; i < r; ++i)
      f += static_cast<long double>(cs[i]) * std::pow(static_cast<long double>(xs[i]), static_cast<long double>(v));
    rep.max_abs = std::max(rep.max_abs, static_cast<double>(std::fabs(f)));
  }
  double cmax = 0.0;
  for (double c : cs)
    cmax = std::max(cmax, std::fabs(c));
  if (cmax == 0.0)
    fail_invalid("at least one coefficient must be nonzero");
  rep.ratio = rep.max_abs / (std::pow(rep.delta, static_cast<double>(r - 1)) * cmax);
  return rep;
}

LatticeReport lattice_min_combination(const ExponentSystem& sys, std::uint64_t M, std::uint64_t budget)
{
  if (M < 1)
    fail_invalid("M must be >= 1");
  const std::size_t r = sys.r();
  long double vol = 1;
  for (std::size_t j = 0; j < r; ++j)
    vol *= static_cast<long double>(2 * M + 1);
  if (vol > static_cast<long double>(budget))
    fail_budget("lattice box exceeds the enumeration budget");

  LatticeReport rep;
  rep.M = M;
  rep.vectors = static_cast<std::uint64_t>(vol) - 1;
  rep.reference = std::pow(static_cast<double>(M), -static_cast<double>(r));
  const std::int64_t m = static_cast<std::int64_t>(M);
  std::vector<std::int64_t> v(r, -m);
  bool have = false;
  Real best_mid(sys.precision());
  while (true) {
    // canonical representatives only: first nonzero coordinate positive
    auto nz = std::find_if(v.begin(), v.end(), [](std::int64_t x) { return x != 0; });
    if (nz != v.end() && *nz > 0) {
      Interval s = Interval::exact(0, sys.precision());
      for (std::size_t j = 0; j < r; ++j)
        if (v[j] != 0)
          s += sys.theta(j).mul_si(v[j]);
      Interval d = s.dist_to_int();
      const Real mid = d.mid();
      if (!have || mpfr_less_p(mid.get(), best_mid.get())) {
        have = true;
        best_mid = mid;
        rep.min_norm = d;
        rep.argmin = v;
      }
    }
    std::size_t j = r;
    while (j-- > 0) {
      if (v[j] < m) {
        ++v[j];
        break;
      }
      v[j] = -m;
      if (j == 0)
        goto done;
    }
  }
done:
  rep.min_norm_value = rep.min_norm.mid_double();
  rep.min_norm_error = rep.min_norm.radius();
  return rep;
}

void to_json(nlohmann::json& j, const CensusReport& r)
{
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& row : r.grid)
    grid.push_back({{"epsilon", row.epsilon.get_str()},
                    {"epsilon_value", row.epsilon.get_d()},
                    {"count", row.count},
                    {"indeterminate", row.indeterminate},
                    {"fraction", static_cast<double>(row.count) / static_cast<double>(r.N)}});
  j = nlohmann::json{{"N", r.N},
                     {"epsilon", r.epsilon.get_str()},
                     {"count", r.count},
                     {"indeterminate", r.indeterminate},
                     {"hits", r.hits},
                     {"grid", grid},
                     {"empirical_exponent", r.empirical_exponent ? nlohmann::json(*r.empirical_exponent) : nlohmann::json()},
                     {"residuals", r.residuals}};
}

void to_json(nlohmann::json& j, const DiscrepancyReport& r)
{
  j = nlohmann::json{{"N", r.N}, {"grid", r.grid}, {"estimate", r.estimate}, {"bound", r.bound}};
}

void to_json(nlohmann::json& j, const LatticeReport& r)
{
  j = nlohmann::json{{"M", r.M},
                     {"vectors", r.vectors},
                     {"min_norm", r.min_norm_value},
                     {"min_norm_error", r.min_norm_error},
                     {"min_norm_digits", r.min_norm.to_string(25)},
                     {"argmin", r.argmin},
                     {"reference", r.reference},
                     {"ratio_to_reference", r.min_norm_value / r.reference}};
}

} // namespace smalldig
