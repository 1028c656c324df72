#include "smalldig/interval.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "smalldig/error.hpp"

namespace smalldig {

std::string Real::to_string(int digits) const
{
  char* raw = nullptr;
  mpfr_asprintf(&raw, "%.*Rg", digits, v_);
  std::string s(raw);
  mpfr_free_str(raw);
  return s;
}

Interval::Interval(mpfr_prec_t prec) : lo_(prec), hi_(prec) {}

Interval Interval::exact(long v, mpfr_prec_t prec)
{
  Interval r(prec);
  mpfr_set_si(r.lo_.get(), v, MPFR_RNDD);
  mpfr_set_si(r.hi_.get(), v, MPFR_RNDU);
  return r;
}

Interval Interval::from_int(const BigInt& v, mpfr_prec_t prec)
{
  Interval r(prec);
  mpfr_set_z(r.lo_.get(), v.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(r.hi_.get(), v.get_mpz_t(), MPFR_RNDU);
  return r;
}

Interval Interval::from_rational(const Rational& q, mpfr_prec_t prec)
{
  Interval r(prec);
  mpfr_set_q(r.lo_.get(), q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_.get(), q.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::from_double(double v, mpfr_prec_t prec)
{
  Interval r(prec);
  mpfr_set_d(r.lo_.get(), v, MPFR_RNDD);
  mpfr_set_d(r.hi_.get(), v, MPFR_RNDU);
  return r;
}

Interval Interval::hull(const Real& a, const Real& b)
{
  Interval r(std::max(a.precision(), b.precision()));
  if (mpfr_lessequal_p(a.get(), b.get())) {
    mpfr_set(r.lo_.get(), a.get(), MPFR_RNDD);
    mpfr_set(r.hi_.get(), b.get(), MPFR_RNDU);
  } else {
    mpfr_set(r.lo_.get(), b.get(), MPFR_RNDD);
    mpfr_set(r.hi_.get(), a.get(), MPFR_RNDU);
  }
  return r;
}

Interval Interval::operator+(const Interval& o) const
{
  Interval r(precision());
  mpfr_add(r.lo_.get(), lo_.get(), o.lo_.get(), MPFR_RNDD);
  mpfr_add(r.hi_.get(), hi_.get(), o.hi_.get(), MPFR_RNDU);
  return r;
}

Interval Interval::operator-(const Interval& o) const
{
  Interval r(precision());
  mpfr_sub(r.lo_.get(), lo_.get(), o.hi_.get(), MPFR_RNDD);
  mpfr_sub(r.hi_.get(), hi_.get(), o.lo_.get(), MPFR_RNDU);
  return r;
}

Interval Interval::operator-() const
{
  Interval r(precision());
  mpfr_neg(r.lo_.get(), hi_.get(), MPFR_RNDD);
  mpfr_neg(r.hi_.get(), lo_.get(), MPFR_RNDU);
  return r;
}

Interval Interval::operator*(const Interval& o) const
{
  // Four endpoint products, each rounded both ways.
  const mpfr_prec_t p = precision();
  Interval r(p);
  Real t(p);
  bool first = true;
  for (const Real* a : {&lo_, &hi_}) {
    for (const Real* b : {&o.lo_, &o.hi_}) {
      mpfr_mul(t.get(), a->get(), b->get(), MPFR_RNDD);
      if (first || mpfr_less_p(t.get(), r.lo_.get()))
        mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
      mpfr_mul(t.get(), a->get(), b->get(), MPFR_RNDU);
      if (first || mpfr_greater_p(t.get(), r.hi_.get()))
        mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
      first = false;
    }
  }
  return r;
}

Interval Interval::operator/(const Interval& o) const
{
  if (o.contains_zero())
    fail_invalid("interval division by an interval containing zero");
  const mpfr_prec_t p = precision();
  Interval r(p);
  Real t(p);
  bool first = true;
  for (const Real* a : {&lo_, &hi_}) {
    for (const Real* b : {&o.lo_, &o.hi_}) {
      mpfr_div(t.get(), a->get(), b->get(), MPFR_RNDD);
      if (first || mpfr_less_p(t.get(), r.lo_.get()))
        mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
      mpfr_div(t.get(), a->get(), b->get(), MPFR_RNDU);
      if (first || mpfr_greater_p(t.get(), r.hi_.get()))
        mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
      first = false;
    }
  }
  return r;
}

Interval Interval::mul_si(long k) const
{
  Interval r(precision());
  if (k >= 0) {
    mpfr_mul_si(r.lo_.get(), lo_.get(), k, MPFR_RNDD);
    mpfr_mul_si(r.hi_.get(), hi_.get(), k, MPFR_RNDU);
  } else {
    mpfr_mul_si(r.lo_.get(), hi_.get(), k, MPFR_RNDD);
    mpfr_mul_si(r.hi_.get(), lo_.get(), k, MPFR_RNDU);
  }
  return r;
}

Interval Interval::log() const
{
  if (mpfr_sgn(lo_.get()) <= 0)
    fail_invalid("log of an interval that is not strictly positive");
  Interval r(precision());
  mpfr_log(r.lo_.get(), lo_.get(), MPFR_RNDD);
  mpfr_log(r.hi_.get(), hi_.get(), MPFR_RNDU);
  return r;
}

Interval Interval::exp() const
{
  Interval r(precision());
  mpfr_exp(r.lo_.get(), lo_.get(), MPFR_RNDD);
  mpfr_exp(r.hi_.get(), hi_.get(), MPFR_RNDU);
  return r;
}

Interval Interval::pow_of(const Interval& base) const
{
  return (*this * base.log()).exp();
}

bool Interval::contains(double v) const
{
  return mpfr_cmp_d(lo_.get(), v) <= 0 && mpfr_cmp_d(hi_.get(), v) >= 0;
}

double Interval::width() const
{
  Real t(precision());
  mpfr_sub(t.get(), hi_.get(), lo_.get(), MPFR_RNDU);
  return t.to_double(MPFR_RNDU);
}

Real Interval::mid() const
{
  Real m(precision() + 1);
  mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
  mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
  return m;
}

double Interval::mid_double() const
{
  return mid().to_double();
}

double Interval::radius() const
{
  const Real m = mid();
  Real a(precision() + 1), b(precision() + 1);
  mpfr_sub(a.get(), hi_.get(), m.get(), MPFR_RNDU);
  mpfr_sub(b.get(), m.get(), lo_.get(), MPFR_RNDU);
  return std::max(a.to_double(MPFR_RNDU), b.to_double(MPFR_RNDU));
}

bool Interval::certainly_less(const Rational& t) const
{
  return mpfr_cmp_q(hi_.get(), t.get_mpq_t()) < 0;
}

bool Interval::certainly_greater_equal(const Rational& t) const
{
  return mpfr_cmp_q(lo_.get(), t.get_mpq_t()) >= 0;
}

bool Interval::certainly_greater(const Rational& t) const
{
  return mpfr_cmp_q(lo_.get(), t.get_mpq_t()) > 0;
}

bool Interval::frac(Interval& out) const
{
  const mpfr_prec_t p = precision();
  Real fl(p), fh(p);
  mpfr_floor(fl.get(), lo_.get());
  mpfr_floor(fh.get(), hi_.get());
  if (!mpfr_equal_p(fl.get(), fh.get()))
    return false;
  Interval r(p);
  mpfr_sub(r.lo_.get(), lo_.get(), fl.get(), MPFR_RNDD);
  mpfr_sub(r.hi_.get(), hi_.get(), fl.get(), MPFR_RNDU);
  out = std::move(r);
  return true;
}

Interval Interval::dist_to_int() const
{
  // ||.|| is 1-Lipschitz, so ||x|| lies within radius of ||mid||.
  const mpfr_prec_t p = precision() + 2;
  const Real m = mid();
  Real rounded(p), d(p);
  mpfr_rint(rounded.get(), m.get(), MPFR_RNDN);
  mpfr_sub(d.get(), m.get(), rounded.get(), MPFR_RNDN); // exact: |m - round(m)| <= 1/2
  mpfr_abs(d.get(), d.get(), MPFR_RNDN);
  const double rad = radius();
  Interval r(precision());
  mpfr_sub_d(r.lo_.get(), d.get(), rad, MPFR_RNDD);
  mpfr_add_d(r.hi_.get(), d.get(), rad, MPFR_RNDU);
  if (mpfr_sgn(r.lo_.get()) < 0)
    mpfr_set_zero(r.lo_.get(), 1);
  if (mpfr_cmp_d(r.hi_.get(), 0.5) > 0)
    mpfr_set_d(r.hi_.get(), 0.5, MPFR_RNDU);
  return r;
}

std::string Interval::to_string(int digits) const
{
  return mid().to_string(digits);
}

} // namespace smalldig
