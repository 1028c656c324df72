#pragma once

// Certified real arithmetic: closed intervals [lo, hi] with MPFR endpoints,
// every operation rounded outward so the exact value is always enclosed.

#include <cstdint>
#include <string>

#include <mpfr.h>

#include "smalldig/bigint.hpp"

namespace smalldig {

/// RAII owner of one mpfr_t.
class Real {
public:
  explicit Real(mpfr_prec_t prec = 256) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept : Real(mpfr_get_prec(o.v_)) { mpfr_swap(v_, o.v_); }
  Real& operator=(const Real& o)
  {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }
  std::string to_string(int digits = 30) const;

private:
  mpfr_t v_;
};

class Interval {
public:
  explicit Interval(mpfr_prec_t prec = 256);

  static Interval exact(long v, mpfr_prec_t prec = 256);
  static Interval from_int(const BigInt& v, mpfr_prec_t prec = 256);
  static Interval from_rational(const Rational& q, mpfr_prec_t prec = 256);
  static Interval from_double(double v, mpfr_prec_t prec = 256);
  static Interval hull(const Real& a, const Real& b);

  const Real& lo() const { return lo_; }
  const Real& hi() const { return hi_; }
  mpfr_prec_t precision() const { return lo_.precision(); }

  Interval operator+(const Interval& o) const;
  Interval operator-(const Interval& o) const;
  Interval operator*(const Interval& o) const;
  /// Divisor must not contain zero.
  Interval operator/(const Interval& o) const;
  Interval operator-() const;
  Interval mul_si(long k) const;
  Interval& operator+=(const Interval& o) { return *this = *this + o; }

  /// Natural log; requires lo > 0.
  Interval log() const;
  Interval exp() const;
  /// base^this for a positive interval base.
  Interval pow_of(const Interval& base) const;

  bool contains(double v) const;
  bool contains_zero() const { return contains(0.0); }
  /// Upper bound on hi - lo.
  double width() const;
  double mid_double() const;
  /// Upper bound on max(|x - mid| : x in this).
  double radius() const;
  Real mid() const;

  /// Certifiably below / above / at least a rational threshold.
  bool certainly_less(const Rational& t) const;
  bool certainly_greater_equal(const Rational& t) const;
  bool certainly_greater(const Rational& t) const;

  /// If the interval lies within one unit cell [m, m+1), returns true and
  /// stores the enclosure of the fractional part; otherwise false.
  bool frac(Interval& out) const;

  /// Enclosure of ||x||, the distance to the nearest integer, for all x in this.
  Interval dist_to_int() const;

  std::string to_string(int digits = 30) const;

private:
  Real lo_;
  Real hi_;
};

} // namespace smalldig
