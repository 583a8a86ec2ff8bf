#pragma once

#include <mpfr.h>

#include <string>
#include <utility>

namespace rmtlab {

// Arbitrary-precision real number backed by MPFR. Each value carries its own
// mantissa precision; binary operations produce results at the larger of the
// operand precisions, so precision set at the entry points of a computation
// propagates through it. All rounding is to nearest.
class Real {
 public:
  Real() { mpfr_init2(v_, 64); mpfr_set_zero(v_, 1); }
  explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(double x, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_d(v_, x, MPFR_RNDN); }
  Real(long x, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(int x, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_si(v_, x, MPFR_RNDN); }

  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept { mpfr_init2(v_, 64); mpfr_swap(v_, o.v_); }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  static Real from_string(const std::string& s, mpfr_prec_t prec);

  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  // Scientific-notation decimal string; digits<0 means full precision.
  std::string str(int digits = -1) const;

  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  Real operator-() const {
    Real r(prec());
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }

  Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }
  Real& operator+=(long x) { mpfr_add_si(v_, v_, x, MPFR_RNDN); return *this; }
  Real& operator-=(long x) { mpfr_sub_si(v_, v_, x, MPFR_RNDN); return *this; }
  Real& operator*=(long x) { mpfr_mul_si(v_, v_, x, MPFR_RNDN); return *this; }
  Real& operator/=(long x) { mpfr_div_si(v_, v_, x, MPFR_RNDN); return *this; }

  friend Real operator+(const Real& a, const Real& b) { return bin(mpfr_add, a, b); }
  friend Real operator-(const Real& a, const Real& b) { return bin(mpfr_sub, a, b); }
  friend Real operator*(const Real& a, const Real& b) { return bin(mpfr_mul, a, b); }
  friend Real operator/(const Real& a, const Real& b) { return bin(mpfr_div, a, b); }

  friend Real operator+(const Real& a, long b) { Real r(a.prec()); mpfr_add_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
  friend Real operator-(const Real& a, long b) { Real r(a.prec()); mpfr_sub_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
  friend Real operator*(const Real& a, long b) { Real r(a.prec()); mpfr_mul_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
  friend Real operator/(const Real& a, long b) { Real r(a.prec()); mpfr_div_si(r.v_, a.v_, b, MPFR_RNDN); return r; }
  friend Real operator+(long a, const Real& b) { return b + a; }
  friend Real operator-(long a, const Real& b) { Real r(b.prec()); mpfr_si_sub(r.v_, a, b.v_, MPFR_RNDN); return r; }
  friend Real operator*(long a, const Real& b) { return b * a; }
  friend Real operator/(long a, const Real& b) { Real r(b.prec()); mpfr_si_div(r.v_, a, b.v_, MPFR_RNDN); return r; }

  friend Real operator+(const Real& a, int b) { return a + long(b); }
  friend Real operator-(const Real& a, int b) { return a - long(b); }
  friend Real operator*(const Real& a, int b) { return a * long(b); }
  friend Real operator/(const Real& a, int b) { return a / long(b); }
  friend Real operator+(int a, const Real& b) { return long(a) + b; }
  friend Real operator-(int a, const Real& b) { return long(a) - b; }
  friend Real operator*(int a, const Real& b) { return long(a) * b; }
  friend Real operator/(int a, const Real& b) { return long(a) / b; }

  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }
  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }

  friend bool operator<(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) < 0; }
  friend bool operator>(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) > 0; }
  friend bool operator<=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) <= 0; }
  friend bool operator>=(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) >= 0; }
  friend bool operator==(const Real& a, double b) { return mpfr_cmp_d(a.v_, b) == 0; }
  friend bool operator<(double a, const Real& b) { return b > a; }
  friend bool operator>(double a, const Real& b) { return b < a; }
  friend bool operator<=(double a, const Real& b) { return b >= a; }
  friend bool operator>=(double a, const Real& b) { return b <= a; }

 private:
  using MpfrBinOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
  static Real bin(MpfrBinOp op, const Real& a, const Real& b) {
    Real r(a.prec() > b.prec() ? a.prec() : b.prec());
    op(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  mpfr_t v_;
};

namespace detail {
using MpfrUnOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);
inline Real un(MpfrUnOp op, const Real& a) {
  Real r(a.prec());
  op(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}
}  // namespace detail

inline Real abs(const Real& a) { return detail::un(mpfr_abs, a); }
inline Real sqrt(const Real& a) { return detail::un(mpfr_sqrt, a); }
inline Real exp(const Real& a) { return detail::un(mpfr_exp, a); }
inline Real log(const Real& a) { return detail::un(mpfr_log, a); }
inline Real log2(const Real& a) { return detail::un(mpfr_log2, a); }
inline Real sin(const Real& a) { return detail::un(mpfr_sin, a); }
inline Real cos(const Real& a) { return detail::un(mpfr_cos, a); }
inline Real tan(const Real& a) { return detail::un(mpfr_tan, a); }
inline Real asin(const Real& a) { return detail::un(mpfr_asin, a); }
inline Real acos(const Real& a) { return detail::un(mpfr_acos, a); }
inline Real atan(const Real& a) { return detail::un(mpfr_atan, a); }
inline Real sinh(const Real& a) { return detail::un(mpfr_sinh, a); }
inline Real cosh(const Real& a) { return detail::un(mpfr_cosh, a); }
inline Real acosh(const Real& a) { return detail::un(mpfr_acosh, a); }
inline Real tgamma(const Real& a) { return detail::un(mpfr_gamma, a); }
inline Real erf(const Real& a) { return detail::un(mpfr_erf, a); }
inline Real floor(const Real& a) { return detail::un(mpfr_rint_floor, a); }
inline Real ceil(const Real& a) { return detail::un(mpfr_rint_ceil, a); }

inline Real atan2(const Real& y, const Real& x) {
  Real r(y.prec() > x.prec() ? y.prec() : x.prec());
  mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return r;
}
inline Real pow(const Real& a, const Real& b) {
  Real r(a.prec() > b.prec() ? a.prec() : b.prec());
  mpfr_pow(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
inline Real pow(const Real& a, long n) {
  Real r(a.prec());
  mpfr_pow_si(r.raw(), a.raw(), n, MPFR_RNDN);
  return r;
}
inline Real pow(const Real& a, int n) { return pow(a, long(n)); }
inline Real pow2(long e, mpfr_prec_t prec) {
  Real r(prec);
  mpfr_set_ui_2exp(r.raw(), 1, e, MPFR_RNDN);
  return r;
}
inline Real max(const Real& a, const Real& b) { return a >= b ? a : b; }
inline Real min(const Real& a, const Real& b) { return a <= b ? a : b; }
inline Real fma(const Real& a, const Real& b, const Real& c) {
  Real r(a.prec() > b.prec() ? (a.prec() > c.prec() ? a.prec() : c.prec())
                             : (b.prec() > c.prec() ? b.prec() : c.prec()));
  mpfr_fma(r.raw(), a.raw(), b.raw(), c.raw(), MPFR_RNDN);
  return r;
}

inline Real const_pi(mpfr_prec_t prec) {
  Real r(prec);
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}
inline Real const_e(mpfr_prec_t prec) {
  Real r(prec);
  mpfr_set_ui(r.raw(), 1, MPFR_RNDN);
  mpfr_exp(r.raw(), r.raw(), MPFR_RNDN);
  return r;
}
inline Real const_ln2(mpfr_prec_t prec) {
  Real r(prec);
  mpfr_const_log2(r.raw(), MPFR_RNDN);
  return r;
}

}  // namespace rmtlab
