#pragma once

#include <mpfr.h>

#include <string>
#include <utility>

#include "ratlab/context.hpp"

namespace ratlab {

// Arbitrary-precision real backed by MPFR. Every value carries its own
// precision; binary operations compute at the wider of the two operand
// precisions, so precision never silently degrades through arithmetic.
// Rounding is always to nearest, which keeps results bit-reproducible.
class Real {
 public:
  static mpfr_prec_t defaultPrec();
  static void setDefaultPrec(mpfr_prec_t p);

  Real() { mpfr_init2(v_, defaultPrec()); mpfr_set_zero(v_, 1); }
  explicit Real(mpfr_prec_t prec, int /*tag*/) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  Real(long x) { mpfr_init2(v_, defaultPrec()); mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(int x) : Real(static_cast<long>(x)) {}
  Real(double x) { mpfr_init2(v_, defaultPrec()); mpfr_set_d(v_, x, MPFR_RNDN); }
  explicit Real(const std::string& s) {
    mpfr_init2(v_, defaultPrec());
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0)
      throw Error(ErrorClass::Config, "unparseable number: " + s);
  }

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

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

  double toDouble() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long toLong() const { return mpfr_get_si(v_, MPFR_RNDN); }
  bool isZero() const { return mpfr_zero_p(v_) != 0; }
  bool isNan() const { return mpfr_nan_p(v_) != 0; }
  bool isInf() const { return mpfr_inf_p(v_) != 0; }
  bool isNegative() const { return mpfr_sgn(v_) < 0; }
  int sign() const { return mpfr_sgn(v_); }

  // Decimal string with enough digits to round-trip at this precision.
  std::string str() const;
  std::string str(int significantDigits) const;

  Real& operator+=(const Real& o) { return inplace2(mpfr_add, o); }
  Real& operator-=(const Real& o) { return inplace2(mpfr_sub, o); }
  Real& operator*=(const Real& o) { return inplace2(mpfr_mul, o); }
  Real& operator/=(const Real& o) { return inplace2(mpfr_div, o); }

  friend Real operator+(const Real& a, const Real& b) { return binary(mpfr_add, a, b); }
  friend Real operator-(const Real& a, const Real& b) { return binary(mpfr_sub, a, b); }
  friend Real operator*(const Real& a, const Real& b) { return binary(mpfr_mul, a, b); }
  friend Real operator/(const Real& a, const Real& b) { return binary(mpfr_div, a, b); }
  friend Real operator-(const Real& a) {
    Real r(mpfr_get_prec(a.v_), 0);
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
  friend bool operator!=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) != 0; }
  friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }

  static Real pi(mpfr_prec_t prec = 0);
  static Real exp2i(double log2x, mpfr_prec_t prec = 0);  // 2^log2x
  static Real infinity() {
    Real r;
    mpfr_set_inf(r.v_, 1);
    return r;
  }

 private:
  using Fn2 = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
  Real& inplace2(Fn2 f, const Real& o) {
    if (mpfr_get_prec(v_) >= mpfr_get_prec(o.v_)) {
      f(v_, v_, o.v_, MPFR_RNDN);
    } else {
      Real r(mpfr_get_prec(o.v_), 0);
      f(r.v_, v_, o.v_, MPFR_RNDN);
      mpfr_swap(v_, r.v_);
    }
    return *this;
  }
  static Real binary(Fn2 f, const Real& a, const Real& b) {
    Real r(std::max(mpfr_get_prec(a.v_), mpfr_get_prec(b.v_)), 0);
    f(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }

  mpfr_t v_;
};

// Scoped override of the default construction precision.
class PrecisionScope {
 public:
  explicit PrecisionScope(mpfr_prec_t bits) : saved_(Real::defaultPrec()) {
    Real::setDefaultPrec(bits);
  }
  explicit PrecisionScope(const PrecisionContext& ctx) : PrecisionScope(ctx.bits) {}
  ~PrecisionScope() { Real::setDefaultPrec(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

inline Real unary(int (*f)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t), const Real& a) {
  Real r(a.prec(), 0);
  f(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

inline Real abs(const Real& a) { return unary(mpfr_abs, a); }
inline Real sqrt(const Real& a) { return unary(mpfr_sqrt, a); }
inline Real log(const Real& a) { return unary(mpfr_log, a); }
inline Real exp(const Real& a) { return unary(mpfr_exp, a); }
inline Real sin(const Real& a) { return unary(mpfr_sin, a); }
inline Real cos(const Real& a) { return unary(mpfr_cos, a); }
inline Real tan(const Real& a) { return unary(mpfr_tan, a); }
inline Real asin(const Real& a) { return unary(mpfr_asin, a); }
inline Real acos(const Real& a) { return unary(mpfr_acos, a); }
inline Real atan(const Real& a) { return unary(mpfr_atan, a); }
inline Real floor(const Real& a) { return unary(mpfr_rint_floor, a); }
inline Real ceil(const Real& a) { return unary(mpfr_rint_ceil, a); }

inline Real atan2(const Real& y, const Real& x) {
  Real r(std::max(y.prec(), x.prec()), 0);
  mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return r;
}
inline Real hypot(const Real& x, const Real& y) {
  Real r(std::max(y.prec(), x.prec()), 0);
  mpfr_hypot(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}
inline Real pow(const Real& a, const Real& b) {
  Real r(std::max(a.prec(), b.prec()), 0);
  mpfr_pow(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return r;
}
inline Real pow(const Real& a, long n) {
  Real r(a.prec(), 0);
  mpfr_pow_si(r.raw(), a.raw(), n, MPFR_RNDN);
  return r;
}
inline Real min(const Real& a, const Real& b) { return a <= b ? a : b; }
inline Real max(const Real& a, const Real& b) { return a >= b ? a : b; }
inline Real fma(const Real& a, const Real& b, const Real& c) {
  Real r(std::max(std::max(a.prec(), b.prec()), c.prec()), 0);
  mpfr_fma(r.raw(), a.raw(), b.raw(), c.raw(), MPFR_RNDN);
  return r;
}
// acc += a*b without temporaries; acc keeps its own precision.
inline void fmadd(Real& acc, const Real& a, const Real& b) {
  mpfr_fma(acc.raw(), a.raw(), b.raw(), acc.raw(), MPFR_RNDN);
}
inline void fmsub(Real& acc, const Real& a, const Real& b) {
  mpfr_fms(acc.raw(), a.raw(), b.raw(), acc.raw(), MPFR_RNDN);
  mpfr_neg(acc.raw(), acc.raw(), MPFR_RNDN);
}
// dst = a*b into an existing scratch value.
inline void mulInto(Real& dst, const Real& a, const Real& b) {
  mpfr_mul(dst.raw(), a.raw(), b.raw(), MPFR_RNDN);
}

}  // namespace ratlab
