#include "ratlab/real.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "ratlab/cplx.hpp"

namespace ratlab {

const char* errorClassName(ErrorClass c) {
  switch (c) {
    case ErrorClass::Config: return "config";
    case ErrorClass::Domain: return "domain";
    case ErrorClass::Convergence: return "convergence";
    case ErrorClass::Precision: return "precision";
    case ErrorClass::Degenerate: return "degenerate";
    case ErrorClass::Io: return "io";
    case ErrorClass::Internal: return "internal";
  }
  return "internal";
}

int errorClassExitCode(ErrorClass c) {
  switch (c) {
    case ErrorClass::Config: return 2;
    case ErrorClass::Domain: return 3;
    case ErrorClass::Convergence: return 4;
    case ErrorClass::Precision: return 5;
    case ErrorClass::Degenerate: return 6;
    case ErrorClass::Io: return 7;
    case ErrorClass::Internal: return 10;
  }
  return 10;
}

namespace {
thread_local mpfr_prec_t g_default_prec = 256;
}

mpfr_prec_t Real::defaultPrec() { return g_default_prec; }
void Real::setDefaultPrec(mpfr_prec_t p) { g_default_prec = p; }

std::string Real::str() const {
  // 0.302 ~ log10(2); +3 guard digits for round trip.
  int digits = static_cast<int>(prec() * 0.30103) + 3;
  return str(digits);
}

std::string Real::str(int significantDigits) const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%%.%dRe", significantDigits - 1);
  std::vector<char> out(significantDigits + 32);
  mpfr_snprintf(out.data(), out.size(), buf, v_);
  return std::string(out.data());
}

Real Real::pi(mpfr_prec_t prec) {
  Real r(prec ? prec : defaultPrec(), 0);
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}

Real Real::exp2i(double log2x, mpfr_prec_t prec) {
  Real r(prec ? prec : defaultPrec(), 0);
  mpfr_set_d(r.raw(), log2x, MPFR_RNDN);
  mpfr_exp2(r.raw(), r.raw(), MPFR_RNDN);
  return r;
}

std::string Cplx::str(int digits) const {
  std::string r = digits ? re.str(digits) : re.str();
  std::string i = digits ? im.str(digits) : im.str();
  return r + (im.isNegative() ? "" : "+") + i + "i";
}

Cplx sqrt(const Cplx& z) {
  if (z.im.isZero()) {
    if (z.re.sign() >= 0) return Cplx(sqrt(z.re), Real(0l));
    return Cplx(Real(0l), sqrt(-z.re));
  }
  // w = sqrt((|z|+re)/2), im/(2w); stable for all quadrants.
  Real a = abs(z);
  Real w = sqrt((a + abs(z.re)) / Real(2l));
  Real half_im = z.im / (w + w);
  if (z.re.sign() >= 0) return Cplx(w, half_im);
  if (z.im.sign() >= 0) return Cplx(half_im, w);
  return Cplx(-half_im, -w);
}

Cplx log(const Cplx& z) { return Cplx(log(abs(z)), arg(z)); }

Cplx exp(const Cplx& z) {
  Real m = exp(z.re);
  return Cplx(m * cos(z.im), m * sin(z.im));
}

Cplx pow(const Cplx& z, const Real& a) {
  if (z.isZero()) return a.isZero() ? Cplx(Real(1l)) : Cplx(Real(0l));
  if (a.isZero()) return Cplx(Real(1l));
  return exp(log(z) * a);
}

}  // namespace ratlab
