#pragma once

#include "ratlab/real.hpp"

namespace ratlab {

// Complex value over Real. std::complex is only specified for the builtin
// floating types, so we carry our own minimal one.
struct Cplx {
  Real re, im;

  Cplx() = default;
  Cplx(Real r) : re(std::move(r)), im(0l) {}
  Cplx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  Cplx(double r) : re(r), im(0l) {}
  Cplx(double r, double i) : re(r), im(i) {}
  Cplx(long r) : re(r), im(0l) {}
  Cplx(int r) : re(static_cast<long>(r)), im(0l) {}

  bool isZero() const { return re.isZero() && im.isZero(); }
  bool isReal() const { return im.isZero(); }

  Cplx& operator+=(const Cplx& o) { re += o.re; im += o.im; return *this; }
  Cplx& operator-=(const Cplx& o) { re -= o.re; im -= o.im; return *this; }
  Cplx& operator*=(const Cplx& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Cplx& operator/=(const Cplx& o);
  Cplx& operator*=(const Real& s) { re *= s; im *= s; return *this; }
  Cplx& operator/=(const Real& s) { re /= s; im /= s; return *this; }

  friend Cplx operator+(Cplx a, const Cplx& b) { a += b; return a; }
  friend Cplx operator-(Cplx a, const Cplx& b) { a -= b; return a; }
  friend Cplx operator*(Cplx a, const Cplx& b) { a *= b; return a; }
  friend Cplx operator/(Cplx a, const Cplx& b) { a /= b; return a; }
  friend Cplx operator-(const Cplx& a) { return Cplx(-a.re, -a.im); }
  friend Cplx operator*(Cplx a, const Real& s) { a *= s; return a; }
  friend Cplx operator*(const Real& s, Cplx a) { a *= s; return a; }
  friend Cplx operator/(Cplx a, const Real& s) { a /= s; return a; }
  friend bool operator==(const Cplx& a, const Cplx& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Cplx& a, const Cplx& b) { return !(a == b); }

  std::string str(int digits = 0) const;
};

inline Cplx conj(const Cplx& z) { return Cplx(z.re, -z.im); }
inline Real abs(const Cplx& z) { return hypot(z.re, z.im); }
inline Real norm(const Cplx& z) { return z.re * z.re + z.im * z.im; }
inline Real arg(const Cplx& z) { return atan2(z.im, z.re); }

inline Cplx& Cplx::operator/=(const Cplx& o) {
  Real d = norm(o);
  Real r = (re * o.re + im * o.im) / d;
  im = (im * o.re - re * o.im) / d;
  re = std::move(r);
  return *this;
}

Cplx sqrt(const Cplx& z);
Cplx log(const Cplx& z);
Cplx exp(const Cplx& z);
// Principal z^a for real exponent a.
Cplx pow(const Cplx& z, const Real& a);

// Lexicographic by real part, then imaginary part; the canonical root order.
inline bool lexLess(const Cplx& a, const Cplx& b) {
  if (a.re < b.re) return true;
  if (b.re < a.re) return false;
  return a.im < b.im;
}

}  // namespace ratlab
