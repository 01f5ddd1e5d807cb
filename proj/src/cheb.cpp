#include "ratlab/cheb.hpp"

namespace ratlab {

std::vector<Real> chebPoints(int n) {
  std::vector<Real> x(n, Real(0l));
  Real pi = Real::pi();
  for (int j = 0; j < n; ++j) x[j] = cos(pi * Real(2 * (n - 1 - j) + 1) / Real(2 * n));
  return x;
}

std::vector<Real> chebCoeffs(const std::vector<Real>& v) {
  int n = static_cast<int>(v.size());
  std::vector<Real> c(n, Real(0l));
  Real pi = Real::pi();
  for (int k = 0; k < n; ++k) {
    Real s(0l);
    for (int j = 0; j < n; ++j) {
      // angle of ascending point j: theta_j = (2(n-1-j)+1) pi / (2n)
      Real theta = pi * Real(2 * (n - 1 - j) + 1) / Real(2 * n);
      s += v[j] * cos(Real(k) * theta);
    }
    c[k] = s * Real(k == 0 ? 1 : 2) / Real(n);
  }
  return c;
}

Real chebEval(const std::vector<Real>& c, const Real& t) {
  if (c.empty()) return Real(0l);
  Real b1(0l), b2(0l);
  Real two_t = t + t;
  for (size_t k = c.size(); k-- > 1;) {
    Real b0 = c[k] + two_t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + t * b1 - b2;
}

Cplx joukowski(const Cplx& z) {
  Cplx w = sqrt(z - Cplx(1l)) * sqrt(z + Cplx(1l));
  return z + w;
}

Real chebLogPotential(int k, const Cplx& z) {
  // On-interval evaluation uses the trigonometric closed form; near-interval
  // points fall through to the off-interval branch, which is continuous.
  bool on_cut = z.im.isZero() && abs(z.re) <= Real(1l);
  if (k == 0) {
    if (on_cut) return log(Real(2l));
    return log(Real(2l)) - log(abs(joukowski(z)));
  }
  if (on_cut) {
    // T_k(x)/k via Chebyshev recurrence.
    Real t0(1l), t1 = z.re;
    for (int j = 2; j <= k; ++j) {
      Real t2 = (z.re + z.re) * t1 - t0;
      t0 = t1;
      t1 = t2;
    }
    return (k == 0 ? t0 : t1) / Real(k);
  }
  Cplx J = joukowski(z);
  Cplx Jinv = Cplx(1l) / J;
  Cplx p = Jinv;
  for (int j = 1; j < k; ++j) p *= Jinv;
  return p.re / Real(k);
}

Cplx chebCauchy(int k, const Cplx& z) {
  Cplx w = sqrt(z - Cplx(1l)) * sqrt(z + Cplx(1l));
  Cplx J = z + w;
  Cplx r = Cplx(1l) / w;
  Cplx Jinv = Cplx(1l) / J;
  for (int j = 0; j < k; ++j) r *= Jinv;
  return r;
}

Real chebDensityCdf(const std::vector<Real>& c, const Real& x) {
  Real xx = max(Real(-1l), min(Real(1l), x));
  Real theta = acos(xx);
  Real pi = Real::pi();
  Real s = c.empty() ? Real(0l) : c[0] * (Real(1l) - theta / pi);
  if (c.size() > 1) {
    // sin(k theta) by angle addition; one sin/cos pair total.
    Real st = sin(theta), ct = cos(theta);
    Real sk = st, ck = ct;
    for (size_t k = 1; k < c.size(); ++k) {
      s -= c[k] * sk / (Real(static_cast<long>(k)) * pi);
      Real sk1 = sk * ct + ck * st;
      Real ck1 = ck * ct - sk * st;
      sk = sk1;
      ck = ck1;
    }
  }
  return s;
}

Real chebDensityQuantile(const std::vector<Real>& c, const Real& q, mpfr_prec_t bits) {
  // Bracket by bisection, then Newton on the cdf (its derivative is the
  // density, positive inside the support).
  Real lo(-1l), hi(1l);
  for (int it = 0; it < 48; ++it) {
    Real mid = (lo + hi) / Real(2l);
    if (chebDensityCdf(c, mid) < q)
      lo = mid;
    else
      hi = mid;
  }
  Real x = (lo + hi) / Real(2l);
  Real pi = Real::pi();
  Real stop = Real::exp2i(-static_cast<double>(bits) + 8);
  for (int it = 0; it < 80; ++it) {
    Real onem = Real(1l) - x * x;
    if (onem.sign() <= 0) break;
    Real density = chebEval(c, x) / (pi * sqrt(onem));
    if (density.sign() <= 0) break;
    Real step = (chebDensityCdf(c, x) - q) / density;
    x -= step;
    if (x < lo) x = lo;
    if (x > hi) x = hi;
    if (abs(step) < stop) break;
  }
  return x;
}

}  // namespace ratlab
