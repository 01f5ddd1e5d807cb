#include "ratlab/quad.hpp"

#include <map>
#include <mutex>

namespace ratlab {

namespace {

Real roundTo(const Real& x, mpfr_prec_t bits) {
  Real r(bits, 0);
  mpfr_set(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

QuadNodes computeGaussLegendre(int n, mpfr_prec_t bits) {
  // Internally refined with guard bits, but stored at exactly `bits` so
  // consumers' operating precision stays put.
  PrecisionScope scope(bits + 32);
  QuadNodes q;
  q.x.resize(n, Real(0l));
  q.w.resize(n, Real(0l));
  Real pi = Real::pi();
  Real stop = Real::exp2i(-static_cast<double>(bits) - 8);
  for (int k = 0; k < (n + 1) / 2; ++k) {
    // Chebyshev-style initial guess, then Newton on P_n.
    Real x = cos(pi * Real(4 * k + 3) / Real(4 * n + 2));
    Real dp(0l);
    for (int it = 0; it < 200; ++it) {
      // Legendre recurrence for P_n(x), P'_n(x).
      Real p0(1l), p1 = x;
      for (int j = 2; j <= n; ++j) {
        Real p2 = (Real(2 * j - 1) * x * p1 - Real(j - 1) * p0) / Real(j);
        p0 = p1;
        p1 = p2;
      }
      dp = Real(n) * (x * p1 - p0) / (x * x - Real(1l));
      Real dx = p1 / dp;
      x -= dx;
      if (abs(dx) < stop) break;
    }
    // Final weight from the converged node.
    Real p0(1l), p1 = x;
    for (int j = 2; j <= n; ++j) {
      Real p2 = (Real(2 * j - 1) * x * p1 - Real(j - 1) * p0) / Real(j);
      p0 = p1;
      p1 = p2;
    }
    dp = Real(n) * (x * p1 - p0) / (x * x - Real(1l));
    Real w = Real(2l) / ((Real(1l) - x * x) * dp * dp);
    q.x[k] = -x;
    q.w[k] = w;
    q.x[n - 1 - k] = x;
    q.w[n - 1 - k] = w;
  }
  if (n % 2 == 1) {
    // Middle node is exactly zero.
    q.x[n / 2] = Real(0l);
    Real p0(1l), p1(0l);
    Real x(0l);
    for (int j = 2; j <= n; ++j) {
      Real p2 = (Real(2 * j - 1) * x * p1 - Real(j - 1) * p0) / Real(j);
      p0 = p1;
      p1 = p2;
    }
    Real dp = Real(n) * (x * p1 - p0) / (x * x - Real(1l));
    q.w[n / 2] = Real(2l) / (dp * dp);
  }
  for (int i = 0; i < n; ++i) {
    q.x[i] = roundTo(q.x[i], bits);
    q.w[i] = roundTo(q.w[i], bits);
  }
  return q;
}

std::map<std::pair<int, mpfr_prec_t>, QuadNodes>& cache() {
  static std::map<std::pair<int, mpfr_prec_t>, QuadNodes> c;
  return c;
}
std::mutex cache_mu;

}  // namespace

const QuadNodes& gaussLegendre(int n, mpfr_prec_t bits) {
  std::lock_guard<std::mutex> lock(cache_mu);
  auto key = std::make_pair(n, bits);
  auto it = cache().find(key);
  if (it == cache().end()) it = cache().emplace(key, computeGaussLegendre(n, bits)).first;
  return it->second;
}

template <class F, class V>
static V integrateImpl(const F& f, const Real& a, const Real& b, int n, mpfr_prec_t bits) {
  const QuadNodes& q = gaussLegendre(n, bits);
  Real mid = (a + b) / Real(2l), half = (b - a) / Real(2l);
  V acc(0l);
  for (int i = 0; i < n; ++i) {
    V v = f(mid + half * q.x[i]);
    v *= q.w[i];
    acc += v;
  }
  acc *= half;
  return acc;
}

Real integrate(const RealFn& f, const Real& a, const Real& b, int n, mpfr_prec_t bits) {
  return integrateImpl<RealFn, Real>(f, a, b, n, bits);
}
Cplx integrate(const CplxFn1& f, const Real& a, const Real& b, int n, mpfr_prec_t bits) {
  return integrateImpl<CplxFn1, Cplx>(f, a, b, n, bits);
}

namespace {

// x(u) = a + (b-a) u^2 (3 - 2u), dx/du = 6 (b-a) u (1-u).
template <class F, class V>
V gradedImpl(const F& f, const Real& a, const Real& b, int n, int panels, mpfr_prec_t bits) {
  const QuadNodes& q = gaussLegendre(n, bits);
  Real len = b - a;
  V acc(0l);
  for (int p = 0; p < panels; ++p) {
    Real u0 = Real(p) / Real(panels), u1 = Real(p + 1) / Real(panels);
    Real mid = (u0 + u1) / Real(2l), half = (u1 - u0) / Real(2l);
    for (int i = 0; i < n; ++i) {
      Real u = mid + half * q.x[i];
      Real x = a + len * u * u * (Real(3l) - Real(2l) * u);
      Real jac = Real(6l) * len * u * (Real(1l) - u);
      V v = f(x);
      v *= q.w[i] * half * jac;
      acc += v;
    }
  }
  return acc;
}

}  // namespace

Real integrateGraded(const RealFn& f, const Real& a, const Real& b, int n, int panels,
                     mpfr_prec_t bits) {
  return gradedImpl<RealFn, Real>(f, a, b, n, panels, bits);
}
Cplx integrateGraded(const CplxFn1& f, const Real& a, const Real& b, int n, int panels,
                     mpfr_prec_t bits) {
  return gradedImpl<CplxFn1, Cplx>(f, a, b, n, panels, bits);
}

GradedGrid gradedGrid(const Real& a, const Real& b, int n, int panels, mpfr_prec_t bits) {
  const QuadNodes& q = gaussLegendre(n, bits);
  GradedGrid g;
  Real len = b - a;
  for (int p = 0; p < panels; ++p) {
    Real u0 = Real(p) / Real(panels), u1 = Real(p + 1) / Real(panels);
    Real mid = (u0 + u1) / Real(2l), half = (u1 - u0) / Real(2l);
    for (int i = 0; i < n; ++i) {
      Real u = mid + half * q.x[i];
      g.x.push_back(a + len * u * u * (Real(3l) - Real(2l) * u));
      g.w.push_back(q.w[i] * half * Real(6l) * len * u * (Real(1l) - u));
    }
  }
  return g;
}

namespace {

template <class F, class V>
V adaptiveImpl(const F& f, const Real& a, const Real& b, const Real& rel_tol, mpfr_prec_t bits,
               int depth, const Real& coarse_scale) {
  const int n = 24;
  V c = integrateImpl<F, V>(f, a, b, n, bits);
  V fine = integrateImpl<F, V>(f, a, b, 2 * n, bits);
  Real err = abs(Cplx(fine) - Cplx(c));
  Real scale = max(coarse_scale, abs(Cplx(fine)));
  if (err <= rel_tol * scale || depth <= 0) return fine;
  Real mid = (a + b) / Real(2l);
  V left = adaptiveImpl<F, V>(f, a, mid, rel_tol, bits, depth - 1, scale);
  V right = adaptiveImpl<F, V>(f, mid, b, rel_tol, bits, depth - 1, scale);
  left += right;
  return left;
}

}  // namespace

Real integrateAdaptive(const RealFn& f, const Real& a, const Real& b, const Real& rel_tol,
                       mpfr_prec_t bits, int max_depth) {
  return adaptiveImpl<RealFn, Real>(f, a, b, rel_tol, bits, max_depth, Real(0l));
}
Cplx integrateAdaptive(const CplxFn1& f, const Real& a, const Real& b, const Real& rel_tol,
                       mpfr_prec_t bits, int max_depth) {
  return adaptiveImpl<CplxFn1, Cplx>(f, a, b, rel_tol, bits, max_depth, Real(0l));
}

Real integrateDyadicTowards(const RealFn& f, const Real& a, const Real& b, int n, int levels,
                            mpfr_prec_t bits) {
  // Panels [a + (b-a)/2^{k+1}, a + (b-a)/2^k], k = 0..levels-1.
  Real acc(0l);
  Real len = b - a;
  Real hi = b;
  for (int k = 1; k <= levels; ++k) {
    Real lo = a + len / Real::exp2i(k);
    acc += integrate(f, lo, hi, n, bits);
    hi = lo;
  }
  return acc;
}

}  // namespace ratlab
