#include "doctest.h"

#include <cmath>

#include "ratlab/cheb.hpp"
#include "ratlab/linalg.hpp"
#include "ratlab/poly.hpp"
#include "ratlab/quad.hpp"

using namespace ratlab;

namespace {
double dbl(const Real& x) { return x.toDouble(); }
}

TEST_CASE("real arithmetic carries precision and round-trips strings") {
  PrecisionScope scope(256);
  Real a(1l), b(3l);
  Real third = a / b;
  CHECK(third.prec() == 256);
  Real back(third.str());
  CHECK(dbl(abs(back - third)) < 1e-70);
  CHECK(dbl(Real::pi() - Real("3.14159265358979323846264338327950288419716939937510582097")) < 1e-55);
}

TEST_CASE("complex sqrt/log/exp agree on test points") {
  PrecisionScope scope(256);
  Cplx z(Real(-3l), Real(4l));
  Cplx s = sqrt(z);
  CHECK(dbl(abs(s * s - z)) < 1e-70);
  Cplx l = log(z);
  CHECK(dbl(abs(exp(l) - z)) < 1e-70);
  CHECK(dbl(abs(z) - Real(5l)) < 1e-70);
}

TEST_CASE("polyRoots: factored quadratic") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  // z^2 - 1
  Poly p({Cplx(-1l), Cplx(0l), Cplx(1l)});
  auto r = polyRoots(p, ctx);
  REQUIRE(r.roots.size() == 2);
  CHECK(dbl(abs(r.roots[0].z - Cplx(-1l))) < 1e-70);
  CHECK(dbl(abs(r.roots[1].z - Cplx(1l))) < 1e-70);
}

TEST_CASE("polyRoots: Chebyshev T4 roots against the cosine oracle") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  // 8z^4 - 8z^2 + 1
  Poly t4({Cplx(1l), Cplx(0l), Cplx(-8l), Cplx(0l), Cplx(8l)});
  auto r = polyRoots(t4, ctx);
  REQUIRE(r.roots.size() == 4);
  // Independent oracle: claimed roots are cos((2k+1)pi/8); T4 evaluated there
  // via the cosine definition must vanish.
  std::vector<Real> expected;
  for (int k = 0; k < 4; ++k) expected.push_back(cos(Real::pi() * Real(2 * k + 1) / Real(8l)));
  std::sort(expected.begin(), expected.end());
  for (int k = 0; k < 4; ++k) {
    CHECK(dbl(abs(r.roots[k].z.re - expected[k])) < 1e-70);
    CHECK(dbl(abs(r.roots[k].z.im)) < 1e-70);
    Real resid = cos(Real(4l) * acos(expected[k]));
    CHECK(dbl(abs(resid)) < 1e-70);
  }
}

TEST_CASE("polyRoots: triple root at zero keeps multiplicity") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  Poly p({Cplx(0l), Cplx(0l), Cplx(0l), Cplx(1l)});
  auto r = polyRoots(p, ctx);
  REQUIRE(r.roots.size() == 1);
  CHECK(r.roots[0].multiplicity == 3);
  CHECK(r.roots[0].z.isZero());
}

TEST_CASE("polyRoots: clustered triple root off origin") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  std::vector<Cplx> roots = {Cplx(0.5, 0.25), Cplx(0.5, 0.25), Cplx(0.5, 0.25), Cplx(-1l)};
  Poly p = Poly::fromRoots(roots);
  auto r = polyRoots(p, ctx);
  REQUIRE(r.roots.size() == 2);
  CHECK(r.roots[0].multiplicity == 1);
  CHECK(r.roots[1].multiplicity == 3);
  CHECK(dbl(abs(r.roots[1].z - Cplx(0.5, 0.25))) < 1e-35);
  CHECK(dbl(r.residual) < 1e-38);
}

TEST_CASE("polyRoots: degree zero and zero polynomial") {
  auto ctx = PrecisionContext::withBits(128);
  PrecisionScope scope(ctx.bits);
  auto r = polyRoots(Poly::constant(Cplx(3l)), ctx);
  CHECK(r.roots.empty());
  CHECK_THROWS_AS(polyRoots(Poly(), ctx), Error);
}

TEST_CASE("polyRoots round trip on random-ish roots in the unit disk") {
  auto ctx = PrecisionContext::withBits(320);
  PrecisionScope scope(ctx.bits);
  // Deterministic pseudo-random roots.
  std::vector<Cplx> roots;
  unsigned long state = 12345;
  auto next = [&]() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<double>((state >> 17) % 100000) / 100000.0;
  };
  for (int i = 0; i < 25; ++i) {
    double rr = 0.95 * std::sqrt(next());
    double th = 6.283185307179586 * next();
    roots.emplace_back(rr * std::cos(th), rr * std::sin(th));
  }
  Poly p = Poly::fromRoots(roots, Cplx(2l));
  auto r = polyRoots(p, ctx);
  auto flat = rootsFlat(r);
  REQUIRE(flat.size() == roots.size());
  std::sort(roots.begin(), roots.end(), lexLess);
  for (size_t i = 0; i < roots.size(); ++i) CHECK(dbl(abs(flat[i] - roots[i])) < 1e-60);
}

TEST_CASE("solveLeastSquares: identity, minimum norm, residual oracle") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  {
    MatC I(2, 2);
    I(0, 0) = Cplx(1l);
    I(1, 1) = Cplx(1l);
    VecC b = {Cplx(1l), Cplx(2l)};
    auto x = solveLeastSquares(I, b, ctx);
    CHECK(dbl(abs(x[0] - Cplx(1l))) < 1e-70);
    CHECK(dbl(abs(x[1] - Cplx(2l))) < 1e-70);
  }
  {
    // x + y = 1 -> minimum-norm (0.5, 0.5)
    MatC M(1, 2);
    M(0, 0) = Cplx(1l);
    M(0, 1) = Cplx(1l);
    auto x = solveLeastSquares(M, {Cplx(1l)}, ctx);
    CHECK(dbl(abs(x[0] - Cplx(0.5))) < 1e-70);
    CHECK(dbl(abs(x[1] - Cplx(0.5))) < 1e-70);
  }
  {
    // Deterministic dense 6x6 complex system; residual is the oracle.
    MatC M(6, 6);
    VecC b(6);
    unsigned long state = 99;
    auto next = [&]() {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      return static_cast<double>((state >> 17) % 100000) / 50000.0 - 1.0;
    };
    for (long i = 0; i < 6; ++i) {
      b[i] = Cplx(next(), next());
      for (long j = 0; j < 6; ++j) M(i, j) = Cplx(next(), next());
    }
    auto x = solveLeastSquares(M, b, ctx);
    VecC r = matVec(M, x);
    for (int i = 0; i < 6; ++i) r[i] -= b[i];
    CHECK(dbl(vecNorm(r) / vecNorm(b)) < 1e-38);  // 2^-128
  }
}

TEST_CASE("smallestSingularDirection finds the null space deterministically") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  // rows: [1, 1, 0], [0, 1, 1] -> null vector prop to (1, -1, 1)/sqrt(3)
  MatC M(2, 3);
  M(0, 0) = Cplx(1l);
  M(0, 1) = Cplx(1l);
  M(1, 1) = Cplx(1l);
  M(1, 2) = Cplx(1l);
  Real smin;
  auto v = smallestSingularDirection(M, ctx, &smin);
  CHECK(dbl(smin) < 1e-70);
  Real s3 = sqrt(Real(3l));
  CHECK(dbl(abs(v[0] - Cplx(Real(1l) / s3))) < 1e-70);
  CHECK(dbl(abs(v[1] + Cplx(Real(1l) / s3))) < 1e-70);
  CHECK(dbl(abs(v[2] - Cplx(Real(1l) / s3))) < 1e-70);
  // Determinism: same call, same bits.
  auto v2 = smallestSingularDirection(M, ctx, nullptr);
  for (int i = 0; i < 3; ++i) CHECK(v[i] == v2[i]);
}

TEST_CASE("gauss-legendre integrates analytic functions to full precision") {
  PrecisionScope scope(256);
  RealFn f = [](const Real& x) { return exp(x); };
  Real v = integrate(f, Real(-1l), Real(1l), 48, 256);
  Real expect = exp(Real(1l)) - exp(Real(-1l));
  CHECK(dbl(abs(v - expect)) < 1e-70);
}

TEST_CASE("graded quadrature handles inverse-sqrt endpoints spectrally") {
  PrecisionScope scope(256);
  // int_{-1}^{1} 1/sqrt(1-x^2) dx = pi
  RealFn f = [](const Real& x) {
    return Real(1l) / sqrt((Real(1l) - x) * (x + Real(1l)));
  };
  Real v = integrateGraded(f, Real(-1l), Real(1l), 48, 8, 256);
  CHECK(dbl(abs(v - Real::pi())) < 1e-60);
}

TEST_CASE("chebyshev basis potentials match quadrature") {
  PrecisionScope scope(256);
  // U_k at an off-interval point vs direct graded quadrature.
  for (int k = 0; k <= 3; ++k) {
    Cplx z(1.7, 0.4);
    Real closed = chebLogPotential(k, z);
    RealFn f = [&](const Real& t) {
      Real tk(1l);
      if (k >= 1) {
        Real t0(1l), t1 = t;
        for (int j = 2; j <= k; ++j) {
          Real t2 = (t + t) * t1 - t0;
          t0 = t1;
          t1 = t2;
        }
        tk = t1;
      }
      return -log(abs(z - Cplx(t))) * tk / sqrt((Real(1l) - t) * (t + Real(1l)));
    };
    Real direct = integrateGraded(f, Real(-1l), Real(1l), 48, 10, 256) / Real::pi();
    CHECK(dbl(abs(closed - direct)) < 1e-55);
  }
}

TEST_CASE("chebyshev cauchy transforms match quadrature off the cut") {
  PrecisionScope scope(256);
  for (int k = 0; k <= 3; ++k) {
    for (double zr : {2.3, -1.9}) {
      Cplx z(zr, 0.0);
      Cplx closed = chebCauchy(k, z);
      CplxFn1 f = [&](const Real& t) {
        Real t0(1l), t1 = t, tk(1l);
        if (k >= 1) {
          for (int j = 2; j <= k; ++j) {
            Real t2 = (t + t) * t1 - t0;
            t0 = t1;
            t1 = t2;
          }
          tk = t1;
        }
        return Cplx(tk / sqrt((Real(1l) - t) * (t + Real(1l)))) / (z - Cplx(t));
      };
      Cplx direct = integrateGraded(f, Real(-1l), Real(1l), 48, 10, 256) / Cplx(Real::pi());
      CHECK(dbl(abs(closed - direct)) < 1e-55);
    }
  }
}

TEST_CASE("cheb series fit and cdf") {
  PrecisionScope scope(256);
  auto pts = chebPoints(24);
  std::vector<Real> vals;
  for (const auto& x : pts) vals.push_back(exp(x));
  auto c = chebCoeffs(vals);
  CHECK(dbl(abs(chebEval(c, Real(0.3)) - exp(Real(0.3)))) < 1e-25);
  // arcsine cdf: c = {1}, CDF(x) = 1/2 + asin(x)/pi
  std::vector<Real> unit = {Real(1l)};
  Real x(0.37);
  Real cdf = chebDensityCdf(unit, x);
  Real expect = Real(0.5) + asin(x) / Real::pi();
  CHECK(dbl(abs(cdf - expect)) < 1e-70);
  Real q = chebDensityQuantile(unit, cdf, 256);
  CHECK(dbl(abs(q - x)) < 1e-70);
}
