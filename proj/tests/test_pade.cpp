#include "doctest.h"

#include <cmath>

#include "ratlab/equilibrium.hpp"
#include "ratlab/pade.hpp"

using namespace ratlab;

namespace {
double dbl(const Real& x) { return x.toDouble(); }

// distance from a point to the segment [0, e] (for the cube-roots star)
double distToSegment(const Cplx& z, const Cplx& e) {
  double zr = z.re.toDouble(), zi = z.im.toDouble();
  double er = e.re.toDouble(), ei = e.im.toDouble();
  double t = (zr * er + zi * ei) / (er * er + ei * ei);
  t = std::max(0.0, std::min(1.0, t));
  double dx = zr - t * er, dy = zi - t * ei;
  return std::sqrt(dx * dx + dy * dy);
}
}

TEST_CASE("diagonalPade reproduces a rational function exactly") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  // f = 1/(z-1): f_0 = 0, f_k = 1
  SeriesAtInfinity s;
  s.coeff.assign(8, Cplx(1l));
  s.coeff[0] = Cplx(0l);
  auto r = diagonalPade(s, 1, ctx);
  REQUIRE(r.Q.degree() == 1);
  CHECK(dbl(abs(r.Q[0] + Cplx(1l))) < 1e-70);  // z - 1
  CHECK(dbl(abs(r.Q[1] - Cplx(1l))) < 1e-70);
  REQUIRE(r.P.degree() == 0);
  CHECK(dbl(abs(r.P[0] - Cplx(1l))) < 1e-70);
  for (const auto& res : r.residuals) CHECK(dbl(res) < 1e-70);
}

TEST_CASE("diagonalPade of the arcsine Markov function gives Chebyshev denominators") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  auto f = MarkovFunction::fromMeasure(Measure::arcsine(Real(-1l), Real(1l)), ctx.bits);
  auto s = seriesAtInfinity(f, 5, ctx);
  auto r = diagonalPade(s, 2, ctx);
  // Q2 proportional to T2: monic z^2 - 1/2
  REQUIRE(r.Q.degree() == 2);
  CHECK(dbl(abs(r.Q[0] + Cplx(0.5))) < 1e-60);
  CHECK(dbl(abs(r.Q[1])) < 1e-60);
  // independent orthogonality oracle
  WeightSpec w;
  w.sigma = Measure::arcsine(Real(-1l), Real(1l));
  Real resid = orthogonalityResidual(r.Q, w, ctx);
  CHECK(dbl(resid) < 1e-30);
}

TEST_CASE("diagonalPade flags degenerate (even) series blocks") {
  auto ctx = PrecisionContext::withBits(192);
  PrecisionScope scope(ctx.bits);
  // f = 1/z^2 type series: f_2 = 1, everything else zero; the order-1
  // denominator system is rank deficient.
  SeriesAtInfinity s;
  s.coeff.assign(4, Cplx(0l));
  s.coeff[2] = Cplx(1l);
  auto r = diagonalPade(s, 1, ctx);
  CHECK(r.degenerate);
  CHECK(dbl(r.rank_gap) < 1e-40);
}

TEST_CASE("multipointPade: point mass with symmetric nodes is exact") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  auto f = MarkovFunction::fromMeasure(Measure::pointMass(Cplx(0l)), ctx.bits);
  auto scheme = InterpolationScheme::explicitTable({Real(-1l), Real(1l)}, {Real(-1l), Real(1l)});
  auto r = multipointPade(f, scheme, 1, ctx);
  // r = -1/z
  CHECK(r.Q.degree() == 1);
  CHECK(dbl(abs(r.Q[0])) < 1e-60);
  CHECK(dbl(abs(r.P[0] + Cplx(1l))) < 1e-60);
  Cplx at3 = r(Cplx(3l));
  CHECK(dbl(abs(at3 - markovEval(f, Cplx(3l), ctx))) < 1e-60);
}

TEST_CASE("multipointPade zeros are real, simple, inside F, and interlace") {
  auto ctx = PrecisionContext::withBits(384);
  PrecisionScope scope(ctx.bits);
  auto f = MarkovFunction::fromMeasure(Measure::lebesgue(Real(-1l), Real(-0.25)), ctx.bits);
  auto ce = condenserEquilibrium({Real(0l), Real(1l)}, {{Real(-1l), Real(-0.25)}}, ctx);
  std::vector<std::vector<Real>> zero_sets;
  for (int n : {6, 7}) {
    auto scheme = InterpolationScheme::fromLimitMeasure(ce.lambda_E.cheb[0], n, ctx.bits);
    auto r = multipointPade(f, scheme, n, ctx);
    auto roots = polyRoots(r.Q, ctx);
    std::vector<Real> xs;
    for (const auto& rm : roots.roots) {
      CHECK(rm.multiplicity == 1);
      CHECK(dbl(abs(rm.z.im)) < 1e-40);
      CHECK(dbl(rm.z.re) > -1.0 - 1e-12);
      CHECK(dbl(rm.z.re) < -0.25 + 1e-12);
      xs.push_back(rm.z.re);
    }
    // simple: gaps above tolerance
    for (size_t i = 1; i < xs.size(); ++i) CHECK(dbl(xs[i] - xs[i - 1]) > 1e-30);
    zero_sets.push_back(xs);
  }
  // interlacing of consecutive degrees
  const auto& a = zero_sets[0];
  const auto& b = zero_sets[1];
  REQUIRE(a.size() == 6);
  REQUIRE(b.size() == 7);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(dbl(b[i]) < dbl(a[i]));
    CHECK(dbl(a[i]) < dbl(b[i + 1]));
  }
}

TEST_CASE("hermiteRemainder agrees with the direct error") {
  auto ctx = PrecisionContext::withBits(320);
  PrecisionScope scope(ctx.bits);
  auto f = MarkovFunction::fromMeasure(Measure::lebesgue(Real(-1l), Real(-0.25)), ctx.bits);
  auto ce = condenserEquilibrium({Real(0l), Real(1l)}, {{Real(-1l), Real(-0.25)}}, ctx);
  int n = 6;
  auto scheme = InterpolationScheme::fromLimitMeasure(ce.lambda_E.cheb[0], n, ctx.bits);
  auto r = multipointPade(f, scheme, n, ctx);
  for (double zx : {0.5, 2.0}) {
    Cplx z(zx, 0.0);
    Cplx direct = markovEval(f, z, ctx) - r(z);
    Cplx formula = hermiteRemainder(f, r, scheme, z, ctx);
    CHECK(dbl(abs(direct - formula) / abs(direct)) < 1e-25);
    // real on the real axis
    CHECK(dbl(abs(formula.im)) < 1e-30);
  }
  // complex z too
  Cplx z(0.4, 1.1);
  Cplx direct = markovEval(f, z, ctx) - r(z);
  Cplx formula = hermiteRemainder(f, r, scheme, z, ctx);
  CHECK(dbl(abs(direct - formula) / abs(direct)) < 1e-25);
}

TEST_CASE("confluent interpolation table reduces to Taylor-type contact") {
  auto ctx = PrecisionContext::withBits(320);
  PrecisionScope scope(ctx.bits);
  auto f = MarkovFunction::fromMeasure(Measure::lebesgue(Real(-1l), Real(-0.25)), ctx.bits);
  int n = 4;
  Real zeta(0.5);
  std::vector<Real> nodes(2 * n, zeta);
  auto scheme = InterpolationScheme::explicitTable({Real(0.25), Real(0.75)}, nodes);
  auto r = multipointPade(f, scheme, n, ctx);
  // Taylor residual check: (Qf - P)^(k)(zeta)/k! ~ 0 for k < 2n.
  // f^(k)(zeta)/k! = Int dsigma/(t-zeta)^(k+1).
  std::vector<Cplx> ftay;
  for (int k = 0; k <= 2 * n; ++k) {
    CplxFn1 g = [&](const Real& t) {
      return Cplx(1l) / pow(Cplx(t) - Cplx(zeta), Real(k + 1l));
    };
    Measure::Rule rule = f.sigma.realQuadrature(ctx.bits, 128);
    Cplx acc(0l);
    for (size_t q = 0; q < rule.x.size(); ++q) acc += Cplx(rule.w[q]) * g(rule.x[q]);
    ftay.push_back(acc);
  }
  // Taylor coefficients of Q and P at zeta.
  Poly qs = r.Q.composeAffine(Cplx(1l), Cplx(zeta));
  Poly ps = r.P.composeAffine(Cplx(1l), Cplx(zeta));
  std::vector<Cplx> rt(2 * n + 1, Cplx(0l));
  for (int k = 0; k <= 2 * n; ++k) {
    Cplx acc(0l);
    for (int i = 0; i <= std::min<long>(k, qs.degree()); ++i) acc += qs[i] * ftay[k - i];
    if (k <= ps.degree()) acc -= ps[k];
    rt[k] = acc;
  }
  Real scale = abs(rt[2 * n]);
  CHECK(dbl(scale) > 0.0);
  for (int k = 0; k < 2 * n; ++k) CHECK(dbl(abs(rt[k]) / scale) < 1e-25);
}

TEST_CASE("orthogonalityResidual: classical, parity, and contour routes") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  // T2 against the arcsine weight
  Poly t2({Cplx(-1l), Cplx(0l), Cplx(2l)});
  WeightSpec w;
  w.sigma = Measure::arcsine(Real(-1l), Real(1l));
  CHECK(dbl(orthogonalityResidual(t2, w, ctx)) < 1e-30);

  // odd polynomial, even weight: the j=0 moment vanishes by parity
  Poly zp({Cplx(0l), Cplx(1l)});
  CHECK(dbl(orthogonalityResidual(zp, w, ctx)) < 1e-30);

  // contour route: Q from the arcsine diagonal Pade, f = -1/sqrt(z^2-1) on |z|=3
  auto fm = MarkovFunction::fromMeasure(Measure::arcsine(Real(-1l), Real(1l)), ctx.bits);
  auto s = seriesAtInfinity(fm, 9, ctx);
  auto r = diagonalPade(s, 4, ctx);
  WeightSpec cw;
  cw.kind = WeightSpec::Kind::Contour;
  cw.center = Cplx(0l);
  cw.radius = Real(3l);
  cw.contour_fn = [](const Cplx& z) {
    // holomorphic branch of -1/sqrt(z^2-1) outside [-1,1], ~ -1/z at infinity
    Cplx w2 = sqrt(z - Cplx(1l)) * sqrt(z + Cplx(1l));
    return Cplx(-1l) / w2;
  };
  CHECK(dbl(orthogonalityResidual(r.Q, cw, ctx)) < 1e-30);
}

TEST_CASE("varyingWeightOrtho: zero field gives Chebyshev, n = 1 gives the weighted mean") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  Measure arc = Measure::arcsine(Real(-1l), Real(1l));
  FieldFn zero_field = [](const Real&) { return Real(0l); };
  Poly q4 = varyingWeightOrtho(arc, zero_field, 4, ctx);
  // monic T4: z^4 - z^2 + 1/8
  CHECK(dbl(abs(q4[0] - Cplx(0.125))) < 1e-40);
  CHECK(dbl(abs(q4[2] + Cplx(1l))) < 1e-40);
  WeightSpec w;
  w.sigma = arc;
  CHECK(dbl(orthogonalityResidual(q4, w, ctx)) < 1e-30);

  // n = 1 with weight e^{-2x} dx on [0,1]: root at weighted mean
  Measure leb = Measure::lebesgue(Real(0l), Real(1l));
  FieldFn lin = [](const Real& x) { return x; };
  Poly q1 = varyingWeightOrtho(leb, lin, 1, ctx);
  RealFn wf = [](const Real& x) { return exp(Real(-2l) * x); };
  RealFn xwf = [](const Real& x) { return x * exp(Real(-2l) * x); };
  Real mean = leb.integrate(xwf, ctx.bits, 64) / leb.integrate(wf, ctx.bits, 64);
  CHECK(dbl(abs(q1[0] + Cplx(mean)))< 1e-40);
}

TEST_CASE("varying-weight zeros stay in the hull and are real simple") {
  auto ctx = PrecisionContext::withBits(384);
  PrecisionScope scope(ctx.bits);
  Measure leb = Measure::lebesgue(Real(-3l), Real(3l));
  FieldFn sq = [](const Real& x) { return x * x; };
  int n = 20;
  std::pair<Real, Real> hint{Real(-1.4), Real(1.4)};
  Poly q = varyingWeightOrtho(leb, sq, n, ctx, 0, &hint);
  auto roots = polyRoots(q, ctx);
  int count = 0;
  for (const auto& rm : roots.roots) {
    CHECK(rm.multiplicity == 1);
    CHECK(dbl(abs(rm.z.im)) < 1e-30);
    CHECK(std::abs(dbl(rm.z.re)) < 3.0);
    ++count;
  }
  CHECK(count == n);
}

TEST_CASE("cube-roots element: denominator zeros approach the Chebotarev star") {
  auto ctx = PrecisionContext::forDegree(18);
  PrecisionScope scope(ctx.bits);
  // f = z^{3/2} (z^3-1)^{-1/2} in the product class: branch points {0, roots of unity},
  // exponents {3/2, -1/2, -1/2, -1/2}.
  AlgebraicFunction f;
  Real half(0.5);
  Real s3 = sqrt(Real(3l)) / Real(2l);
  f.branch_points = {Cplx(0l), Cplx(1l), Cplx(-half, s3), Cplx(-half, -s3)};
  f.exponents = {Real(1.5), Real(-0.5), Real(-0.5), Real(-0.5)};
  auto s = seriesAtInfinity(f, 40, ctx);
  // sanity: equals (1 - z^-3)^(-1/2): coefficients at z^{-3k} are binom(2k,k)/4^k
  CHECK(dbl(abs(s.coeff[0] - Cplx(1l))) < 1e-60);
  CHECK(dbl(abs(s.coeff[3] - Cplx(0.5))) < 1e-60);
  CHECK(dbl(abs(s.coeff[6] - Cplx(0.375))) < 1e-60);
  CHECK(dbl(abs(s.coeff[1])) < 1e-60);

  int n = 18;
  auto r = diagonalPade(s, n, ctx);
  auto roots = polyRoots(r.Q, ctx);
  Cplx w1(Real(-half), s3), w2(Real(-half), -s3);
  int close = 0, total = 0;
  for (const auto& rm : roots.roots) {
    double d = std::min({distToSegment(rm.z, Cplx(1l)), distToSegment(rm.z, w1),
                         distToSegment(rm.z, w2)});
    ++total;
    if (d < 0.1) ++close;
  }
  CHECK(total >= n - 2);
  CHECK(close >= total - 2);  // spurious zeros are rare at this degree
}
