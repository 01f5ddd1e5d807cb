#include "doctest.h"

#include <cmath>

#include "ratlab/funcs.hpp"

using namespace ratlab;

namespace {
double dbl(const Real& x) { return x.toDouble(); }

// binomial(alpha, k) for real alpha
Real binom(const Real& alpha, int k) {
  Real r(1l);
  for (int j = 0; j < k; ++j) r *= (alpha - Real(j)) / Real(j + 1);
  return r;
}
}

TEST_CASE("markovEval: unit mass at zero") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  auto f = MarkovFunction::fromMeasure(Measure::pointMass(Cplx(0l)), ctx.bits);
  Cplx v = markovEval(f, Cplx(2l), ctx);
  CHECK(dbl(abs(v - Cplx(Real(-0.5)))) < 1e-70);
}

TEST_CASE("markovEval: Lebesgue on [-1,0] at z=1 is ln(1/2)") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  auto f = MarkovFunction::fromMeasure(Measure::lebesgue(Real(-1l), Real(0l)), ctx.bits);
  Cplx v = markovEval(f, Cplx(1l), ctx);
  // Int dt/(t-1) on [-1,0] = ln|t-1| | = ln(1) - ln(2) = -ln 2
  CHECK(dbl(abs(v - Cplx(-log(Real(2l))))) < 1e-40);
}

TEST_CASE("markovEval: sqrt weight of the |x| reduction at z=1") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  // f(z) = (1/pi) int_{-1}^{0} sqrt(-t)/(z-t) dt; substitution -t = s^2 gives
  // the closed form (2/pi)(1 - sqrt(z) atan(1/sqrt(z))) for z > 0.
  Poly invpi = Poly::constant(Cplx(Real(1l) / Real::pi()));
  Measure sigma = Measure::weightPiece(Real(-1l), Real(0l), invpi, EndPower::One, EndPower::Sqrt);
  auto f = MarkovFunction::fromMeasure(sigma, ctx.bits);
  // Note (Mar) orientation: markovEval returns int dsigma/(t-z) = -(paper's f).
  Cplx v = markovEval(f, Cplx(1l), ctx);
  Real closed = Real(2l) / Real::pi() * (Real(1l) - atan(Real(1l)));
  CHECK(dbl(abs(v + Cplx(closed))) < 1e-40);
}

TEST_CASE("markovEval: Herglotz sign and near-support rejection") {
  auto ctx = PrecisionContext::withBits(192);
  PrecisionScope scope(ctx.bits);
  auto f = MarkovFunction::fromMeasure(Measure::lebesgue(Real(-1l), Real(0l)), ctx.bits);
  Cplx up = markovEval(f, Cplx(0.3, 0.8), ctx);
  CHECK(dbl(up.im) > 0.0);
  Cplx down = markovEval(f, Cplx(0.3, -0.8), ctx);
  CHECK(dbl(down.im) < 0.0);
  CHECK_THROWS_AS(markovEval(f, Cplx(-0.5), ctx), Error);
}

TEST_CASE("markov symmetry: odd function for symmetric sigma") {
  auto ctx = PrecisionContext::withBits(192);
  PrecisionScope scope(ctx.bits);
  auto f = MarkovFunction::fromMeasure(Measure::arcsine(Real(-1l), Real(1l)), ctx.bits);
  for (int i = 0; i < 20; ++i) {
    Cplx z(1.2 + 0.3 * i, 0.7 + 0.11 * i);
    Cplx a = markovEval(f, z, ctx);
    Cplx b = markovEval(f, -z, ctx);
    CHECK(dbl(abs(a + b)) < 1e-40);
  }
}

TEST_CASE("seriesAtInfinity: Markov cases") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  auto delta = MarkovFunction::fromMeasure(Measure::pointMass(Cplx(0l)), ctx.bits);
  auto s = seriesAtInfinity(delta, 5, ctx);
  CHECK(dbl(abs(s.coeff[0])) < 1e-70);
  CHECK(dbl(abs(s.coeff[1] + Cplx(1l))) < 1e-70);
  for (int k = 2; k <= 5; ++k) CHECK(dbl(abs(s.coeff[k])) < 1e-70);

  // arcsine: f(z) = -1/sqrt(z^2-1); moments 1, 0, 1/2, 0, 3/8
  auto arc = MarkovFunction::fromMeasure(Measure::arcsine(Real(-1l), Real(1l)), ctx.bits);
  auto sa = seriesAtInfinity(arc, 6, ctx);
  CHECK(dbl(abs(sa.coeff[1] + Cplx(1l))) < 1e-60);
  CHECK(dbl(abs(sa.coeff[2])) < 1e-60);
  CHECK(dbl(abs(sa.coeff[3] + Cplx(0.5))) < 1e-60);
  CHECK(dbl(abs(sa.coeff[4])) < 1e-60);
  CHECK(dbl(abs(sa.coeff[5] + Cplx(0.375))) < 1e-60);
}

TEST_CASE("seriesAtInfinity: algebraic (1-1/z)^(1/2) against the binomial oracle") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  AlgebraicFunction f;
  f.branch_points = {Cplx(0l), Cplx(1l)};
  f.exponents = {Real(-0.5), Real(0.5)};
  auto s = seriesAtInfinity(f, 12, ctx);
  CHECK(dbl(abs(s.coeff[0] - Cplx(1l))) < 1e-70);
  CHECK(dbl(abs(s.coeff[1] + Cplx(0.5))) < 1e-70);
  CHECK(dbl(abs(s.coeff[2] + Cplx(0.125))) < 1e-70);
  // full binomial check: f = sum binom(1/2,k) (-1/z)^k
  for (int k = 0; k <= 12; ++k) {
    Real expect = binom(Real(0.5), k) * (k % 2 ? Real(-1l) : Real(1l));
    CHECK(dbl(abs(s.coeff[k] - Cplx(expect))) < 1e-65);
  }
}

TEST_CASE("series consistency: truncated series matches markovEval at |z| = 10") {
  auto ctx = PrecisionContext::withBits(256);
  PrecisionScope scope(ctx.bits);
  auto f = MarkovFunction::fromMeasure(Measure::lebesgue(Real(-1l), Real(-0.25)), ctx.bits);
  int m = 24;
  auto s = seriesAtInfinity(f, m, ctx);
  Real maxc(0l);
  for (const auto& c : s.coeff) maxc = max(maxc, abs(c));
  Cplx z(6l, 8l);
  Cplx direct = markovEval(f, z, ctx);
  Cplx trunc = s.evalTruncated(z);
  Real bound = maxc * pow(Real(0.1), static_cast<long>(m)) / (Real(1l) - Real(0.1));
  CHECK(dbl(abs(direct - trunc)) < dbl(bound));
}

TEST_CASE("algebraic monodromy around a single branch point") {
  auto ctx = PrecisionContext::withBits(192);
  PrecisionScope scope(ctx.bits);
  AlgebraicFunction f;
  f.branch_points = {Cplx(0l), Cplx(1l), Cplx(-1l)};
  f.exponents = {Real(0.375), Real(-0.125), Real(-0.25)};  // dyadic, sum exactly 0
  for (size_t k = 0; k < 3; ++k) {
    Cplx factor = monodromyFactor(f, f.branch_points[k], Real(0.3), ctx);
    Real ang = Real(2l) * Real::pi() * f.exponents[k];
    Cplx expect(cos(ang), sin(ang));
    CHECK(dbl(abs(factor - expect)) < 1e-40);
  }
  // A loop enclosing all branch points is trivial (sum of exponents 0).
  Cplx all = monodromyFactor(f, Cplx(0l), Real(5l), ctx);
  CHECK(dbl(abs(all - Cplx(1l))) < 1e-40);
}

TEST_CASE("algebraic validation rejects bad parameter sets") {
  auto ctx = PrecisionContext::withBits(128);
  PrecisionScope scope(ctx.bits);
  AlgebraicFunction f;
  f.branch_points = {Cplx(0l), Cplx(1l)};
  f.exponents = {Real(-0.5), Real(0.25)};  // sum != 0
  CHECK_THROWS_AS(f.validate(ctx), Error);
  f.exponents = {Real(-1l), Real(1l)};  // integers
  CHECK_THROWS_AS(f.validate(ctx), Error);
  f.branch_points = {Cplx(0l), Cplx(0l)};
  f.exponents = {Real(-0.5), Real(0.5)};
  CHECK_THROWS_AS(f.validate(ctx), Error);
}

TEST_CASE("json round trip of function descriptions") {
  auto ctx = PrecisionContext::withBits(192);
  PrecisionScope scope(ctx.bits);
  auto f = MarkovFunction::fromMeasure(Measure::lebesgue(Real(-1l), Real(-0.25)), ctx.bits);
  auto f2 = markovFromJson(toJson(f));
  CHECK(dbl(abs(markovEval(f, Cplx(2l), ctx) - markovEval(f2, Cplx(2l), ctx))) < 1e-50);

  AlgebraicFunction g;
  g.branch_points = {Cplx(0l), Cplx(1l)};
  g.exponents = {Real(-0.5), Real(0.5)};
  auto g2 = algebraicFromJson(toJson(g));
  CHECK(g2.branch_points.size() == 2);
  CHECK(dbl(abs(g2.exponents[0] + Real(0.5))) < 1e-50);
}
