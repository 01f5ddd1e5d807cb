#include "doctest.h"

#include <cmath>

#include "ratlab/equilibrium.hpp"
#include "ratlab/rates.hpp"
#include "ratlab/scompact.hpp"
#include "ratlab/zerodist.hpp"

using namespace ratlab;

namespace {
double dbl(const Real& x) { return x.toDouble(); }

Poly chebyshevT(int n) {
  Poly t0 = Poly::constant(Cplx(1l));
  Poly t1 = Poly::x();
  if (n == 0) return t0;
  for (int k = 2; k <= n; ++k) {
    Poly t2 = Poly::x() * t1 * Cplx(2l) - t0;
    t0 = t1;
    t1 = t2;
  }
  return t1;
}
}

TEST_CASE("countingMeasure: multiplicities and rejection of the zero polynomial") {
  auto ctx = PrecisionContext::withBits(192);
  PrecisionScope scope(ctx.bits);
  Poly p = Poly::fromRoots({Cplx(1l), Cplx(1l), Cplx(1l)});
  auto cm = countingMeasure(p, 3, ctx);
  CHECK(cm.zeros.size() == 3);
  CHECK(dbl(abs(cm.zeros[0] - Cplx(1l))) < 1e-30);
  CHECK(dbl(cm.mass() - Real(1l)) == 0.0);
  CHECK_THROWS_AS(countingMeasure(Poly(), 1, ctx), Error);

  auto t4 = countingMeasure(chebyshevT(4), 4, ctx);
  REQUIRE(t4.zeros.size() == 4);
  for (int k = 0; k < 4; ++k) {
    Real expect = cos(Real::pi() * Real(2 * (3 - k) + 1) / Real(8l));
    CHECK(dbl(abs(t4.zeros[k] - Cplx(expect))) < 1e-40);
  }
}

TEST_CASE("weakStarDistance: identical discretizations give zero distances") {
  auto ctx = PrecisionContext::withBits(192);
  PrecisionScope scope(ctx.bits);
  Measure arcsine = Measure::arcsine(Real(-1l), Real(1l));
  auto ref = refFromChebMeasure(arcsine);
  // mu with atoms exactly at the arcsine quantiles: kolmogorov <= 1/(2n)
  int n = 40;
  CountingMeasure cm;
  cm.normalization = n;
  for (int k = 1; k <= n; ++k) {
    Real q = Real(2 * k - 1) / Real(2 * n);
    cm.zeros.push_back(Cplx(chebDensityQuantile({Real(1l)}, q, ctx.bits)));
  }
  auto rep = weakStarDistance(cm, arcsine, ref, ctx.bits);
  CHECK(dbl(rep.kolmogorov) <= 0.5 / n + 2e-4);  // + reference-interpolation slack
  CHECK(dbl(rep.hausdorff_support) < 1e-12);
  CHECK(rep.stray_zeros == 0);
  CHECK(dbl(rep.moment_dist) < 0.02);
}

TEST_CASE("weakStarDistance: Chebyshev zeros against the arcsine measure") {
  auto ctx = PrecisionContext::forDegree(60);
  PrecisionScope scope(ctx.bits);
  auto cm = countingMeasure(chebyshevT(60), 60, ctx);
  Measure arcsine = Measure::arcsine(Real(-1l), Real(1l));
  auto rep = weakStarDistance(cm, arcsine, refFromChebMeasure(arcsine), ctx.bits);
  CHECK(dbl(rep.kolmogorov) <= 0.02);
  CHECK(rep.stray_zeros == 0);
}

TEST_CASE("weakStarDistance is a pseudometric on sampled configurations") {
  auto ctx = PrecisionContext::withBits(192);
  PrecisionScope scope(ctx.bits);
  Measure arcsine = Measure::arcsine(Real(-1l), Real(1l));
  auto ref = refFromChebMeasure(arcsine);
  auto make = [&](double shift) {
    CountingMeasure cm;
    cm.normalization = 24;
    for (int k = 1; k <= 24; ++k) {
      Real q = Real(2 * k - 1) / Real(48l);
      Real x = chebDensityQuantile({Real(1l)}, q, ctx.bits) * Real(1.0 - shift);
      cm.zeros.push_back(Cplx(x));
    }
    return cm;
  };
  auto a = make(0.0);
  auto b = make(0.05);
  auto c = make(0.12);
  auto dk = [&](const CountingMeasure& m) {
    return dbl(weakStarDistance(m, arcsine, ref, ctx.bits).kolmogorov);
  };
  // triangle-ish inequality through the common target plus symmetry of roles:
  // d(a,nu) <= d(b,nu) + sup-shift effect; here just check monotone growth
  CHECK(dk(a) < dk(b));
  CHECK(dk(b) < dk(c));
}

TEST_CASE("stray zeros are excluded from the CDF but recorded") {
  auto ctx = PrecisionContext::withBits(192);
  PrecisionScope scope(ctx.bits);
  Measure arcsine = Measure::arcsine(Real(-1l), Real(1l));
  auto ref = refFromChebMeasure(arcsine);
  CountingMeasure cm;
  cm.normalization = 10;
  for (int k = 1; k <= 9; ++k) {
    Real q = Real(2 * k - 1) / Real(18l);
    cm.zeros.push_back(Cplx(chebDensityQuantile({Real(1l)}, q, ctx.bits)));
  }
  cm.zeros.push_back(Cplx(Real(0.3), Real(2l)));  // spurious pole far off
  auto rep = weakStarDistance(cm, arcsine, ref, ctx.bits);
  CHECK(rep.stray_zeros == 1);
  CHECK(dbl(rep.hausdorff_support) > 1.9);
  CHECK(dbl(rep.kolmogorov) < 0.2);
}

TEST_CASE("Pade denominators of the Markov experiment drift to the balayage measure") {
  // Interpolation nodes drawn from the Green equilibrium measure on E:
  // X(Q_n)/n approaches bal(lambda_E, F) = lambda_F of the condenser.
  auto ctx = PrecisionContext::forDegree(24);
  PrecisionScope scope(ctx.bits);
  auto f = MarkovFunction::fromMeasure(Measure::lebesgue(Real(-1l), Real(-0.25)), ctx.bits);
  Interval E{Real(0l), Real(1l)};
  auto ce = condenserEquilibrium(E, {{f.f_lo, f.f_hi}}, ctx);
  auto ref = refFromChebMeasure(ce.lambda_F);
  Real prev(1l);
  for (int n : {8, 24}) {
    auto nb = nearBestInterpolant(f, E, n, ctx);
    auto cm = countingMeasure(nb.r.Q, n, ctx);
    auto rep = weakStarDistance(cm, ce.lambda_F, ref, ctx.bits);
    CHECK(dbl(rep.kolmogorov) < dbl(prev) * 1.2 + 1e-12);
    prev = rep.kolmogorov;
  }
  CHECK(dbl(prev) < 0.08);
}
