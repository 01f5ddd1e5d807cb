#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "ratlab/equilibrium.hpp"

using namespace ratlab;

namespace {
double dbl(const Real& x) { return x.toDouble(); }
}

TEST_CASE("logPotential: point mass and uniform circle") {
  PrecisionScope scope(256);
  Measure delta = Measure::pointMass(Cplx(0l));
  CHECK(dbl(abs(delta.logPotential(Cplx(3l), 256) + log(Real(3l)))) < 1e-70);

  // Uniform unit circle discretized by atoms: mean-value property gives
  // -ln|z| outside and 0 inside (trapezoid rule is spectrally accurate).
  Measure circle;
  int N = 128;
  for (int k = 0; k < N; ++k) {
    Real th = Real(2l) * Real::pi() * Real(k) / Real(N);
    circle.atoms.push_back({Cplx(cos(th), sin(th)), Real(1l) / Real(N), false});
  }
  CHECK(dbl(abs(circle.logPotential(Cplx(2l), 256) + log(Real(2l)))) < 1e-30);
  CHECK(dbl(abs(circle.logPotential(Cplx(0.5), 256))) < 1e-30);
}

TEST_CASE("logPotential of the arcsine measure is ln 2 on the interval") {
  PrecisionScope scope(256);
  Measure arc = Measure::arcsine(Real(-1l), Real(1l));
  for (int i = 0; i < 50; ++i) {
    Real x = Real(-1l) + Real(2l * i + 1) / Real(50l);
    CHECK(dbl(abs(arc.logPotential(Cplx(x), 256) - log(Real(2l)))) < 1e-70);
  }
  CHECK(dbl(abs(arc.logPotential(Cplx(0l), 256) - log(Real(2l)))) < 1e-70);
}

TEST_CASE("annulus convention: uniform circle plates give capacity 1/ln(R/r)") {
  PrecisionScope scope(256);
  // E: |z|=1, F: |z|=e; uniform unit measures are the exact equilibrium pair.
  int N = 256;
  auto ring = [&](const Real& radius) {
    Measure m;
    for (int k = 0; k < N; ++k) {
      Real th = Real(2l) * Real::pi() * Real(k) / Real(N);
      m.atoms.push_back({Cplx(radius * cos(th), radius * sin(th)), Real(1l) / Real(N), false});
    }
    return m;
  };
  Measure lamE = ring(Real(1l));
  Measure lamF = ring(exp(Real(1l)));
  // v = U^{lambda_F} - U^{lambda_E} is constant inside each plate's circle /
  // outside the outer one; probe away from the atoms where the trapezoid
  // discretization is spectrally accurate.
  Cplx insideE(0.31, 0.17);
  Cplx outsideF(6.1, 1.3);
  Real vE = lamF.logPotential(insideE, 256) - lamE.logPotential(insideE, 256);
  Real vF = lamF.logPotential(outsideF, 256) - lamE.logPotential(outsideF, 256);
  Real w = vF - vE;
  CHECK(dbl(abs(w - Real(1l))) < 1e-8);              // capacity 1/w = 1
  CHECK(dbl(abs(exp(-w) - exp(Real(-1l)))) < 1e-8);  // rho = r/R = e^-1
}

TEST_CASE("robinEquilibrium of [-1,1] is the arcsine measure") {
  auto ctx = PrecisionContext::withBits(256);
  auto eq = robinEquilibrium({{Real(-1l), Real(1l)}}, ctx);
  CHECK(dbl(abs(eq.C - log(Real(2l)))) < 1e-12);
  CHECK(dbl(abs(eq.capacity - Real(0.5))) < 1e-12);
  CHECK(dbl(eq.residual_support) < 1e-8);
  Real x(0.3);
  Real expect = Real(1l) / (Real::pi() * sqrt(Real(1l) - x * x));
  CHECK(dbl(abs(eq.lambda.cheb[0].density(x) - expect)) < 1e-12);
  CHECK(dbl(abs(eq.lambda.mass(ctx.bits) - Real(1l))) < 1e-30);
}

TEST_CASE("robinEquilibrium scaling: cap([-2,2]) = 1") {
  auto ctx = PrecisionContext::withBits(256);
  auto eq = robinEquilibrium({{Real(-2l), Real(2l)}}, ctx);
  CHECK(dbl(abs(eq.capacity - Real(1l))) < 1e-12);
}

TEST_CASE("robinEquilibrium on two symmetric intervals is symmetric") {
  auto ctx = PrecisionContext::withBits(256);
  Real a(0.3);
  auto eq = robinEquilibrium({{Real(-1l), -a}, {a, Real(1l)}}, ctx);
  CHECK(dbl(eq.residual_support) < 1e-8);
  CHECK(dbl(abs(eq.lambda.cheb[0].mass() - Real(0.5))) < 1e-10);
  CHECK(dbl(abs(eq.lambda.moment(1, ctx.bits))) < 1e-10);
  CHECK(dbl(abs(eq.lambda.moment(3, ctx.bits))) < 1e-10);
  Real x(0.55);
  Real dplus = eq.lambda.cheb[1].density(x);
  Real dminus = eq.lambda.cheb[0].density(-x);
  CHECK(dbl(abs(dplus - dminus)) < 1e-9);
}

TEST_CASE("fieldEquilibrium with phi = x^2 on [-3,3]: semicircle on [-1,1]") {
  auto ctx = PrecisionContext::withBits(256);
  FieldFn phi = [](const Real& x) { return x * x; };
  auto eq = fieldEquilibrium({{Real(-3l), Real(3l)}}, phi, ctx);
  REQUIRE(eq.support.size() == 1);
  CHECK(std::abs(dbl(eq.support[0].first) + 1.0) < 1e-4);
  CHECK(std::abs(dbl(eq.support[0].second) - 1.0) < 1e-4);
  CHECK(dbl(eq.residual_support) < 1e-6);
  CHECK(dbl(eq.residual_slack) > -1e-6);
  Real worst(0l);
  for (int i = 1; i < 40; ++i) {
    Real x = Real(-1l) + Real(2l * i) / Real(40l);
    Real expect = Real(2l) / Real::pi() * sqrt(Real(1l) - x * x);
    worst = max(worst, abs(eq.lambda.cheb[0].density(x) - expect));
  }
  CHECK(dbl(worst) < 1e-4);
}

TEST_CASE("fieldEquilibrium with a balayage-type field passes its residual report") {
  auto ctx = PrecisionContext::withBits(256);
  FieldFn phi = [](const Real& x) { return log(abs(x - Real(2l))); };
  auto eq = fieldEquilibrium({{Real(-1l), Real(1l)}}, phi, ctx);
  CHECK(dbl(eq.residual_support) < 1e-6);
  CHECK(dbl(eq.residual_slack) > -1e-6);
  CHECK(dbl(abs(eq.lambda.mass(ctx.bits) - Real(1l))) < 1e-20);
}

TEST_CASE("condenserEquilibrium matches the elliptic-integral oracle") {
  auto ctx = PrecisionContext::withBits(256);
  Real d(0.25);
  auto ce = condenserEquilibrium({d, Real(1l)}, {{Real(-1l), -d}}, ctx);
  Real oracle = oracles::condenserCapacityTwoIntervals(d, Real(1l), Real(-1l), -d);
  CHECK(dbl(abs(ce.capacity - oracle) / oracle) < 1e-8);
  CHECK(dbl(ce.residual) < 1e-8);
  CHECK(dbl(ce.w) > 0.0);
  CHECK(dbl(ce.rho) > 0.0);
  CHECK(dbl(ce.rho) < 1.0);

  auto sw = condenserEquilibrium({Real(-1l), -d}, {{d, Real(1l)}}, ctx);
  CHECK(dbl(abs(sw.capacity - ce.capacity)) < 1e-10);
}

TEST_CASE("condenser rejects touching plates") {
  auto ctx = PrecisionContext::withBits(128);
  CHECK_THROWS_AS(condenserEquilibrium({Real(0l), Real(1l)}, {{Real(-1l), Real(0l)}}, ctx), Error);
}

TEST_CASE("balayage of a point mass onto [-1,1]") {
  auto ctx = PrecisionContext::withBits(256);
  Measure mu = Measure::pointMass(Cplx(2l));
  auto bal = balayageFull(mu, {{Real(-1l), Real(1l)}}, ctx);
  CHECK(dbl(bal.mass_error) < 1e-10);
  CHECK(dbl(bal.residual) < 1e-8);
  // Closed form: sqrt(3)/(pi (2-x) sqrt(1-x^2)).
  Real x(0.4);
  Real expect = sqrt(Real(3l)) / (Real::pi() * (Real(2l) - x) * sqrt(Real(1l) - x * x));
  CHECK(dbl(abs(bal.lambda.cheb[0].density(x) - expect)) < 1e-9);
}

TEST_CASE("balayage is the identity on measures already inside F") {
  auto ctx = PrecisionContext::withBits(192);
  Measure mu = Measure::arcsine(Real(-0.5), Real(0.5));
  auto lam = balayage(mu, {{Real(-1l), Real(1l)}}, ctx);
  CHECK(dbl(abs(lam.logPotential(Cplx(2l), 192) - mu.logPotential(Cplx(2l), 192))) < 1e-40);
}

TEST_CASE("balayage is linear") {
  auto ctx = PrecisionContext::withBits(192);
  IntervalSet F = {{Real(-1l), Real(1l)}};
  Measure m1 = Measure::pointMass(Cplx(2l), Real(1l));
  Measure m2 = Measure::pointMass(Cplx(Real(0l), Real(3l)), Real(1l));
  Measure m12;
  m12.atoms = {{Cplx(2l), Real(0.7), false}, {Cplx(Real(0l), Real(3l)), Real(0.3), false}};
  auto b1 = balayage(m1, F, ctx);
  auto b2 = balayage(m2, F, ctx);
  auto b12 = balayage(m12, F, ctx);
  for (int i = 0; i < 20; ++i) {
    Real x = Real(-1l) + Real(2l * i + 1) / Real(20l);
    Real lin = Real(0.7) * b1.cheb[0].density(x) + Real(0.3) * b2.cheb[0].density(x);
    CHECK(dbl(abs(b12.cheb[0].density(x) - lin)) < 1e-9);
  }
}

TEST_CASE("greenPotential: Green function of [-1,1] with pole at infinity") {
  auto ctx = PrecisionContext::withBits(256);
  Measure inf;
  inf.atoms.push_back({Cplx(0l), Real(1l), true});
  IntervalSet F = {{Real(-1l), Real(1l)}};
  Real g2 = greenPotential(inf, F, Cplx(2l), ctx);
  Real expect = log(Real(2l) + sqrt(Real(3l)));
  CHECK(dbl(abs(g2 - expect)) < 1e-10);
  CHECK(dbl(abs(greenPotential(inf, F, Cplx(0.37), ctx))) < 1e-9);
}

TEST_CASE("greenPotential symmetry g(z,t) = g(t,z)") {
  auto ctx = PrecisionContext::withBits(192);
  IntervalSet F = {{Real(-1l), Real(1l)}};
  std::vector<std::pair<Cplx, Cplx>> pairs = {
      {Cplx(2l), Cplx(Real(0l), Real(1.5))},
      {Cplx(-3l, 0.5), Cplx(1.7, -0.6)},
  };
  for (auto& [z, t] : pairs) {
    Real a = greenPotential(Measure::pointMass(t), F, z, ctx);
    Real b = greenPotential(Measure::pointMass(z), F, t, ctx);
    CHECK(dbl(abs(a - b)) < 1e-8);
  }
}

TEST_CASE("vector (Angelesco) equilibrium: mirror symmetry and energy decrease") {
  auto ctx = PrecisionContext::withBits(192);
  SolveOpts opts;
  opts.ncheb = 32;
  Real A[2][2] = {{Real(1l), Real(0.5)}, {Real(0.5), Real(1l)}};
  auto ve = vectorEquilibrium({Real(-2l), Real(-1l)}, {Real(1l), Real(2l)}, A, ctx, opts);
  CHECK(dbl(ve.energy) <= dbl(ve.energy_init) + 1e-12);
  CHECK(dbl(ve.residual) < 1e-6);
  for (int i = 1; i < 12; ++i) {
    Real x = Real(1l) + Real(i) / Real(12l);
    Real d2 = ve.comp2.lambda.cheb[0].density(x);
    Real d1 = ve.comp1.lambda.cheb[0].density(-x);
    CHECK(dbl(abs(d1 - d2)) < 1e-8);
  }
}

TEST_CASE("vector equilibrium at large separation approaches per-interval arcsine") {
  auto ctx = PrecisionContext::withBits(192);
  SolveOpts opts;
  opts.ncheb = 32;
  Real A[2][2] = {{Real(1l), Real(0.5)}, {Real(0.5), Real(1l)}};
  auto ve = vectorEquilibrium({Real(-101l), Real(-100l)}, {Real(100l), Real(101l)}, A, ctx, opts);
  auto rob = robinEquilibrium({{Real(100l), Real(101l)}}, ctx);
  // Kolmogorov-style deviation of the CDFs (densities blow up at endpoints).
  Real worst(0l);
  for (int i = 1; i < 30; ++i) {
    Real t = Real(-1l) + Real(2l * i) / Real(30l);
    Real c1 = chebDensityCdf(ve.comp2.lambda.cheb[0].coeff, t);
    Real c2 = chebDensityCdf(rob.lambda.cheb[0].coeff, t);
    worst = max(worst, abs(c1 - c2));
  }
  CHECK(dbl(worst) < 1e-3);
}

TEST_CASE("condenser capacity is monotone under enlarging F") {
  auto ctx = PrecisionContext::withBits(192);
  Interval E{Real(1l), Real(2l)};
  Real c1 = condenserEquilibrium(E, {{Real(-1l), Real(0l)}}, ctx).capacity;
  Real c2 = condenserEquilibrium(E, {{Real(-1l), Real(0.3)}}, ctx).capacity;
  Real c3 = condenserEquilibrium(E, {{Real(-2l), Real(0.3)}}, ctx).capacity;
  CHECK(dbl(c2) > dbl(c1));
  CHECK(dbl(c3) > dbl(c2));
}
