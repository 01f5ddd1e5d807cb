#pragma once

#include "ratlab/measure.hpp"

namespace ratlab {

using Interval = std::pair<Real, Real>;
using IntervalSet = std::vector<Interval>;
using FieldFn = RealFn;

struct SolveOpts {
  int ncheb = 48;      // Chebyshev coefficients per plate
  int oversample = 2;  // collocation points = oversample * ncheb
  int grid = 400;      // residual-report grid per interval
  double tol = 1e-8;   // target constancy residual
  int max_trim = 50;   // support-trimming iterations
  int escalations = 2; // ncheb escalation rounds if tol missed
};

struct FieldEquilibrium {
  Measure lambda;          // unit measure, ChebPieces on the support
  Real C;                  // modified Robin constant
  IntervalSet support;
  Real capacity;           // e^{-C}, meaningful for the zero field
  Real residual_support;   // max |U + phi - C| on the support grid
  Real residual_slack;     // min of (U + phi - C) off the support (>= -tol expected)
  int trim_iterations = 0;
};

struct CondenserEquilibrium {
  Measure lambda_E, lambda_F;  // unit measures (lambda_E is the Green equilibrium measure of E)
  Real C_E, C_F;               // constants of U^{lambda_F} - U^{lambda_E} on E and F
  Real w;                      // C_F - C_E > 0
  Real capacity;               // 1/w
  Real rho;                    // e^{-w}
  Real residual;               // max constancy violation on both plates
};

struct BalayageResult {
  Measure lambda;
  Real C_F;        // U^lambda - U^mu on F
  Real mass_error;
  Real residual;   // max |U^lambda - U^mu - C_F| on the F grid
};

struct VectorEquilibriumResult {
  FieldEquilibrium comp1, comp2;
  Real energy;        // sum a_ij [mu_i, mu_j]
  Real energy_init;   // energy of the arcsine initialization
  Real residual;      // max first-order violation over both components
  int iterations = 0;
};

FieldEquilibrium robinEquilibrium(const IntervalSet& F, const PrecisionContext& ctx,
                                  const SolveOpts& opts = {});

FieldEquilibrium fieldEquilibrium(const IntervalSet& F, const FieldFn& phi,
                                  const PrecisionContext& ctx, const SolveOpts& opts = {});

CondenserEquilibrium condenserEquilibrium(const Interval& E, const IntervalSet& F,
                                          const PrecisionContext& ctx, const SolveOpts& opts = {});

BalayageResult balayageFull(const Measure& mu, const IntervalSet& F, const PrecisionContext& ctx,
                            const SolveOpts& opts = {});
inline Measure balayage(const Measure& mu, const IntervalSet& F, const PrecisionContext& ctx,
                        const SolveOpts& opts = {}) {
  return balayageFull(mu, F, ctx, opts).lambda;
}

// Green potential of mu relative to the complement of F. A measure consisting
// of the single charge at infinity yields the Green function g(z, inf).
Real greenPotential(const Measure& mu, const IntervalSet& F, const Cplx& z,
                    const PrecisionContext& ctx, const SolveOpts& opts = {});

VectorEquilibriumResult vectorEquilibrium(const Interval& F1, const Interval& F2,
                                          const Real a[2][2], const PrecisionContext& ctx,
                                          const SolveOpts& opts = {});

// Mutual energy [mu, nu] = Int U^nu dmu.
Real mutualEnergy(const Measure& mu, const Measure& nu, mpfr_prec_t bits);

void validateIntervalSet(const IntervalSet& F);

}  // namespace ratlab
