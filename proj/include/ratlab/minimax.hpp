#pragma once

#include "ratlab/equilibrium.hpp"
#include "ratlab/pade.hpp"

namespace ratlab {

struct MinimaxOpts {
  double cert_tol = 1e-3;   // relative equioscillation target
  int max_iter = 900;
  bool even_reduction = false;   // even f on symmetric E: solve in u = x^2
  bool mobius_semiaxis = false;  // f on [0,inf): solve in t, x = (1+t)/(1-t)
  double gamma = 0.7;            // interval-rescaling exponent
  std::vector<Real> initial_nodes;  // optional warm start (2n+1 nodes)
};

struct MinimaxResult {
  RationalFn r;                    // in the original variable
  Real error;                      // sup |f - r| estimate
  Real lower_bound;                // de la Vallee-Poussin bound
  std::vector<Real> alternation;   // increasing; +inf possible on the semi-axis
  bool certified = false;
  bool degenerate = false;         // defect: fewer alternations than 2n+2
  int iterations = 0;
};

// Best uniform rational approximation of order (n,n) on E by a
// Remez-exchange-type iteration on interpolation nodes in barycentric form.
MinimaxResult rationalMinimax(const RealFn& f, const Interval& E, int n,
                              const PrecisionContext& ctx, const MinimaxOpts& opts = {});

}  // namespace ratlab
