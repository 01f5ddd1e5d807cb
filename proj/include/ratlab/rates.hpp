#pragma once

#include "ratlab/equilibrium.hpp"
#include "ratlab/pade.hpp"

namespace ratlab {

struct NearBestResult {
  RationalFn r;
  Real sup_error;
  InterpolationScheme scheme;
  int sign_changes = 0;  // of f - r on E, from the dense scan
};

// Multipoint Pade at the quantile nodes of the Green equilibrium measure of E
// relative to the complement of F; sup-error by dense scanning refined until
// stable to 1%. With equalize_rounds > 0 the table is then adjusted a few
// rounds so the error oscillations level out (the interpolation-table
// modification that turns the construction asymptotically equioscillating).
NearBestResult nearBestInterpolant(const MarkovFunction& f, const Interval& E, int n,
                                   const PrecisionContext& ctx, int equalize_rounds = 0);

// Best approximation through the interpolation machinery: a 2n+1-node table
// whose error envelope is flattened by quantile warping. The 2n+2 alternating
// lobes certify the result a la de la Vallee-Poussin.
struct BestApproxResult {
  RationalFn r;
  Real error;        // sup of |f - r|
  Real lower_bound;  // min alternating lobe height
  int lobes = 0;
  bool certified = false;  // lobes >= 2n+2 and lower/upper within cert_tol
};

BestApproxResult bestApproxMarkov(const MarkovFunction& f, const Interval& E, int n,
                                  const PrecisionContext& ctx, double cert_tol = 0.05,
                                  int max_rounds = 12);

struct RateEntry {
  int n;
  Real error;
};

enum class RateLaw { Geometric, SqrtN, Halphen };

struct RateReport {
  RateLaw law;
  // Geometric: lim error^{1/n} (Aitken-accelerated); SqrtN: lim error e^{pi sqrt n}
  // (Richardson in 1/sqrt n); Halphen: fitted prefactor c with error = c v^{n+1/2}.
  Real estimate;
  Real fit_v;              // Halphen ratio (also reported for Geometric as ratio mean)
  std::vector<Real> raw;   // law-transformed sequence
  Real fit_residual;
  bool low_confidence = false;
};

RateReport rateReport(const std::vector<RateEntry>& series, RateLaw law);

}  // namespace ratlab
