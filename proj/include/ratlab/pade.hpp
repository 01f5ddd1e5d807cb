#pragma once

#include "ratlab/funcs.hpp"
#include "ratlab/linalg.hpp"

namespace ratlab {

struct RationalFn {
  Poly P, Q;
  long order = 0;
  std::vector<Cplx> cancelled;   // common roots merged out of P/Q
  std::vector<Real> residuals;   // per-condition construction residuals
  Real rank_gap;                 // sigma_min / sigma_max of the defining system
  bool degenerate = false;

  Cplx operator()(const Cplx& z) const { return P(z) / Q(z); }
};

struct InterpolationScheme {
  std::vector<Real> nodes;  // 2n points
  std::pair<Real, Real> E;

  static InterpolationScheme explicitTable(std::pair<Real, Real> E, std::vector<Real> nodes);
  // Nodes as the quantiles F_mu^{-1}((k-1/2)/(2n)) of a unit measure on E
  // given as a single ChebPiece (an equilibrium-solver output).
  static InterpolationScheme fromLimitMeasure(const ChebPiece& mu, int n, mpfr_prec_t bits);

  Cplx evalW(const Cplx& z) const;
  Poly polyW() const;
};

// Orthogonality weight for residual checks: either a real-line measure with
// optional varying factor and node denominator, or a circle contour with an
// explicit integrand function.
struct WeightSpec {
  enum class Kind { RealLine, Contour } kind = Kind::RealLine;

  // RealLine: d w(t) = e^{-2 n_vary phi(t)} dsigma(t) / W(t)
  Measure sigma;
  RealFn phi;                  // may be empty
  int vary_n = 0;
  std::vector<Real> denom_nodes;  // empty => W == 1
  int resolution = 96;

  // Contour: integral over |z - center| = radius of Q(z) z^j f(z) dz
  Cplx center;
  Real radius;
  std::function<Cplx(const Cplx&)> contour_fn;
  int contour_points = 1024;
};

struct PadeOpts {
  bool cancel_common_roots = true;
  int sigma_resolution = 96;  // quadrature resolution against sigma
};

// Diagonal Pade approximant at infinity of order n: Q f - P = O(z^-(n+1)).
RationalFn diagonalPade(const SeriesAtInfinity& s, int n, const PrecisionContext& ctx,
                        const PadeOpts& opts = {});

// Multipoint Pade: interpolation at the 2n scheme nodes with r_n(inf) = 0;
// denominator built from the orthogonality conditions against dsigma/W_n.
RationalFn multipointPade(const MarkovFunction& f, const InterpolationScheme& scheme, int n,
                          const PrecisionContext& ctx, const PadeOpts& opts = {});

// Hermite formula value (W/Q^2)(z) Int Q^2(t)/W(t) dsigma(t)/(t-z).
Cplx hermiteRemainder(const MarkovFunction& f, const RationalFn& r,
                      const InterpolationScheme& scheme, const Cplx& z,
                      const PrecisionContext& ctx, int resolution = 160);

// max_j |moment_j(Q)| / |moment_{deg Q}(Q)| over j < deg Q.
Real orthogonalityResidual(const Poly& Q, const WeightSpec& w, const PrecisionContext& ctx);

// Degree-n polynomial orthogonal to P_{n-1} w.r.t. e^{-2n phi} dsigma.
// basis_hint optionally overrides the Chebyshev basis interval used to
// condition the moment system (defaults to the hull of sigma).
Poly varyingWeightOrtho(const Measure& sigma, const RealFn& phi_n, int n,
                        const PrecisionContext& ctx, int resolution = 0,
                        const std::pair<Real, Real>* basis_hint = nullptr);

// T_k-combination to monomial coefficients on [a,b].
Poly chebCombinationToPoly(const std::vector<Cplx>& c, const Real& a, const Real& b);

}  // namespace ratlab
