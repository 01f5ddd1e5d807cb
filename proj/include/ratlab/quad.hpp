#pragma once

#include <functional>
#include <vector>

#include "ratlab/cplx.hpp"
#include "ratlab/context.hpp"

namespace ratlab {

struct QuadNodes {
  std::vector<Real> x;  // on (-1, 1)
  std::vector<Real> w;
};

// Gauss-Legendre nodes at the given precision, cached per (n, bits).
const QuadNodes& gaussLegendre(int n, mpfr_prec_t bits);

using RealFn = std::function<Real(const Real&)>;
using CplxFn1 = std::function<Cplx(const Real&)>;

Real integrate(const RealFn& f, const Real& a, const Real& b, int n, mpfr_prec_t bits);
Cplx integrate(const CplxFn1& f, const Real& a, const Real& b, int n, mpfr_prec_t bits);

// Cubic smoothstep pullback x = a + (b-a) u^2 (3-2u). Both endpoint factors
// (x-a)^(+-1/2) and (b-x)^(+-1/2) become analytic in u, so plain
// Gauss-Legendre on the pulled-back integrand converges geometrically.
// `panels` splits [0,1] evenly in u.
Real integrateGraded(const RealFn& f, const Real& a, const Real& b, int n, int panels,
                     mpfr_prec_t bits);
Cplx integrateGraded(const CplxFn1& f, const Real& a, const Real& b, int n, int panels,
                     mpfr_prec_t bits);

// Adaptive bisection with GL(n) vs GL(2n) error estimate.
Real integrateAdaptive(const RealFn& f, const Real& a, const Real& b, const Real& rel_tol,
                       mpfr_prec_t bits, int max_depth = 40);
Cplx integrateAdaptive(const CplxFn1& f, const Real& a, const Real& b, const Real& rel_tol,
                       mpfr_prec_t bits, int max_depth = 40);

// Dyadic panels refined toward the endpoint `a` (for log-type or unflagged
// algebraic singularities at a); the last panel nearest `a` is dropped once
// its contribution is below tol_abs.
Real integrateDyadicTowards(const RealFn& f, const Real& a, const Real& b, int n, int levels,
                            mpfr_prec_t bits);

// Pulled-back positions and weights of a graded panelization, for callers
// that need the nodes themselves (arc discretizations).
struct GradedGrid {
  std::vector<Real> x;
  std::vector<Real> w;
};
GradedGrid gradedGrid(const Real& a, const Real& b, int n, int panels, mpfr_prec_t bits);

}  // namespace ratlab
