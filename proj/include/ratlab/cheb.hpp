#pragma once

#include <vector>

#include "ratlab/cplx.hpp"
#include "ratlab/context.hpp"

namespace ratlab {

// First-kind Chebyshev points on [-1,1], ascending.
std::vector<Real> chebPoints(int n);

// Coefficients of sum c_k T_k interpolating the given values at chebPoints(n).
std::vector<Real> chebCoeffs(const std::vector<Real>& values);

Real chebEval(const std::vector<Real>& c, const Real& t);  // Clenshaw

// Joukowski-type data for the potential theory of a single interval.
// w = sqrt(z-1)sqrt(z+1) (principal branches), J = z + w, |J| >= 1 off [-1,1].
Cplx joukowski(const Cplx& z);

// U_k(z) = -(1/pi) Int ln|z-t| T_k(t)/sqrt(1-t^2) dt  for z anywhere:
//   k = 0: ln 2 - ln|J(z)|          (= ln 2 on the interval)
//   k >= 1: Re(J(z)^-k)/k           (= T_k(x)/k on the interval)
Real chebLogPotential(int k, const Cplx& z);

// C_k(z) = (1/pi) Int T_k(t)/(sqrt(1-t^2)(z-t)) dt = 1/(w(z) J(z)^k), z off [-1,1].
Cplx chebCauchy(int k, const Cplx& z);

// CDF at x in [-1,1] of the density (sum c_k T_k)/(pi sqrt(1-t^2)).
Real chebDensityCdf(const std::vector<Real>& c, const Real& x);

// Inverse of the CDF by bisection; density assumed nonnegative.
Real chebDensityQuantile(const std::vector<Real>& c, const Real& q, mpfr_prec_t bits);

}  // namespace ratlab
