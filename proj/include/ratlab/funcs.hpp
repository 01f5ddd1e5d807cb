#pragma once

#include <string>

#include "ratlab/measure.hpp"

namespace ratlab {

// Cauchy transform f(z) = Int dsigma(t)/(t - z) of a positive measure with
// compact support in the real interval F.
struct MarkovFunction {
  Measure sigma;
  Real f_lo, f_hi;  // minimal interval containing supp sigma

  static MarkovFunction fromMeasure(Measure sigma, mpfr_prec_t bits);
};

// f(z) = prod (z - a_k)^{alpha_k}, sum alpha_k = 0, normalized by f(inf) = 1.
struct AlgebraicFunction {
  std::vector<Cplx> branch_points;
  std::vector<Real> exponents;

  void validate(const PrecisionContext& ctx) const;
  // Single-valued evaluation outside a disk containing all branch points,
  // via the convergent product of principal branches (1 - a_k/z)^{alpha_k}.
  Cplx evalOutside(const Cplx& z) const;
};

struct SeriesAtInfinity {
  enum class Source { Markov, Algebraic, Explicit };
  std::vector<Cplx> coeff;  // f_0, f_1, ... : f(z) = sum f_k z^-k
  Source source = Source::Explicit;

  Cplx evalTruncated(const Cplx& z) const;
};

// Int dsigma(t)/(t-z), adaptive quadrature, relative tol_eq.
Cplx markovEval(const MarkovFunction& f, const Cplx& z, const PrecisionContext& ctx);

SeriesAtInfinity seriesAtInfinity(const MarkovFunction& f, int m, const PrecisionContext& ctx);
SeriesAtInfinity seriesAtInfinity(const AlgebraicFunction& f, int m, const PrecisionContext& ctx);

// Multiplicative monodromy factor of f along the circle |z - center| = radius,
// by transporting log f with the exact logarithmic derivative. For a loop
// enclosing exactly one branch point a_k this is e^{2 pi i alpha_k}.
Cplx monodromyFactor(const AlgebraicFunction& f, const Cplx& center, const Real& radius,
                     const PrecisionContext& ctx);

// Structured-text (JSON) round trip of function descriptions.
std::string toJson(const MarkovFunction& f);
std::string toJson(const AlgebraicFunction& f);
MarkovFunction markovFromJson(const std::string& text);
AlgebraicFunction algebraicFromJson(const std::string& text);

}  // namespace ratlab
