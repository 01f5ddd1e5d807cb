#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ratlab/cheb.hpp"
#include "ratlab/poly.hpp"
#include "ratlab/quad.hpp"

namespace ratlab {

// Endpoint factor of a WeightPiece density.
enum class EndPower { One, InvSqrt, Sqrt };

// density h(x~)/(pi s sqrt(1-x~^2)) dx on [a,b], h in Chebyshev coefficients.
// Mass equals coeff[0]; potentials and Cauchy transforms are closed-form.
struct ChebPiece {
  Real a, b;
  std::vector<Real> coeff;

  Real mid() const { return (a + b) / Real(2l); }
  Real half() const { return (b - a) / Real(2l); }
  Real mass() const { return coeff.empty() ? Real(0l) : coeff[0]; }
  Real density(const Real& x) const;  // dpiece/dx
};

// density g(x) (x-a)^pa (b-x)^pb dx with polynomial g; quadrature-backed.
struct WeightPiece {
  Real a, b;
  Poly g;
  EndPower pa = EndPower::One, pb = EndPower::One;

  Real weight(const Real& x) const;
  Real mass(mpfr_prec_t bits) const;
};

struct Atom {
  Cplx z;
  Real w;
  bool at_infinity = false;  // unit charge at infinity (Green sources)
};

// Plane arc carried by a quadrature rule (nodes+weights, weights contain the
// density) plus a dense polyline for projection and parametrization.
struct ArcPiece {
  std::vector<Cplx> nodes;
  std::vector<Real> weights;
  std::vector<Cplx> polyline;
  std::vector<Real> polyline_param;  // cumulative measure along polyline, in [0, mass]
  Real mass() const {
    Real s(0l);
    for (const auto& w : weights) s += w;
    return s;
  }
};

class Measure {
 public:
  std::vector<Atom> atoms;
  std::vector<ChebPiece> cheb;
  std::vector<WeightPiece> weights;
  std::vector<ArcPiece> arcs;

  static Measure pointMass(const Cplx& z, const Real& w = Real(1l));
  static Measure lebesgue(const Real& a, const Real& b);                 // density 1
  static Measure arcsine(const Real& a, const Real& b);                  // Robin of [a,b]
  // (1/pi) sqrt(-t) dt on [lo, 0] style pieces and friends.
  static Measure weightPiece(const Real& a, const Real& b, Poly g, EndPower pa, EndPower pb);

  bool empty() const;
  bool hasInfiniteAtom() const;
  Real mass(mpfr_prec_t bits) const;

  // Quadrature of f against this measure (finite part; throws on infinite atom).
  Real integrate(const RealFn& f, mpfr_prec_t bits, int resolution = 64) const;
  Cplx integrate(const CplxFn1& f, mpfr_prec_t bits, int resolution = 64) const;

  // Discrete quadrature rule equivalent to `integrate` for measures living on
  // the real axis; exact for atoms, spectral for the continuous pieces.
  struct Rule {
    std::vector<Real> x;
    std::vector<Real> w;
  };
  Rule realQuadrature(mpfr_prec_t bits, int resolution = 64) const;

  // -Int log|z-t| dmu(t). Log singularities on supports are handled by dyadic
  // grading; atoms at z itself signal +inf via Error.
  Real logPotential(const Cplx& z, mpfr_prec_t bits) const;

  // Int dmu(t)/(z-t), z off the support.
  Cplx cauchy(const Cplx& z, mpfr_prec_t bits) const;

  Cplx moment(int k, mpfr_prec_t bits) const;  // Int t^k dmu

  // Scale all densities/weights by f.
  Measure scaled(const Real& f) const;

  // Hull of the real support [min, max]; throws when support is not real.
  std::pair<Real, Real> realHull() const;
  // As above, but nullopt when any component lies off the real axis.
  std::optional<std::pair<Real, Real>> realHullIfReal() const;
};

}  // namespace ratlab
