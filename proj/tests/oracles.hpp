#pragma once

// Test-side oracles, independent of the library's solver paths.

#include <algorithm>

#include "ratlab/real.hpp"

namespace oracles {

using ratlab::Real;

// Complete elliptic integral K(k) by the arithmetic-geometric mean.
inline Real ellipticK(const Real& k) {
  Real a(1l), b = sqrt(Real(1l) - k * k);
  Real stop = Real::exp2i(-static_cast<double>(a.prec()) + 8);
  for (int i = 0; i < 200; ++i) {
    Real an = (a + b) / Real(2l);
    Real bn = sqrt(a * b);
    a = an;
    b = bn;
    if (abs(a - b) < stop) break;
  }
  return Real::pi() / (Real(2l) * a);
}

// Condenser capacity of two disjoint real intervals in the 1/w normalization
// (annulus r<|z|<R has capacity 1/ln(R/r)). A real Moebius map sends the
// plates to [delta,1] and [-1,-delta] preserving the cross ratio
// X = 4 delta/(1+delta)^2; halving the symmetric condenser along the
// imaginary axis reduces it to a Groetzsch ring, so w = pi K(k')/K(k) with
// k = (1-delta)/(1+delta).
inline Real condenserCapacityTwoIntervals(Real e1, Real e2, Real f1, Real f2) {
  if (e2 < e1) std::swap(e1, e2);
  if (f2 < f1) std::swap(f1, f2);
  if (e1 < f1) {  // order so F lies to the left of E
    std::swap(e1, f1);
    std::swap(e2, f2);
  }
  Real X = ((e1 - f2) * (e2 - f1)) / ((e1 - f1) * (e2 - f2));
  // solve 4 delta / (1+delta)^2 = X for delta in (0,1)
  Real disc = sqrt((Real(2l) * X - Real(4l)) * (Real(2l) * X - Real(4l)) - Real(4l) * X * X);
  Real delta = ((Real(4l) - Real(2l) * X) - disc) / (Real(2l) * X);
  Real kk = (Real(1l) - delta) / (Real(1l) + delta);
  Real kp = sqrt(Real(1l) - kk * kk);
  Real w = Real::pi() * ellipticK(kp) / ellipticK(kk);
  return Real(1l) / w;
}

}  // namespace oracles
