#include "ratlab/measure.hpp"

#include <algorithm>

namespace ratlab {

Real ChebPiece::density(const Real& x) const {
  Real t = (x - mid()) / half();
  Real onem = Real(1l) - t * t;
  if (onem.sign() <= 0) return Real(0l);
  return chebEval(coeff, t) / (Real::pi() * half() * sqrt(onem));
}

Real WeightPiece::weight(const Real& x) const {
  Real v = g(x);
  if (pa == EndPower::InvSqrt) v /= sqrt(x - a);
  if (pa == EndPower::Sqrt) v *= sqrt(x - a);
  if (pb == EndPower::InvSqrt) v /= sqrt(b - x);
  if (pb == EndPower::Sqrt) v *= sqrt(b - x);
  return v;
}

Real WeightPiece::mass(mpfr_prec_t bits) const {
  RealFn f = [&](const Real& x) { return weight(x); };
  return integrateGraded(f, a, b, 32, 8, bits);
}

Measure Measure::pointMass(const Cplx& z, const Real& w) {
  Measure m;
  m.atoms.push_back({z, w, false});
  return m;
}

Measure Measure::lebesgue(const Real& a, const Real& b) {
  Measure m;
  m.weights.push_back({a, b, Poly::constant(Cplx(1l)), EndPower::One, EndPower::One});
  return m;
}

Measure Measure::arcsine(const Real& a, const Real& b) {
  Measure m;
  ChebPiece p;
  p.a = a;
  p.b = b;
  p.coeff = {Real(1l)};
  m.cheb.push_back(std::move(p));
  return m;
}

Measure Measure::weightPiece(const Real& a, const Real& b, Poly g, EndPower pa, EndPower pb) {
  Measure m;
  m.weights.push_back({a, b, std::move(g), pa, pb});
  return m;
}

bool Measure::empty() const {
  return atoms.empty() && cheb.empty() && weights.empty() && arcs.empty();
}

bool Measure::hasInfiniteAtom() const {
  for (const auto& a : atoms)
    if (a.at_infinity) return true;
  return false;
}

Real Measure::mass(mpfr_prec_t bits) const {
  Real s(0l);
  for (const auto& a : atoms) s += a.w;
  for (const auto& p : cheb) s += p.mass();
  for (const auto& p : weights) s += p.mass(bits);
  for (const auto& p : arcs) s += p.mass();
  return s;
}

namespace {

// Number of theta nodes for spectral quadrature against a ChebPiece.
int chebResolution(const ChebPiece& p, int resolution) {
  return std::max<int>(resolution, static_cast<int>(p.coeff.size()) * 2);
}

template <class V, class F>
V integrateImpl(const Measure& m, const F& f, mpfr_prec_t bits, int resolution) {
  if (m.hasInfiniteAtom())
    throw Error(ErrorClass::Domain, "integrate against measure with charge at infinity");
  V acc(0l);
  for (const auto& a : m.atoms) {
    if (!a.z.im.isZero())
      throw Error(ErrorClass::Domain, "integrate: complex atom in real-axis quadrature");
    V v = f(a.z.re);
    v *= a.w;
    acc += v;
  }
  for (const auto& p : m.cheb) {
    // x = mid + half cos(theta); d(mass) = h(cos theta)/pi dtheta.
    int M = chebResolution(p, resolution);
    const QuadNodes& q = gaussLegendre(std::min(M, 48), bits);
    int panels = (M + 47) / 48;
    Real pi = Real::pi();
    for (int pan = 0; pan < panels; ++pan) {
      Real t0 = pi * Real(pan) / Real(panels), t1 = pi * Real(pan + 1) / Real(panels);
      Real mid = (t0 + t1) / Real(2l), half = (t1 - t0) / Real(2l);
      for (size_t i = 0; i < q.x.size(); ++i) {
        Real theta = mid + half * q.x[i];
        Real ct = cos(theta);
        V v = f(p.mid() + p.half() * ct);
        v *= q.w[i] * half * chebEval(p.coeff, ct) / pi;
        acc += v;
      }
    }
  }
  for (const auto& p : m.weights) {
    auto g = [&](const Real& x) {
      V v = f(x);
      v *= p.weight(x);
      return v;
    };
    int panels = std::max(4, resolution / 8);
    if constexpr (std::is_same_v<V, Real>) {
      acc += integrateGraded(RealFn(g), p.a, p.b, 32, panels, bits);
    } else {
      acc += integrateGraded(CplxFn1(g), p.a, p.b, 32, panels, bits);
    }
  }
  for (const auto& p : m.arcs) {
    for (size_t i = 0; i < p.nodes.size(); ++i) {
      if (!p.nodes[i].im.isZero())
        throw Error(ErrorClass::Domain, "integrate: plane arc in real-axis quadrature");
      V v = f(p.nodes[i].re);
      v *= p.weights[i];
      acc += v;
    }
  }
  return acc;
}

}  // namespace

Real Measure::integrate(const RealFn& f, mpfr_prec_t bits, int resolution) const {
  return integrateImpl<Real>(*this, f, bits, resolution);
}

Measure::Rule Measure::realQuadrature(mpfr_prec_t bits, int resolution) const {
  Rule rule;
  for (const auto& a : atoms) {
    if (a.at_infinity || !a.z.im.isZero())
      throw Error(ErrorClass::Domain, "realQuadrature: measure is not on the real axis");
    rule.x.push_back(a.z.re);
    rule.w.push_back(a.w);
  }
  for (const auto& p : cheb) {
    int M = chebResolution(p, resolution);
    const QuadNodes& q = gaussLegendre(std::min(M, 48), bits);
    int panels = (M + 47) / 48;
    Real pi = Real::pi();
    for (int pan = 0; pan < panels; ++pan) {
      Real t0 = pi * Real(pan) / Real(panels), t1 = pi * Real(pan + 1) / Real(panels);
      Real mid = (t0 + t1) / Real(2l), half = (t1 - t0) / Real(2l);
      for (size_t i = 0; i < q.x.size(); ++i) {
        Real theta = mid + half * q.x[i];
        Real ct = cos(theta);
        rule.x.push_back(p.mid() + p.half() * ct);
        rule.w.push_back(q.w[i] * half * chebEval(p.coeff, ct) / pi);
      }
    }
  }
  for (const auto& p : weights) {
    int panels = std::max(4, resolution / 8);
    GradedGrid g = gradedGrid(p.a, p.b, 32, panels, bits);
    for (size_t i = 0; i < g.x.size(); ++i) {
      rule.x.push_back(g.x[i]);
      rule.w.push_back(g.w[i] * p.weight(g.x[i]));
    }
  }
  for (const auto& p : arcs) {
    for (size_t i = 0; i < p.nodes.size(); ++i) {
      if (!p.nodes[i].im.isZero())
        throw Error(ErrorClass::Domain, "realQuadrature: plane arc present");
      rule.x.push_back(p.nodes[i].re);
      rule.w.push_back(p.weights[i]);
    }
  }
  return rule;
}
Cplx Measure::integrate(const CplxFn1& f, mpfr_prec_t bits, int resolution) const {
  return integrateImpl<Cplx>(*this, f, bits, resolution);
}

Real Measure::logPotential(const Cplx& z, mpfr_prec_t bits) const {
  if (hasInfiniteAtom())
    throw Error(ErrorClass::Domain, "logPotential of measure with charge at infinity");
  Real acc(0l);
  for (const auto& a : atoms) {
    Real d = abs(z - a.z);
    if (d.isZero()) throw Error(ErrorClass::Domain, "logPotential at an atom is infinite");
    acc -= a.w * log(d);
  }
  for (const auto& p : cheb) {
    Cplx zeta = (z - Cplx(p.mid())) / Cplx(p.half());
    Real u = chebLogPotential(0, zeta) - log(p.half());
    acc += p.coeff.empty() ? Real(0l) : p.coeff[0] * u;
    for (size_t k = 1; k < p.coeff.size(); ++k)
      acc += p.coeff[k] * chebLogPotential(static_cast<int>(k), zeta);
  }
  for (const auto& p : weights) {
    bool on_axis = z.im.isZero() && z.re > p.a && z.re < p.b;
    if (!on_axis) {
      CplxFn1 f = [&](const Real& x) {
        return Cplx(-p.weight(x) * log(abs(z - Cplx(x))), Real(0l));
      };
      acc += integrateGraded(f, p.a, p.b, 32, 12, bits).re;
    } else {
      // Split at the singular point; on each side pull back with the cubic
      // smoothstep anchored at x0 (outer endpoint factors are absorbed) and
      // grade dyadically toward the log singularity in the pulled-back
      // variable, where every panel is analytic.
      Real x0 = z.re;
      auto side = [&](const Real& outer) {
        Real len = outer - x0;
        RealFn in_u = [&](const Real& u) {
          Real s = u * u * (Real(3l) - Real(2l) * u);
          Real x = x0 + len * s;
          Real jac = Real(6l) * len * u * (Real(1l) - u);
          return -p.weight(x) * log(abs(x - x0)) * abs(jac);
        };
        int levels = static_cast<int>(bits / 2) + 16;
        return integrateDyadicTowards(in_u, Real(0l), Real(1l), 24, levels, bits);
      };
      acc += side(p.b) + side(p.a);
    }
  }
  for (const auto& p : arcs) {
    for (size_t i = 0; i < p.nodes.size(); ++i) {
      Real d = abs(z - p.nodes[i]);
      if (d.isZero()) throw Error(ErrorClass::Domain, "logPotential at an arc node");
      acc -= p.weights[i] * log(d);
    }
  }
  return acc;
}

Cplx Measure::cauchy(const Cplx& z, mpfr_prec_t bits) const {
  if (hasInfiniteAtom())
    throw Error(ErrorClass::Domain, "cauchy transform of measure with charge at infinity");
  Cplx acc(0l);
  for (const auto& a : atoms) acc += Cplx(a.w) / (z - a.z);
  for (const auto& p : cheb) {
    Cplx zeta = (z - Cplx(p.mid())) / Cplx(p.half());
    for (size_t k = 0; k < p.coeff.size(); ++k)
      acc += Cplx(p.coeff[k]) * chebCauchy(static_cast<int>(k), zeta) / Cplx(p.half());
  }
  for (const auto& p : weights) {
    if (p.pa == EndPower::One && p.pb == EndPower::One) {
      // Exact: Int g(t)/(z-t) dt = g(z) ln((z-a)/(z-b)) - Int (g(t)-g(z))/(t-z) dt,
      // and the second integrand is the synthetic-division quotient polynomial.
      Cplx gz = p.g(z);
      Cplx L = log((z - Cplx(p.a)) / (z - Cplx(p.b)));
      const auto& gc = p.g.coeffs();
      Cplx tail(0l);
      if (gc.size() >= 2) {
        // quotient q of (g(t) - g(z))/(t - z), then its exact integral
        std::vector<Cplx> q(gc.size() - 1, Cplx(0l));
        Cplx carry = gc.back();
        for (size_t i = gc.size() - 1; i-- > 0;) {
          q[i] = carry;
          carry = (i == 0 ? Cplx(0l) : gc[i]) + carry * z;
        }
        Real bp = p.b, ap = p.a;  // running powers b^{k+1}, a^{k+1}
        for (size_t k = 0; k < q.size(); ++k) {
          tail += q[k] * Cplx(bp - ap) / Real(static_cast<long>(k) + 1);
          bp *= p.b;
          ap *= p.a;
        }
      }
      acc += gz * L - tail;
      continue;
    }
    // Pull back with the endpoint-absorbing smoothstep, then refine
    // adaptively; the kernel can be arbitrarily close to the support.
    Real len = p.b - p.a;
    CplxFn1 in_u = [&](const Real& u) {
      Real s = u * u * (Real(3l) - Real(2l) * u);
      Real x = p.a + len * s;
      Real jac = Real(6l) * len * u * (Real(1l) - u);
      return Cplx(p.weight(x) * jac) / (z - Cplx(x));
    };
    Real rel = Real::exp2i(-static_cast<double>(bits) + 16);
    acc += integrateAdaptive(in_u, Real(0l), Real(1l), rel, bits, 48);
  }
  for (const auto& p : arcs)
    for (size_t i = 0; i < p.nodes.size(); ++i) acc += Cplx(p.weights[i]) / (z - p.nodes[i]);
  return acc;
}

Cplx Measure::moment(int k, mpfr_prec_t bits) const {
  Cplx acc(0l);
  for (const auto& a : atoms) {
    if (a.at_infinity) throw Error(ErrorClass::Domain, "moment of charge at infinity");
    acc += pow(a.z, Real(static_cast<long>(k))) * a.w;
  }
  Measure finite_parts;
  finite_parts.cheb = cheb;
  finite_parts.weights = weights;
  if (!finite_parts.empty()) {
    RealFn f = [&](const Real& x) { return pow(x, static_cast<long>(k)); };
    acc += Cplx(finite_parts.integrate(f, bits, 64 + 2 * k));
  }
  for (const auto& p : arcs)
    for (size_t i = 0; i < p.nodes.size(); ++i)
      acc += pow(p.nodes[i], Real(static_cast<long>(k))) * p.weights[i];
  return acc;
}

Measure Measure::scaled(const Real& f) const {
  Measure m = *this;
  for (auto& a : m.atoms) a.w *= f;
  for (auto& p : m.cheb)
    for (auto& c : p.coeff) c *= f;
  for (auto& p : m.weights) p.g = p.g * Cplx(f);
  for (auto& p : m.arcs)
    for (auto& w : p.weights) w *= f;
  return m;
}

std::optional<std::pair<Real, Real>> Measure::realHullIfReal() const {
  for (const auto& a : atoms)
    if (a.at_infinity || !a.z.im.isZero()) return std::nullopt;
  if (!arcs.empty()) return std::nullopt;
  return realHull();
}

std::pair<Real, Real> Measure::realHull() const {
  bool any = false;
  Real lo(0l), hi(0l);
  auto fold = [&](const Real& a, const Real& b) {
    if (!any) {
      lo = a;
      hi = b;
      any = true;
    } else {
      lo = min(lo, a);
      hi = max(hi, b);
    }
  };
  for (const auto& a : atoms) {
    if (a.at_infinity || !a.z.im.isZero())
      throw Error(ErrorClass::Domain, "realHull: measure is not on the real axis");
    fold(a.z.re, a.z.re);
  }
  for (const auto& p : cheb) fold(p.a, p.b);
  for (const auto& p : weights) fold(p.a, p.b);
  if (!arcs.empty()) throw Error(ErrorClass::Domain, "realHull: plane arcs present");
  if (!any) throw Error(ErrorClass::Domain, "realHull of empty measure");
  return {lo, hi};
}

}  // namespace ratlab
