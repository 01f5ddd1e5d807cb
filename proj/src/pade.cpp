#include "ratlab/pade.hpp"

#include <algorithm>

namespace ratlab {

InterpolationScheme InterpolationScheme::explicitTable(std::pair<Real, Real> E,
                                                       std::vector<Real> nodes) {
  if (nodes.size() % 2 != 0)
    throw Error(ErrorClass::Config, "interpolation table must hold 2n nodes");
  for (const auto& x : nodes)
    if (x < E.first || x > E.second)
      throw Error(ErrorClass::Domain, "interpolation node outside E");
  InterpolationScheme s;
  s.E = std::move(E);
  s.nodes = std::move(nodes);
  std::sort(s.nodes.begin(), s.nodes.end());
  return s;
}

InterpolationScheme InterpolationScheme::fromLimitMeasure(const ChebPiece& mu, int n,
                                                          mpfr_prec_t bits) {
  Real mass = mu.mass();
  InterpolationScheme s;
  s.E = {mu.a, mu.b};
  for (int k = 1; k <= 2 * n; ++k) {
    Real q = mass * Real(2 * k - 1) / Real(4 * n);
    Real t = chebDensityQuantile(mu.coeff, q, bits);
    s.nodes.push_back(mu.mid() + mu.half() * t);
  }
  return s;
}

Cplx InterpolationScheme::evalW(const Cplx& z) const {
  Cplx acc(1l);
  for (const auto& x : nodes) acc *= (z - Cplx(x));
  return acc;
}

Poly InterpolationScheme::polyW() const {
  std::vector<Cplx> roots;
  for (const auto& x : nodes) roots.emplace_back(x);
  return Poly::fromRoots(roots);
}

Poly chebCombinationToPoly(const std::vector<Cplx>& c, const Real& a, const Real& b) {
  // T_k on [a,b]: recurrence in monomial coefficients of the mapped variable,
  // then affine composition.
  Poly acc;
  Poly t0 = Poly::constant(Cplx(1l));
  Poly t1 = Poly::x();
  for (size_t k = 0; k < c.size(); ++k) {
    const Poly& tk = (k == 0) ? t0 : t1;
    acc = acc + tk * c[k];
    if (k >= 1) {
      Poly t2 = Poly::x() * t1 * Cplx(2l) - t0;
      t0 = t1;
      t1 = t2;
    }
  }
  Real mid = (a + b) / Real(2l), half = (b - a) / Real(2l);
  // substitute x_ref = (x - mid)/half
  return acc.composeAffine(Cplx(Real(1l) / half), Cplx(-mid / half));
}

namespace {

// Null vector of the (n x n+1) orthogonality system in a Chebyshev test/trial
// basis evaluated on a fixed quadrature rule. weight_at holds w(x_q) for the
// full weight (everything except dsigma's own density).
struct OrthoSystem {
  VecC q_cheb;   // solution, Chebyshev coefficients, length n+1
  Real rank_gap; // sigma_min / sigma_max
  std::vector<Real> residuals;
};

OrthoSystem orthoNullspace(const Measure::Rule& rule, const std::vector<Real>& weight_at, int n,
                           const Real& mid, const Real& half, const PrecisionContext& ctx) {
  size_t R = rule.x.size();
  // Chebyshev values T_0..T_n at mapped nodes.
  std::vector<std::vector<Real>> T(R);
  for (size_t q = 0; q < R; ++q) {
    Real t = (rule.x[q] - mid) / half;
    T[q].resize(n + 1, Real(0l));
    T[q][0] = Real(1l);
    if (n >= 1) T[q][1] = t;
    for (int k = 2; k <= n; ++k) T[q][k] = (t + t) * T[q][k - 1] - T[q][k - 2];
  }
  std::vector<Real> wq(R, Real(0l));
  for (size_t q = 0; q < R; ++q) mulInto(wq[q], rule.w[q], weight_at[q]);
  MatR M(n, n + 1);
  Real prod(0l);
  for (int j = 0; j < n; ++j)
    for (int k = j; k <= n; ++k) {  // Gram symmetry within the shared band
      Real s(0l);
      for (size_t q = 0; q < R; ++q) {
        mulInto(prod, T[q][j], T[q][k]);
        fmadd(s, wq[q], prod);
      }
      M(j, k) = s;
      if (k < n && k != j) M(k, j) = s;
    }
  Real smin, smax;
  VecR v = smallestSingularDirection(M, ctx, &smin, &smax);
  OrthoSystem out;
  out.q_cheb.assign(v.begin(), v.end());
  out.rank_gap = smax.isZero() ? Real(0l) : smin / smax;
  // residual vector M q
  for (int j = 0; j < n; ++j) {
    Real s(0l);
    for (int k = 0; k <= n; ++k) s += M(j, k) * v[k];
    out.residuals.push_back(abs(s));
  }
  return out;
}

void cancelCommonRoots(RationalFn& r, const PrecisionContext& ctx) {
  if (r.P.degree() < 1 || r.Q.degree() < 1) return;
  auto rp = polyRoots(r.P, ctx);
  auto rq = polyRoots(r.Q, ctx);
  Real tol = Real(10l) * Real::exp2i(ctx.tol_eq_log2);
  std::vector<Cplx> common;
  for (const auto& a : rootsFlat(rp))
    for (const auto& b : rootsFlat(rq)) {
      if (abs(a - b) <= tol * max(Real(1l), abs(a))) {
        common.push_back((a + b) * Real(0.5));
        break;
      }
    }
  if (common.empty()) return;
  auto deflate = [](const Poly& p, const Cplx& root) {
    // synthetic division, remainder dropped
    const auto& c = p.coeffs();
    std::vector<Cplx> out(c.size() - 1, Cplx(0l));
    Cplx carry = c.back();
    for (size_t i = c.size() - 1; i-- > 0;) {
      out[i] = carry;
      carry = c[i] + carry * root;
    }
    return Poly(out);
  };
  for (const auto& z : common) {
    r.P = deflate(r.P, z);
    r.Q = deflate(r.Q, z);
    r.cancelled.push_back(z);
  }
}

}  // namespace

RationalFn diagonalPade(const SeriesAtInfinity& s, int n, const PrecisionContext& ctx,
                        const PadeOpts& opts) {
  if (static_cast<int>(s.coeff.size()) < 2 * n + 1)
    throw Error(ErrorClass::Config, "diagonalPade needs at least 2n+1 series coefficients");
  PrecisionScope scope(ctx.bits + 64);

  // Conditions: sum_i q_i f_{i+m} = 0, m = 1..n (coefficients of z^-m in Qf-P).
  MatC M(n, n + 1);
  for (int m = 1; m <= n; ++m)
    for (int i = 0; i <= n; ++i) M(m - 1, i) = s.coeff[i + m];
  Real smin, smax;
  VecC q = smallestSingularDirection(M, ctx, &smin, &smax);

  RationalFn r;
  r.order = n;
  r.rank_gap = smax.isZero() ? Real(0l) : smin / smax;

  Real qmax(0l);
  for (const auto& c : q) qmax = max(qmax, abs(c));
  Real tol = Real::exp2i(ctx.tol_eq_log2);
  if (abs(q[n]) <= tol * qmax) {
    // Pade table degeneracy: keep the unit-norm solution, flag it.
    r.degenerate = true;
  } else {
    for (auto& c : q) c /= q[n];  // monic
  }
  r.Q = Poly(std::vector<Cplx>(q.begin(), q.end()));

  // Polynomial part of Q f.
  std::vector<Cplx> p(n + 1, Cplx(0l));
  for (int k = 0; k <= n; ++k) {
    Cplx acc(0l);
    for (int i = k; i <= n; ++i) acc += q[i] * s.coeff[i - k];
    p[k] = acc;
  }
  r.P = Poly(std::move(p));

  // Residual diagnostics: remaining z^-m coefficients, normalized.
  Real fmax(0l);
  for (int i = 0; i <= 2 * n; ++i) fmax = max(fmax, abs(s.coeff[i]));
  Real qnorm = vecNorm(q);
  for (int m = 1; m <= n; ++m) {
    Cplx acc(0l);
    for (int i = 0; i <= n; ++i) acc += q[i] * s.coeff[i + m];
    r.residuals.push_back(abs(acc) / (fmax * qnorm));
  }
  if (opts.cancel_common_roots) cancelCommonRoots(r, ctx);
  return r;
}

RationalFn multipointPade(const MarkovFunction& f, const InterpolationScheme& scheme, int n,
                          const PrecisionContext& ctx, const PadeOpts& opts) {
  // 2n nodes give the r(inf) = 0 normalization (deg P <= n-1); 2n+1 nodes the
  // full type-(n,n) interpolant (deg P <= n).
  bool odd_table = static_cast<int>(scheme.nodes.size()) == 2 * n + 1;
  if (!odd_table && static_cast<int>(scheme.nodes.size()) != 2 * n)
    throw Error(ErrorClass::Config, "scheme must provide 2n or 2n+1 nodes");
  Real tol = Real::exp2i(ctx.tol_eq_log2);
  for (const auto& x : scheme.nodes)
    if (x >= f.f_lo - tol && x <= f.f_hi + tol)
      throw Error(ErrorClass::Domain, "interpolation node meets the support of sigma");
  PrecisionScope scope(ctx.bits + 64);

  // The moment integrands carry polynomial degree up to 2n on top of the
  // 1/W_n factor; the rule must scale with the degree.
  int res = std::max(opts.sigma_resolution, 10 * n);
  Measure::Rule rule = f.sigma.realQuadrature(ctx.bits + 64, res);
  size_t R = rule.x.size();

  // 1/W_n at the quadrature nodes; the nodes are off F so W has fixed sign.
  std::vector<Real> invW(R, Real(0l));
  std::vector<Real> Wval(R, Real(0l));
  for (size_t q = 0; q < R; ++q) {
    Cplx w = scheme.evalW(Cplx(rule.x[q]));
    Wval[q] = w.re;
    if (w.re.isZero())
      throw Error(ErrorClass::Domain, "interpolation node lies on the support of sigma");
    invW[q] = Real(1l) / w.re;
  }

  Real lo = f.f_lo, hi = f.f_hi;
  if (hi - lo < Real(1e-3)) {  // degenerate hull (atomic sigma)
    Real c = (lo + hi) / Real(2l);
    lo = c - Real(1l);
    hi = c + Real(1l);
  }
  Real mid = (lo + hi) / Real(2l), half = (hi - lo) / Real(2l);
  OrthoSystem sys = orthoNullspace(rule, invW, n, mid, half, ctx);

  RationalFn r;
  r.order = n;
  r.rank_gap = sys.rank_gap;
  r.residuals = sys.residuals;
  Poly Q = chebCombinationToPoly(sys.q_cheb, lo, hi);
  if (Q.degree() < n) {
    r.degenerate = true;
    if (Q.isZero()) throw Error(ErrorClass::Precision, "orthogonal polynomial collapsed");
  }
  Q = Q.monic();
  r.Q = Q;

  // P from the kernel formula: P(z) = Int [Q(z)W(t) - Q(t)W(z)]/(W(t)(t-z)) dsigma(t);
  // orthogonality makes deg P <= n-1, so n samples on E determine it.
  std::vector<Real> Qt(R, Real(0l));
  for (size_t q = 0; q < R; ++q) Qt[q] = Q(rule.x[q]);
  auto evalP = [&](const Real& z) {
    Real Qz = Q(z);
    Cplx Wz = scheme.evalW(Cplx(z));
    Real acc(0l);
    for (size_t q = 0; q < R; ++q)
      acc += rule.w[q] * (Qz * Wval[q] - Qt[q] * Wz.re) * invW[q] / (rule.x[q] - z);
    return acc;
  };
  int npts = std::max(odd_table ? n + 1 : n, 1);
  auto ref = chebPoints(npts);
  Real emid = (scheme.E.first + scheme.E.second) / Real(2l);
  Real ehalf = (scheme.E.second - scheme.E.first) / Real(2l);
  std::vector<Real> vals;
  for (int i = 0; i < npts; ++i) vals.push_back(evalP(emid + ehalf * ref[i]));
  auto pc = chebCoeffs(vals);
  std::vector<Cplx> pcc(pc.begin(), pc.end());
  r.P = chebCombinationToPoly(pcc, scheme.E.first, scheme.E.second);

  if (opts.cancel_common_roots && n <= 48) cancelCommonRoots(r, ctx);
  return r;
}

Cplx hermiteRemainder(const MarkovFunction& f, const RationalFn& r,
                      const InterpolationScheme& scheme, const Cplx& z,
                      const PrecisionContext& ctx, int resolution) {
  if (z.im.isZero() && z.re >= f.f_lo && z.re <= f.f_hi)
    throw Error(ErrorClass::Domain, "hermiteRemainder: z on the support");
  PrecisionScope scope(ctx.bits + 64);
  Cplx Qz = r.Q(z);
  if (abs(Qz).isZero()) throw Error(ErrorClass::Domain, "hermiteRemainder: z is a pole");
  Measure::Rule rule = f.sigma.realQuadrature(ctx.bits + 64, resolution);
  Cplx acc(0l);
  for (size_t q = 0; q < rule.x.size(); ++q) {
    Cplx t(rule.x[q]);
    Cplx Qt = r.Q(t);
    Cplx Wt = scheme.evalW(t);
    acc += Cplx(rule.w[q]) * Qt * Qt / (Wt * (t - z));
  }
  return scheme.evalW(z) / (Qz * Qz) * acc;
}

Real orthogonalityResidual(const Poly& Q, const WeightSpec& w, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.bits + 64);
  long d = Q.degree();
  if (d < 1) throw Error(ErrorClass::Config, "orthogonalityResidual needs deg Q >= 1");

  // The normalizer is the first nonvanishing moment at or just past deg Q;
  // symmetric weights (series in z^-m) zero out the j = deg Q moment itself.
  const long extra = 2;
  std::vector<Cplx> moments(static_cast<size_t>(d + extra) + 1, Cplx(0l));
  if (w.kind == WeightSpec::Kind::RealLine) {
    Measure::Rule rule = w.sigma.realQuadrature(ctx.bits + 64, w.resolution);
    for (size_t q = 0; q < rule.x.size(); ++q) {
      const Real& x = rule.x[q];
      Real weight = rule.w[q];
      if (w.phi) weight *= exp(Real(-2l * w.vary_n) * w.phi(x));
      for (const auto& node : w.denom_nodes) weight /= (x - node);
      Cplx qv = Q(Cplx(x));
      Cplx base = qv * weight;
      Cplx xp(1l);
      for (long j = 0; j <= d + extra; ++j) {
        moments[j] += base * xp;
        xp *= Cplx(x);
      }
    }
  } else {
    if (!w.contour_fn) throw Error(ErrorClass::Config, "contour weight needs a function");
    int N = w.contour_points;
    Real two_pi = Real(2l) * Real::pi();
    for (int k = 0; k < N; ++k) {
      Real th = two_pi * Real(k) / Real(N);
      Cplx e(cos(th), sin(th));
      Cplx zz = w.center + Cplx(w.radius) * e;
      Cplx dz = Cplx(Real(0l), w.radius) * e * two_pi / Real(N);
      Cplx base = Q(zz) * w.contour_fn(zz) * dz;
      Cplx xp(1l);
      for (long j = 0; j <= d + extra; ++j) {
        moments[j] += base * xp;
        xp *= zz;
      }
    }
  }
  Real denom(0l);
  for (long j = d; j <= d + extra; ++j) denom = max(denom, abs(moments[j]));
  if (denom.isZero()) throw Error(ErrorClass::Degenerate, "normalizing moments all vanished");
  Real worst(0l);
  for (long j = 0; j < d; ++j) worst = max(worst, abs(moments[j]));
  return worst / denom;
}

Poly varyingWeightOrtho(const Measure& sigma, const RealFn& phi_n, int n,
                        const PrecisionContext& ctx, int resolution,
                        const std::pair<Real, Real>* basis_hint) {
  if (!phi_n) throw Error(ErrorClass::Config, "varyingWeightOrtho needs a field function");
  PrecisionScope scope(ctx.bits + 64);
  int res = resolution > 0 ? resolution : std::max(128, 4 * n);
  Measure::Rule rule = sigma.realQuadrature(ctx.bits + 64, res);

  std::vector<Real> weight(rule.x.size(), Real(0l));
  Real max2nphi(0l);
  for (size_t q = 0; q < rule.x.size(); ++q) {
    Real e = Real(-2l * n) * phi_n(rule.x[q]);
    max2nphi = max(max2nphi, abs(e));
    weight[q] = exp(e);
  }
  if (max2nphi > Real(1e15))
    throw Error(ErrorClass::Precision, "varying weight underflows at this precision");

  auto hull = sigma.realHull();
  Real lo = basis_hint ? basis_hint->first : hull.first;
  Real hi = basis_hint ? basis_hint->second : hull.second;
  Real mid = (lo + hi) / Real(2l), half = (hi - lo) / Real(2l);
  OrthoSystem sys = orthoNullspace(rule, weight, n, mid, half, ctx);
  Poly Q = chebCombinationToPoly(sys.q_cheb, lo, hi);
  if (Q.degree() < n) throw Error(ErrorClass::Precision, "varying-weight system degenerated");
  return Q.monic();
}

}  // namespace ratlab
