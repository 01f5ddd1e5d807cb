#include "ratlab/minimax.hpp"

#include <algorithm>

namespace ratlab {

namespace {

struct Bary {
  std::vector<Real> x, fx, w;

  Cplx evalC(const Cplx& u) const {
    Cplx num(0l), den(0l);
    for (size_t i = 0; i < x.size(); ++i) {
      Cplx d = u - Cplx(x[i]);
      if (abs(d).isZero()) return Cplx(fx[i]);
      Cplx c = Cplx(w[i]) / d;
      num += c * fx[i];
      den += c;
    }
    return num / den;
  }
  Real eval(const Real& u) const { return evalC(Cplx(u)).re; }
};

// Barycentric weights making the interpolant type (m,m): w is the null vector
// of the 2m x (2m+1) system spanning polynomial degree-reduction conditions.
bool interpolantWeights(Bary& b, int m, const Real& lo, const Real& hi,
                        const PrecisionContext& ctx, Real* rank_gap) {
  int K = 2 * m + 1;
  Real mid = (lo + hi) / Real(2l), half = (hi - lo) / Real(2l);
  MatR M(2 * m, K);
  for (int i = 0; i < K; ++i) {
    Real t = (b.x[i] - mid) / half;
    Real t0(1l), t1 = t;
    for (int j = 0; j < m; ++j) {
      Real tj = j == 0 ? t0 : t1;
      M(j, i) = tj;
      M(m + j, i) = tj * b.fx[i];
      if (j >= 1) {
        Real t2 = (t + t) * t1 - t0;
        t0 = t1;
        t1 = t2;
      }
    }
  }
  VecR v = nullVectorOfWide(M, ctx);
  if (rank_gap) *rank_gap = Real(0l);
  b.w.assign(v.begin(), v.end());
  return true;
}

// Denominator sign check: S(u) = sum w_i/(u - x_i) must not vanish on [lo,hi].
bool polesClear(const Bary& b, const Real& lo, const Real& hi) {
  auto S = [&](const Real& u) {
    Real s(0l);
    for (size_t i = 0; i < b.x.size(); ++i) s += b.w[i] / (u - b.x[i]);
    return s;
  };
  int last_sign = 0;
  auto probe = [&](const Real& u) {
    int sg = S(u).sign();
    if (sg == 0) return false;
    if (last_sign != 0 && sg != last_sign) return false;
    // sign of D = l(u) S(u): l alternates between nodes, so S must alternate
    // in the same pattern; equivalently w_i must alternate. Track S relative
    // to the node parity instead of absolute sign.
    return true;
  };
  (void)probe;
  (void)last_sign;
  // Classical equivalent: barycentric weights alternate in sign.
  for (size_t i = 1; i < b.w.size(); ++i)
    if ((b.w[i] * b.w[i - 1]).sign() >= 0) return false;
  // And the denominator keeps one sign off the node hull boundary intervals.
  Real eps = (hi - lo) * Real(1e-9);
  if (b.x.front() - lo > eps) {
    Real s1 = S(lo), s2 = S(b.x.front() - eps);
    if ((s1 * s2).sign() < 0) return false;
  }
  if (hi - b.x.back() > eps) {
    Real s1 = S(b.x.back() + eps), s2 = S(hi);
    if ((s1 * s2).sign() < 0) return false;
  }
  return true;
}

struct Extremum {
  Real pos;
  Real val;  // signed error f - r
};

// Max of |f - r| on [a, b] by coarse scan plus golden refinement.
Extremum intervalMax(const RealFn& f, const Bary& b, const Real& a, const Real& bb, int scan,
                     mpfr_prec_t bits) {
  auto err = [&](const Real& u) { return f(u) - b.eval(u); };
  Real best_pos = a, best_val = err(a);
  Real best_abs = abs(best_val);
  for (int i = 1; i <= scan; ++i) {
    Real u = a + (bb - a) * Real(i) / Real(scan);
    Real e = err(u);
    if (abs(e) > best_abs) {
      best_abs = abs(e);
      best_val = e;
      best_pos = u;
    }
  }
  // golden refinement around best_pos
  Real step = (bb - a) / Real(scan);
  Real L = max(a, best_pos - step), R = min(bb, best_pos + step);
  Real gr(0.6180339887498949);
  Real c = R - (R - L) * gr, d = L + (R - L) * gr;
  Real fc = abs(err(c)), fd = abs(err(d));
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      L = c;
      c = d;
      fc = fd;
      d = L + (R - L) * gr;
      fd = abs(err(d));
    } else {
      R = d;
      d = c;
      fd = fc;
      c = R - (R - L) * gr;
      fc = abs(err(c));
    }
    if (R - L < step * Real(1e-12)) break;
  }
  Real pos = (L + R) / Real(2l);
  Extremum ex{pos, err(pos)};
  if (abs(ex.val) < best_abs) ex = Extremum{best_pos, best_val};
  (void)bits;
  return ex;
}

struct CoreResult {
  Bary b;
  std::vector<Extremum> alt;  // 2m+2 signed extrema
  Real error, lower;
  bool certified = false;
  bool degenerate = false;
  int iterations = 0;
};

// Interpolation-node equilibration: shrink the subintervals whose error is
// large, renormalize, repeat until the local maxima equalize.
CoreResult remezCore(const RealFn& f, const Real& lo, const Real& hi, int m,
                     const PrecisionContext& ctx, const MinimaxOpts& opts) {
  PrecisionScope scope(ctx.bits);
  int K = 2 * m + 1;
  CoreResult out;
  Bary& b = out.b;
  if (static_cast<int>(opts.initial_nodes.size()) == K) {
    b.x = opts.initial_nodes;
    std::sort(b.x.begin(), b.x.end());
  } else {
    auto ref = chebPoints(K);
    for (int i = 0; i < K; ++i)
      b.x.push_back((lo + hi) / Real(2l) + (hi - lo) / Real(2l) * ref[i]);
  }

  Real gamma(opts.gamma);
  Real best_dev(1e30);
  Bary best_b;
  std::vector<Extremum> best_ext;
  int stall = 0;

  for (int it = 0; it < opts.max_iter; ++it) {
    out.iterations = it + 1;
    b.fx.clear();
    for (const auto& x : b.x) b.fx.push_back(f(x));
    Real rank_gap;
    if (!interpolantWeights(b, m, lo, hi, ctx, &rank_gap))
      throw Error(ErrorClass::Degenerate, "minimax: complex null vector in the weight system");
    if (!polesClear(b, lo, hi)) {
      // A pole slipped between nodes: pull nodes toward the previous good set.
      if (best_b.x.empty())
        throw Error(ErrorClass::Convergence, "minimax: poles on the first iterate");
      for (int i = 0; i < K; ++i) b.x[i] = (b.x[i] + best_b.x[i]) / Real(2l);
      continue;
    }

    // Local extrema on the K+1 subintervals cut by the nodes.
    std::vector<Extremum> ext;
    std::vector<Real> bounds;
    bounds.push_back(lo);
    for (const auto& x : b.x) bounds.push_back(x);
    bounds.push_back(hi);
    Real emax(0l), emin(1e30);
    for (int i = 0; i + 1 < static_cast<int>(bounds.size()); ++i) {
      Extremum ex = intervalMax(f, b, bounds[i], bounds[i + 1], 8, ctx.bits);
      ext.push_back(ex);
      emax = max(emax, abs(ex.val));
      emin = min(emin, abs(ex.val));
    }

    // Exact-representation early exit.
    Real fscale(0l);
    for (const auto& v : b.fx) fscale = max(fscale, abs(v));
    if (emax <= max(fscale, Real(1l)) * Real::exp2i(ctx.tol_eq_log2)) {
      out.alt = ext;
      out.error = emax;
      out.lower = Real(0l);
      out.certified = true;
      out.degenerate = true;
      return out;
    }

    Real dev = (emax - emin) / emax;
    bool alternating = true;
    for (size_t i = 1; i < ext.size(); ++i)
      if ((ext[i].val * ext[i - 1].val).sign() >= 0) alternating = false;

    if (dev < best_dev) {
      best_dev = dev;
      best_b = b;
      best_ext = ext;
      stall = 0;
    } else if (++stall > 60) {
      // Deterministic restart schedule: halve the equilibration exponent.
      gamma /= Real(2l);
      stall = 0;
      if (gamma < Real(0.05)) break;
    }

    if (alternating && dev.toDouble() <= opts.cert_tol) {
      out.alt = ext;
      out.error = emax;
      out.lower = emin;
      out.certified = true;
      return out;
    }

    // Interval rescaling: geometric-mean normalization.
    Real gmean_log(0l);
    for (const auto& ex : ext) gmean_log += log(max(abs(ex.val), emax * Real(1e-30)));
    gmean_log /= Real(static_cast<long>(ext.size()));
    std::vector<Real> len;
    Real total(0l);
    for (size_t i = 0; i + 1 < bounds.size(); ++i) {
      Real l = bounds[i + 1] - bounds[i];
      Real f2 = exp(gamma * (gmean_log - log(max(abs(ext[i].val), emax * Real(1e-30)))));
      f2 = max(Real(0.25), min(Real(4l), f2));
      l *= f2;
      len.push_back(l);
      total += l;
    }
    Real acc = lo;
    for (int i = 0; i < K; ++i) {
      acc += len[i] * (hi - lo) / total;
      b.x[i] = acc;
    }
  }

  // Best effort: return the best iterate, flagged uncertified.
  if (best_b.x.empty())
    throw Error(ErrorClass::Convergence, "minimax: no usable iterate");
  out.b = best_b;
  out.b.fx.clear();
  for (const auto& x : out.b.x) out.b.fx.push_back(f(x));
  Real rank_gap;
  interpolantWeights(out.b, m, lo, hi, ctx, &rank_gap);
  out.alt = best_ext;
  Real emax(0l), emin(1e30);
  for (const auto& ex : best_ext) {
    emax = max(emax, abs(ex.val));
    emin = min(emin, abs(ex.val));
  }
  out.error = emax;
  out.lower = Real(0l);
  bool alternating = true;
  for (size_t i = 1; i < best_ext.size(); ++i)
    if ((best_ext[i].val * best_ext[i - 1].val).sign() >= 0) alternating = false;
  if (alternating) out.lower = emin;
  out.certified = false;
  return out;
}

// Coefficients of the barycentric numerator/denominator, trimmed to degree m.
std::pair<Poly, Poly> baryToPolys(const Bary& b, int m, const PrecisionContext& ctx) {
  size_t K = b.x.size();
  Poly N, D;
  for (size_t i = 0; i < K; ++i) {
    // l_i(u) = prod_{j != i} (u - x_j)
    Poly li = Poly::constant(Cplx(1l));
    for (size_t j = 0; j < K; ++j)
      if (j != i) li = li * Poly({Cplx(-b.x[j]), Cplx(1l)});
    N = N + li * Cplx(b.w[i] * b.fx[i]);
    D = D + li * Cplx(b.w[i]);
  }
  // Degrees beyond m vanish mathematically; drop the rounding residue.
  auto trim = [&](Poly& p) {
    std::vector<Cplx> c = p.coeffs();
    if (static_cast<long>(c.size()) > m + 1) c.resize(m + 1);
    p = Poly(c);
  };
  trim(N);
  trim(D);
  (void)ctx;
  return {N, D};
}

}  // namespace

MinimaxResult rationalMinimax(const RealFn& f, const Interval& E, int n,
                              const PrecisionContext& ctx, const MinimaxOpts& opts) {
  if (n < 0) throw Error(ErrorClass::Config, "minimax order must be nonnegative");
  PrecisionScope scope(ctx.bits);
  MinimaxResult out;

  if (n == 0 && !opts.mobius_semiaxis && !opts.even_reduction) {
    // Best constant: the range midpoint, located by a dense scan plus golden
    // refinement around the extreme values.
    const int M = 4096;
    Real fmin(0l), fmax(0l), amin, amax;
    for (int i = 0; i <= M; ++i) {
      Real x = E.first + (E.second - E.first) * Real(i) / Real(M);
      Real v = f(x);
      if (i == 0 || v < fmin) {
        fmin = v;
        amin = x;
      }
      if (i == 0 || v > fmax) {
        fmax = v;
        amax = x;
      }
    }
    out.r.P = Poly::constant(Cplx((fmin + fmax) / Real(2l)));
    out.r.Q = Poly::constant(Cplx(1l));
    out.r.order = 0;
    out.error = (fmax - fmin) / Real(2l);
    out.lower_bound = out.error;
    out.certified = true;
    out.alternation = {min(amin, amax), max(amin, amax)};
    return out;
  }

  if (opts.even_reduction) {
    if (n % 2 != 0)
      throw Error(ErrorClass::Config, "even reduction needs an even order");
    if (!( -E.first == E.second))
      throw Error(ErrorClass::Config, "even reduction needs a symmetric interval");
    int m = n / 2;
    Real ulo(0l), uhi = E.second * E.second;
    RealFn g = [&](const Real& u) { return f(sqrt(max(u, Real(0l)))); };
    CoreResult core = remezCore(g, ulo, uhi, m, ctx, opts);
    auto [N, D] = baryToPolys(core.b, m, ctx);
    out.r.P = N.composeSquare();
    out.r.Q = D.composeSquare();
    out.r.order = n;
    out.error = core.error;
    out.lower_bound = core.lower;
    out.certified = core.certified;
    out.degenerate = core.degenerate;
    out.iterations = core.iterations;
    // alternation points map to +-sqrt(u)
    std::vector<Real> alt;
    for (const auto& ex : core.alt) {
      Real xx = sqrt(max(ex.pos, Real(0l)));
      alt.push_back(xx);
      if (!xx.isZero()) alt.push_back(-xx);
    }
    std::sort(alt.begin(), alt.end());
    out.alternation = alt;
    return out;
  }

  if (opts.mobius_semiaxis) {
    // x = (1+t)/(1-t), t in [-1, 1]; the point t = 1 is x = infinity.
    RealFn g = [&](const Real& t) {
      if (t >= Real(1l)) return f(Real::infinity());
      return f((Real(1l) + t) / (Real(1l) - t));
    };
    CoreResult core = remezCore(g, Real(-1l), Real(1l), n, ctx, opts);
    auto [N, D] = baryToPolys(core.b, n, ctx);
    // substitute t = (x-1)/(x+1): p(t) -> (x+1)^n p((x-1)/(x+1))
    auto lift = [&](const Poly& p) {
      Poly acc;
      Poly up({Cplx(-1l), Cplx(1l)});    // x - 1
      Poly down({Cplx(1l), Cplx(1l)});   // x + 1
      for (long k = 0; k <= p.degree(); ++k) {
        Poly term = Poly::constant(p[k]);
        for (long i = 0; i < k; ++i) term = term * up;
        for (long i = k; i < n; ++i) term = term * down;
        acc = acc + term;
      }
      return acc;
    };
    out.r.P = lift(N);
    out.r.Q = lift(D);
    out.r.order = n;
    out.error = core.error;
    out.lower_bound = core.lower;
    out.certified = core.certified;
    out.degenerate = core.degenerate;
    out.iterations = core.iterations;
    for (const auto& ex : core.alt) {
      if (ex.pos >= Real(1l))
        out.alternation.push_back(Real::infinity());
      else
        out.alternation.push_back((Real(1l) + ex.pos) / (Real(1l) - ex.pos));
    }
    std::sort(out.alternation.begin(), out.alternation.end());
    return out;
  }

  CoreResult core = remezCore(f, E.first, E.second, n, ctx, opts);
  auto [N, D] = baryToPolys(core.b, n, ctx);
  out.r.P = N;
  out.r.Q = D;
  out.r.order = n;
  out.error = core.error;
  out.lower_bound = core.lower;
  out.certified = core.certified;
  out.degenerate = core.degenerate;
  out.iterations = core.iterations;
  for (const auto& ex : core.alt) out.alternation.push_back(ex.pos);
  std::sort(out.alternation.begin(), out.alternation.end());
  return out;
}

}  // namespace ratlab
