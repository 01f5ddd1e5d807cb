#include "ratlab/rates.hpp"

#include <algorithm>

namespace ratlab {

namespace {

struct ScanResult {
  Real sup;
  int signs;
  std::vector<Real> zeros;   // sign-change locations of f - r
  std::vector<Real> maxima;  // |f - r| maxima between consecutive zeros
};

ScanResult scanError(const MarkovFunction& f, const RationalFn& r, const Interval& E, int n,
                     const PrecisionContext& ctx) {
  Real mid = (E.first + E.second) / Real(2l), half = (E.second - E.first) / Real(2l);
  Real pi = Real::pi();
  ScanResult out;
  Real prev_sup(0l);
  for (int M = std::max(16 * n, 240);; M *= 2) {
    out = ScanResult{Real(0l), 0, {}, {}};
    Real last_signed(0l), last_x(0l);
    Real seg_max(0l);
    for (int i = 0; i <= M; ++i) {
      Real x = mid + half * cos(pi * Real(M - i) / Real(M));
      Real e = markovEval(f, Cplx(x), ctx).re - r(Cplx(x)).re;
      if (i > 0 && (e * last_signed).sign() < 0) {
        ++out.signs;
        // secant estimate of the sign change
        Real t = last_signed / (last_signed - e);
        out.zeros.push_back(last_x + (x - last_x) * t);
        out.maxima.push_back(seg_max);
        seg_max = Real(0l);
      }
      seg_max = max(seg_max, abs(e));
      if (!e.isZero()) {
        last_signed = e;
        last_x = x;
      }
      out.sup = max(out.sup, abs(e));
    }
    out.maxima.push_back(seg_max);
    if (!prev_sup.isZero() && abs(out.sup - prev_sup) <= Real(0.01) * out.sup) break;
    prev_sup = out.sup;
    if (M > 40000) break;
  }
  return out;
}

}  // namespace

NearBestResult nearBestInterpolant(const MarkovFunction& f, const Interval& E, int n,
                                   const PrecisionContext& ctx, int equalize_rounds) {
  PrecisionScope scope(ctx.bits + 32);
  CondenserEquilibrium ce = condenserEquilibrium(E, {{f.f_lo, f.f_hi}}, ctx);
  if (ce.lambda_E.cheb.size() != 1)
    throw Error(ErrorClass::Internal, "expected a single-piece Green equilibrium measure");
  NearBestResult out;
  out.scheme = InterpolationScheme::fromLimitMeasure(ce.lambda_E.cheb[0], n, ctx.bits);
  PadeOpts popts;
  popts.cancel_common_roots = false;  // interpolation is never lost for Markov functions
  out.r = multipointPade(f, out.scheme, n, ctx, popts);
  ScanResult scan = scanError(f, out.r, E, n, ctx);

  // Oscillation leveling: the raw quantile table leaves the error envelope
  // tilted across E. An O(1/n) reallocation of the node quantiles (warp
  // u -> u + alpha u(1-u)) flattens it; alpha is found by secant on the
  // measured end-to-end tilt.
  if (equalize_rounds > 0) {
    auto solveWarp = [&](const Real& alpha) {
      InterpolationScheme s;
      s.E = E;
      const ChebPiece& mu = ce.lambda_E.cheb[0];
      for (int k = 1; k <= 2 * n; ++k) {
        Real u = Real(2 * k - 1) / Real(4 * n);
        Real uw = u + alpha * u * (Real(1l) - u);
        uw = max(Real(1e-9), min(Real(1l) - Real(1e-9), uw));
        Real t = chebDensityQuantile(mu.coeff, uw * mu.mass(), ctx.bits);
        s.nodes.push_back(mu.mid() + mu.half() * t);
      }
      return s;
    };
    auto tiltOf = [&](const ScanResult& sc) {
      Real floor_val = sc.sup * Real(1e-12);
      return log(max(sc.maxima.front(), floor_val) / max(sc.maxima.back(), floor_val));
    };
    Real a0(0l), t0 = tiltOf(scan);
    Real a1 = Real(-0.05) * t0;  // initial guess proportional to the tilt
    for (int round = 0; round < equalize_rounds; ++round) {
      InterpolationScheme s = solveWarp(a1);
      RationalFn rn = multipointPade(f, s, n, ctx, popts);
      ScanResult sn = scanError(f, rn, E, n, ctx);
      if (static_cast<int>(sn.zeros.size()) == 2 * n && sn.sup < scan.sup) {
        out.scheme = s;
        out.r = rn;
        scan = sn;
      }
      Real t1 = tiltOf(sn);
      if (abs(t1) < Real(0.05) || t1 == t0) break;
      Real a2 = a1 - t1 * (a1 - a0) / (t1 - t0);
      a0 = a1;
      t0 = t1;
      a1 = max(Real(-0.45), min(Real(0.45), a2));
    }
  }

  out.sup_error = scan.sup;
  out.sign_changes = scan.signs;
  return out;
}

BestApproxResult bestApproxMarkov(const MarkovFunction& f, const Interval& E, int n,
                                  const PrecisionContext& ctx, double cert_tol,
                                  int max_rounds) {
  PrecisionScope scope(ctx.bits + 32);
  CondenserEquilibrium ce = condenserEquilibrium(E, {{f.f_lo, f.f_hi}}, ctx);
  const ChebPiece& mu = ce.lambda_E.cheb[0];
  PadeOpts popts;
  popts.cancel_common_roots = false;
  int K = 2 * n + 1;

  auto build = [&](const Real& alpha, const Real& beta) {
    InterpolationScheme s;
    s.E = E;
    for (int k = 1; k <= K; ++k) {
      Real u = Real(2 * k - 1) / Real(2 * K);
      Real w = u + alpha * u * (Real(1l) - u) +
               beta * u * (Real(1l) - u) * (Real(1l) - Real(2l) * u);
      w = max(Real(1e-9), min(Real(1l) - Real(1e-9), w));
      Real t = chebDensityQuantile(mu.coeff, w * mu.mass(), ctx.bits);
      s.nodes.push_back(mu.mid() + mu.half() * t);
    }
    return s;
  };
  struct Probe {
    RationalFn r;
    ScanResult scan;
    Real t_lin, t_quad;
  };
  auto solve = [&](const Real& alpha, const Real& beta) {
    Probe p;
    auto s = build(alpha, beta);
    p.r = multipointPade(f, s, n, ctx, popts);
    p.scan = scanError(f, p.r, E, n, ctx);
    Real fl = p.scan.sup * Real(1e-12);
    Real m0 = max(p.scan.maxima.front(), fl);
    Real m1 = max(p.scan.maxima.back(), fl);
    Real mm = max(p.scan.maxima[p.scan.maxima.size() / 2], fl);
    p.t_lin = log(m0 / m1);
    p.t_quad = log(m0 * m1 / (mm * mm));
    return p;
  };

  // Newton on the (tilt, curvature) pair; the Jacobian is refreshed once.
  Real a(0l), b(0l);
  Probe cur = solve(a, b);
  Real da(0.02), db(0.02);
  Probe pa = solve(a + da, b);
  Probe pb = solve(a, b + db);
  Real J11 = (pa.t_lin - cur.t_lin) / da, J21 = (pa.t_quad - cur.t_quad) / da;
  Real J12 = (pb.t_lin - cur.t_lin) / db, J22 = (pb.t_quad - cur.t_quad) / db;
  Probe best = cur;
  for (int round = 0; round < max_rounds; ++round) {
    Real det = J11 * J22 - J12 * J21;
    if (det.isZero()) break;
    a += (-cur.t_lin * J22 + cur.t_quad * J12) / det;
    b += (-cur.t_quad * J11 + cur.t_lin * J21) / det;
    a = max(Real(-0.45), min(Real(0.45), a));
    b = max(Real(-0.45), min(Real(0.45), b));
    cur = solve(a, b);
    if (cur.scan.sup < best.scan.sup) best = cur;
    if (abs(cur.t_lin) < Real(0.01) && abs(cur.t_quad) < Real(0.01)) break;
  }

  BestApproxResult out;
  out.r = best.r;
  out.error = best.scan.sup;
  out.lobes = static_cast<int>(best.scan.maxima.size());
  Real lo = best.scan.maxima.front();
  for (const auto& m : best.scan.maxima) lo = min(lo, m);
  out.lower_bound = lo;
  out.certified = out.lobes >= 2 * n + 2 &&
                  (out.lower_bound / out.error).toDouble() >= 1.0 - cert_tol;
  return out;
}

RateReport rateReport(const std::vector<RateEntry>& series, RateLaw law) {
  if (series.size() < 4)
    throw Error(ErrorClass::Config, "rate report needs at least 4 entries");
  for (size_t i = 1; i < series.size(); ++i)
    if (series[i].n <= series[i - 1].n)
      throw Error(ErrorClass::Config, "rate entries must be sorted by n");
  RateReport rep;
  rep.law = law;
  for (const auto& e : series)
    if (e.error.sign() <= 0) throw Error(ErrorClass::Config, "rate entries must be positive");

  // Non-monotone error sequences get a low-confidence flag.
  for (size_t i = 1; i < series.size(); ++i)
    if (series[i].error > series[i - 1].error * Real(1.2)) rep.low_confidence = true;

  switch (law) {
    case RateLaw::Geometric: {
      for (const auto& e : series)
        rep.raw.push_back(exp(log(e.error) / Real(static_cast<long>(e.n))));
      // Aitken acceleration of the n-th-root sequence.
      std::vector<Real> a = rep.raw;
      Real best = a.back();
      if (a.size() >= 3) {
        size_t k = a.size() - 3;
        Real d1 = a[k + 1] - a[k], d2 = a[k + 2] - a[k + 1];
        Real denom = d2 - d1;
        if (!denom.isZero()) best = a[k + 2] - d2 * d2 / denom;
      }
      rep.estimate = best;
      Real rsum(0l);
      for (size_t i = 1; i < series.size(); ++i)
        rsum += series[i].error / series[i - 1].error;
      rep.fit_v = rsum / Real(static_cast<long>(series.size() - 1));
      rep.fit_residual = abs(rep.estimate - a.back());
      break;
    }
    case RateLaw::SqrtN: {
      Real pi = Real::pi();
      std::vector<Real> h, b;
      for (const auto& e : series) {
        Real rn = sqrt(Real(e.n));
        h.push_back(Real(1l) / rn);
        b.push_back(e.error * exp(pi * rn));
        rep.raw.push_back(b.back());
      }
      // Neville extrapolation to h = 0 on the last up-to-3 entries (the
      // quadratic model; deeper tables amplify the o(h^2) tail).
      size_t m = std::min<size_t>(3, b.size());
      size_t off = b.size() - m;
      std::vector<Real> T(b.begin() + off, b.end());
      std::vector<Real> hh(h.begin() + off, h.end());
      for (size_t lev = 1; lev < m; ++lev)
        for (size_t i = 0; i + lev < m; ++i)
          T[i] = (hh[i + lev] * T[i] - hh[i] * T[i + 1]) / (hh[i + lev] - hh[i]);
      rep.estimate = T[0];
      rep.fit_v = Real(0l);
      rep.fit_residual = abs(rep.estimate - b.back());
      break;
    }
    case RateLaw::Halphen: {
      // least squares on log error = log c + (n + 1/2) log v
      Real sx(0l), sy(0l), sxx(0l), sxy(0l), m(static_cast<long>(series.size()));
      for (const auto& e : series) {
        Real x = Real(e.n) + Real(0.5);
        Real y = log(e.error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      Real denom = m * sxx - sx * sx;
      Real slope = (m * sxy - sx * sy) / denom;
      Real icept = (sy - slope * sx) / m;
      rep.fit_v = exp(slope);
      rep.estimate = exp(icept);  // prefactor c
      Real worst(0l);
      for (const auto& e : series) {
        Real pred = icept + (Real(e.n) + Real(0.5)) * slope;
        worst = max(worst, abs(log(e.error) - pred));
      }
      rep.fit_residual = worst;
      for (const auto& e : series) rep.raw.push_back(e.error);
      break;
    }
  }
  return rep;
}

}  // namespace ratlab
