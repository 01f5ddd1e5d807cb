#include "ratlab/scompact.hpp"
#include <cmath>

#include <algorithm>

#include "ratlab/linalg.hpp"

namespace ratlab {

namespace {

std::vector<Cplx> simpleRoots(const Poly& p, const PrecisionContext& ctx) {
  if (p.degree() < 1) return {};
  auto r = polyRoots(p, ctx);
  std::vector<Cplx> out;
  for (const auto& rm : r.roots)
    for (int i = 0; i < rm.multiplicity; ++i) out.push_back(rm.z);
  return out;
}

Real configScale(const std::vector<Cplx>& pts) {
  if (pts.empty()) return Real(1l);
  Cplx c(0l);
  for (const auto& z : pts) c += z;
  c /= Real(static_cast<long>(pts.size()));
  Real s(0l);
  for (const auto& z : pts) s = max(s, abs(z - c));
  return max(s, Real(1e-6));
}

// sqrt(V/A) with the sign chosen continuously along a node sequence; the
// first node takes the principal value. Returns values at the given points.
std::vector<Cplx> trackedSqrt(const Poly& V, const Poly& A, const std::vector<Cplx>& pts) {
  std::vector<Cplx> out(pts.size());
  Cplx prev;
  for (size_t i = 0; i < pts.size(); ++i) {
    Cplx s = sqrt(V(pts[i]) / A(pts[i]));
    if (i > 0 && abs(s - prev) > abs(s + prev)) s = -s;
    out[i] = s;
    prev = s;
  }
  return out;
}

// Integral of f over the chord [P,Q] with cubic-smoothstep grading at both
// ends and sign-continuous branch tracking of sqrt(V/A)-type integrands.
// f(point, branch_value) -> contribution. The tracked branch starts from the
// principal value at the first node; first/last report its ends.
struct ChordIntegral {
  Cplx value;
  Cplx first, last;  // branch values at the path ends (nearest nodes)
};

ChordIntegral chordPeriodFull(const Poly& V, const Poly& A, const Cplx& P, const Cplx& Q, int n,
                              int panels, mpfr_prec_t bits,
                              const std::function<Cplx(const Cplx&, const Cplx&)>& f) {
  const QuadNodes& gl = gaussLegendre(n, bits);
  Cplx len = Q - P;
  // Gather nodes in path order first so the branch can be tracked.
  std::vector<Cplx> pts;
  std::vector<Real> wts;
  for (int p2 = 0; p2 < panels; ++p2) {
    Real u0 = Real(p2) / Real(panels), u1 = Real(p2 + 1) / Real(panels);
    Real mid = (u0 + u1) / Real(2l), half = (u1 - u0) / Real(2l);
    for (int i = 0; i < n; ++i) {
      Real u = mid + half * gl.x[i];
      Real s = u * u * (Real(3l) - Real(2l) * u);
      Real jac = Real(6l) * u * (Real(1l) - u);
      pts.push_back(P + len * s);
      wts.push_back(gl.w[i] * half * jac);
    }
  }
  std::vector<Cplx> branch = trackedSqrt(V, A, pts);
  ChordIntegral out;
  out.value = Cplx(0l);
  for (size_t i = 0; i < pts.size(); ++i) out.value += f(pts[i], branch[i]) * wts[i] * len;
  out.first = branch.front();
  out.last = branch.back();
  return out;
}

Cplx chordPeriod(const Poly& V, const Poly& A, const Cplx& P, const Cplx& Q, int n, int panels,
                 mpfr_prec_t bits, const std::function<Cplx(const Cplx&, const Cplx&)>& f) {
  return chordPeriodFull(V, A, P, Q, n, panels, bits, f).value;
}

Poly polyFromRootsVec(const std::vector<Cplx>& roots) { return Poly::fromRoots(roots); }

}  // namespace

CellSignature CellSignature::star(int p) {
  if (p != 3)
    throw Error(ErrorClass::Config, "star signature implemented for p = 3");
  CellSignature c;
  for (int k = 0; k < 3; ++k) c.arcs.push_back({{true, 0}, {false, k}, {}});
  return c;
}

PeriodSolveResult periodSolve(const Poly& A, const CellSignature& cell,
                              const std::vector<Cplx>& v0, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.bits + 32);
  std::vector<Cplx> a_roots = simpleRoots(A, ctx);
  long p = static_cast<long>(a_roots.size());
  if (p < 2) throw Error(ErrorClass::Config, "periodSolve needs deg A >= 2");
  if (static_cast<long>(v0.size()) != p - 2)
    throw Error(ErrorClass::Config, "initial guess must provide p-2 roots of V");
  // v0 inside the convex hull, loosely enforced via the configuration disk.
  Cplx centroid(0l);
  for (const auto& a : a_roots) centroid += a;
  centroid /= Real(p);
  Real scale = configScale(a_roots);
  for (const auto& v : v0)
    if (abs(v - centroid) > Real(2l) * scale)
      throw Error(ErrorClass::Domain, "initial guess far outside the root hull");

  Real tol_newton = Real::exp2i(ctx.tol_newton_log2);
  Real tiny_arc = scale * Real::exp2i(-static_cast<double>(ctx.bits) / 2);

  std::vector<Cplx> v = v0;
  PeriodSolveResult out;
  out.iterations = 0;

  auto endpoint = [&](const ZeroRef& r) -> Cplx {
    if (r.is_v) {
      if (r.index >= static_cast<int>(v.size()))
        throw Error(ErrorClass::Config, "cell references a missing V root");
      return v[r.index];
    }
    if (r.index >= static_cast<int>(a_roots.size()))
      throw Error(ErrorClass::Config, "cell references a missing A root");
    return a_roots[r.index];
  };

  auto residualAndJacobian = [&](bool want_jacobian, VecR* res, MatR* J) {
    Poly V = polyFromRootsVec(v);
    long na = static_cast<long>(cell.arcs.size());
    res->assign(na, Real(0l));
    if (want_jacobian) *J = MatR(na, 2 * (p - 2));
    for (long i = 0; i < na; ++i) {
      Cplx from = endpoint(cell.arcs[i].from);
      Cplx to = endpoint(cell.arcs[i].to);
      if (abs(to - from) < tiny_arc) continue;  // collapsed arc contributes nothing
      Cplx period = chordPeriod(V, A, from, to, 24, 12, ctx.bits + 32,
                                [](const Cplx&, const Cplx& s) { return s; });
      (*res)[i] = period.re;
      if (want_jacobian) {
        for (long j = 0; j < p - 2; ++j) {
          // d/dv_j sqrt(V/A) = -(1/2) sqrt(V/A)/(t - v_j)
          Cplx vj = v[j];
          Cplx dp = chordPeriod(V, A, from, to, 24, 12, ctx.bits + 32,
                                [&](const Cplx& t, const Cplx& s) {
                                  return s * Real(-0.5) / (t - vj);
                                });
          (*J)(i, 2 * j) = dp.re;        // d/d Re(v_j)
          (*J)(i, 2 * j + 1) = -dp.im;   // d/d Im(v_j): dRe(P)/dy = Re(i dP/dv)... = -Im dP/dv
        }
      }
    }
  };

  VecR res;
  MatR J;
  residualAndJacobian(false, &res, nullptr);
  Real rnorm(0l);
  for (const auto& r : res) rnorm = max(rnorm, abs(r));

  for (int it = 0; it < 60 && rnorm > tol_newton; ++it) {
    out.iterations = it + 1;
    residualAndJacobian(true, &res, &J);
    VecR rhs(res.size(), Real(0l));
    for (size_t i = 0; i < res.size(); ++i) rhs[i] = -res[i];
    // Least-squares (or minimum-norm) Gauss-Newton step.
    VecR step;
    if (J.rows() >= J.cols()) {
      step = solveLeastSquares(J, rhs, ctx);
    } else {
      step = solveLeastSquares(J, rhs, ctx);  // wide path: minimum-norm inside
    }
    Real damp(1l);
    for (int half = 0; half < 10; ++half) {
      std::vector<Cplx> vn = v;
      for (long j = 0; j < p - 2; ++j)
        vn[j] += Cplx(step[2 * j] * damp, step[2 * j + 1] * damp);
      std::vector<Cplx> save = v;
      v = vn;
      VecR res2;
      residualAndJacobian(false, &res2, nullptr);
      Real rn2(0l);
      for (const auto& r : res2) rn2 = max(rn2, abs(r));
      if (rn2 < rnorm || rnorm.isZero()) {
        res = res2;
        rnorm = rn2;
        break;
      }
      v = save;
      damp /= Real(2l);
      if (half == 9) {
        out.residual.values = res;
        out.residual.norm = rnorm;
        throw Error(ErrorClass::Convergence, "periodSolve: Newton stalled",
                    rnorm.toDouble());
      }
    }
  }
  if (rnorm > tol_newton)
    throw Error(ErrorClass::Convergence, "periodSolve did not reach tol_newton",
                rnorm.toDouble());

  // Collision reporting: v_j on a root of A reduces the genus.
  Real col_tol = scale * Real(1e-12);
  for (long j = 0; j < p - 2; ++j)
    for (long k = 0; k < p; ++k)
      if (abs(v[j] - a_roots[k]) < col_tol) out.cancellations.push_back({(int)j, (int)k});

  out.v = v;
  out.V = polyFromRootsVec(v);
  out.residual.values = res;
  out.residual.norm = rnorm;
  return out;
}

Poly phiMap(const Poly& A, const Poly& V, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.bits + 32);
  long p = A.degree();
  if (V.degree() != p - 2)
    throw Error(ErrorClass::Config, "phiMap expects deg V = deg A - 2");

  // Roots of A V with pairwise confluences split off into the double factor D.
  std::vector<Cplx> all = simpleRoots(A, ctx);
  std::vector<Cplx> vr = simpleRoots(V, ctx);
  all.insert(all.end(), vr.begin(), vr.end());
  Real scale = configScale(all);
  Real tol = scale * Real(1e-20);

  std::vector<Cplx> simple, dbl;
  std::vector<bool> used(all.size(), false);
  for (size_t i = 0; i < all.size(); ++i) {
    if (used[i]) continue;
    bool paired = false;
    for (size_t j = i + 1; j < all.size(); ++j) {
      if (used[j]) continue;
      if (abs(all[i] - all[j]) < tol) {
        used[i] = used[j] = true;
        dbl.push_back((all[i] + all[j]) * Real(0.5));
        paired = true;
        break;
      }
    }
    if (!paired) {
      used[i] = true;
      simple.push_back(all[i]);
    }
  }
  std::sort(simple.begin(), simple.end(), lexLess);
  long m = static_cast<long>(simple.size());
  if (m % 2 != 0) throw Error(ErrorClass::Internal, "odd number of simple branch points");
  long genus = m / 2 - 1;
  Poly D = Poly::fromRoots(dbl);
  Poly S = Poly::fromRoots(simple);

  Poly Wt;  // monic, degree = genus
  if (genus <= 0) {
    Wt = Poly::constant(Cplx(1l));
  } else {
    // Conditions: Re Int_{b_i}^{b_{i+1}} t^j / sqrt(S) dt combine so that all
    // cycle periods of W~ dt/sqrt(S) have vanishing real part.
    long rows = m - 1;
    MatR M(rows, 2 * genus);
    VecR rhs(rows, Real(0l));
    for (long i = 0; i < rows; ++i) {
      std::vector<Cplx> periods(genus + 1, Cplx(0l));
      for (long j = 0; j <= genus; ++j) {
        periods[j] = chordPeriod(Poly::constant(Cplx(1l)), S, simple[i], simple[i + 1], 24, 12,
                                 ctx.bits + 32, [&](const Cplx& t, const Cplx& s) {
                                   // s = sqrt(1/S); multiply by t^j
                                   Cplx tj(1l);
                                   for (long q = 0; q < j; ++q) tj *= t;
                                   return s * tj;
                                 });
      }
      for (long j = 0; j < genus; ++j) {
        M(i, 2 * j) = periods[j].re;
        M(i, 2 * j + 1) = -periods[j].im;  // coefficient w_j = x + iy: Re(w_j P) = x Re P - y Im P
      }
      rhs[i] = -periods[genus].re;
    }
    VecR sol = solveLeastSquares(M, rhs, ctx);
    std::vector<Cplx> wc(genus + 1, Cplx(0l));
    for (long j = 0; j < genus; ++j) wc[j] = Cplx(sol[2 * j], sol[2 * j + 1]);
    wc[genus] = Cplx(1l);
    Wt = Poly(wc);
  }
  return D * Wt;
}

namespace {

// Unit field direction at z continuous with `prev`; also outputs the branch
// s of sqrt(V/A) with Im(s * tau) > 0 (the Abelian parameter increases).
Cplx fieldDirection(const Poly& V, const Poly& A, const Cplx& z, const Cplx& prev, Cplx* s_out) {
  Cplx s = sqrt(V(z) / A(z));
  Cplx tau = Cplx(Real(0l), Real(1l)) / s;
  tau /= abs(tau);
  if (!prev.isZero() && (tau.re * prev.re + tau.im * prev.im).sign() < 0) tau = -tau;
  if (s_out) {
    Cplx st = s * tau;
    if (st.im.sign() < 0) s = -s;
    *s_out = s;
  }
  return tau;
}

struct Stepper {
  const Poly &V, &A;
  Cplx z, dir;
  Cplx G;  // accumulated Abelian integral, Re ~ 0 on the trajectory
  mpfr_prec_t prec;

  void rk4(const Real& h) {
    Cplx k1 = fieldDirection(V, A, z, dir, nullptr);
    Cplx k2 = fieldDirection(V, A, z + k1 * (h / Real(2l)), k1, nullptr);
    Cplx k3 = fieldDirection(V, A, z + k2 * (h / Real(2l)), k2, nullptr);
    Cplx k4 = fieldDirection(V, A, z + k3 * h, k3, nullptr);
    Cplx dz = (k1 + k2 * Real(2l) + k3 * Real(2l) + k4) * (h / Real(6l));
    // Abelian increment along the chord (branch matched to dir).
    const QuadNodes& gl = gaussLegendre(6, prec);
    Cplx inc(0l);
    Cplx prev_s;
    for (int i = 0; i < 6; ++i) {
      Cplx t = z + dz * ((gl.x[i] + Real(1l)) / Real(2l));
      Cplx s;
      Cplx tau = fieldDirection(V, A, t, dir, &s);
      (void)tau;
      inc += s * (gl.w[i] / Real(2l));
    }
    inc *= dz;
    z += dz;
    G += inc;
    dir = fieldDirection(V, A, z, k4, nullptr);
    // Projection back onto Re G = 0.
    Cplx s;
    fieldDirection(V, A, z, dir, &s);
    if (!s.isZero()) {
      Cplx corr = Cplx(G.re) / s;
      z -= corr;
      G = Cplx(Real(0l), G.im);
    }
  }
};

}  // namespace

TraceResult traceTrajectories(const Poly& A, const Poly& V, const PrecisionContext& ctx,
                              const TraceOpts& opts) {
  PrecisionScope scope(std::max<long>(ctx.bits, 192) + 32);
  TraceResult tr;

  std::vector<Cplx> a_roots = simpleRoots(A, ctx);
  std::vector<Cplx> v_roots = V.degree() >= 1 ? simpleRoots(V, ctx) : std::vector<Cplx>{};
  Real scale = configScale(a_roots);
  tr.scale = scale;

  // Cancel V roots that collide with A roots (genus reduction).
  Real col_tol = scale * Real(1e-15);
  std::vector<Cplx> a_red, v_red;
  std::vector<bool> a_used(a_roots.size(), false);
  for (const auto& v : v_roots) {
    bool cancelled = false;
    for (size_t k = 0; k < a_roots.size(); ++k) {
      if (!a_used[k] && abs(v - a_roots[k]) < col_tol) {
        a_used[k] = true;
        cancelled = true;
        tr.cancellations.push_back({static_cast<int>(v_red.size()), static_cast<int>(k)});
        break;
      }
    }
    if (!cancelled) v_red.push_back(v);
  }
  for (size_t k = 0; k < a_roots.size(); ++k)
    if (!a_used[k]) a_red.push_back(a_roots[k]);
  tr.A_red = Poly::fromRoots(a_red);
  tr.V_red = v_red.empty() ? Poly::constant(Cplx(1l)) : Poly::fromRoots(v_red);

  // Zero set with local orders (multiple V roots collapse into one entry).
  std::vector<Cplx> zeros;
  std::vector<int> order;
  for (const auto& a : a_red) {
    zeros.push_back(a);
    order.push_back(-1);
  }
  std::vector<bool> seen(v_red.size(), false);
  for (size_t i = 0; i < v_red.size(); ++i) {
    if (seen[i]) continue;
    int mult = 1;
    for (size_t j = i + 1; j < v_red.size(); ++j)
      if (!seen[j] && abs(v_red[i] - v_red[j]) < col_tol) {
        seen[j] = true;
        ++mult;
      }
    zeros.push_back(v_red[i]);
    order.push_back(mult);
  }
  tr.zeros = zeros;
  tr.zero_order = order;

  const Poly& Ar = tr.A_red;
  const Poly& Vr = tr.V_red;

  Real h0 = scale * Real(opts.base_step);
  Real rcap = scale * Real(opts.capture_radius);

  auto nearestZero = [&](const Cplx& z) {
    int best = -1;
    Real bd(1e30);
    for (size_t k = 0; k < zeros.size(); ++k) {
      Real d = abs(z - zeros[k]);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(k);
      }
    }
    return std::make_pair(best, bd);
  };

  // Local QD coefficient at zero index k: Q(z) ~ c (z - z0)^m.
  auto localCoeff = [&](int k) {
    const Cplx& z0 = zeros[k];
    int m = order[k];
    // Q = -V/A; factor out (z-z0)^m numerically via derivatives-free limit.
    Cplx num = Vr(z0), den = Ar(z0);
    if (m == -1) {
      // simple zero of A: c = -V(z0)/A'(z0)
      Poly Ad = Ar.derivative();
      return -Vr(z0) / Ad(z0);
    }
    // m-fold zero of V: c = -V^(m)(z0)/m! / A(z0)
    Poly Vd = Vr;
    Real fact(1l);
    for (int i = 0; i < m; ++i) {
      Vd = Vd.derivative();
      fact *= Real(i + 1);
    }
    (void)num;
    return -(Vd(z0) / fact) / den;
  };

  // Trace every ray from every zero; duplicates removed afterwards.
  for (size_t k = 0; k < zeros.size(); ++k) {
    int m = order[k];
    int rays = m + 2;
    Cplx c = localCoeff(static_cast<int>(k));
    Real argc = arg(c);
    for (int j = 0; j < rays; ++j) {
      Real theta = (Real(2l) * Real::pi() * Real(j) - argc) / Real(m + 2);
      Cplx ray(cos(theta), sin(theta));

      TracedArc arc;
      arc.start_zero = static_cast<int>(k);
      Real r0 = scale * Real(1e-5);
      Stepper st{Vr, Ar, zeros[k] + ray * r0, ray, Cplx(0l), Real::defaultPrec()};
      // Abelian increment of the startup segment (endpoint singularity graded).
      Cplx inc = chordPeriod(Vr, Ar, zeros[k], st.z, 16, 6, Real::defaultPrec(),
                             [](const Cplx&, const Cplx& s) { return s; });
      // Orient so nu increases along the trace direction.
      Cplx s0;
      fieldDirection(Vr, Ar, st.z, ray, &s0);
      if ((inc.im).sign() < 0) inc = -inc;
      st.G = Cplx(Real(0l), inc.im);
      arc.samples.push_back({zeros[k], Real(0l), ray});
      arc.samples.push_back({st.z, st.G.im, st.dir});

      bool done = false;
      Real traveled(0l);
      for (int step = 0; step < opts.max_steps && !done; ++step) {
        auto [nz, nd] = nearestZero(st.z);
        (void)nz;
        // Steps shrink near every zero so the per-step Abelian increments
        // stay well resolved; growth away from the launch point is geometric.
        Real h = min(h0, max(nd * Real(0.25), rcap * Real(0.01)));
        Cplx z_prev = st.z;
        st.rk4(h);
        traveled += abs(st.z - z_prev);
        auto [nz2, nd2] = nearestZero(st.z);
        arc.samples.push_back({st.z, st.G.im, st.dir});
        bool leaving_start = nz2 == static_cast<int>(k) && traveled < Real(20l) * rcap;
        if (nd2 < rcap && !leaving_start) {
          // Terminal chord to the zero, graded at the singular end.
          Cplx tail = chordPeriod(Vr, Ar, st.z, zeros[nz2], 16, 6, Real::defaultPrec(),
                                  [](const Cplx&, const Cplx& s) { return s; });
          if (tail.im.sign() < 0) tail = -tail;
          arc.end_zero = nz2;
          arc.closed = true;
          arc.nu_end = st.G.im + tail.im;
          arc.samples.push_back({zeros[nz2], arc.nu_end, st.dir});
          done = true;
        } else if (abs(st.z) > Real(8l) * scale + Real(8l)) {
          arc.closed = false;
          arc.nu_end = st.G.im;
          done = true;
        }
      }
      if (!done) {
        arc.closed = false;
        arc.nu_end = st.G.im;
      }
      tr.arcs.push_back(std::move(arc));
    }
  }

  // Deduplicate arcs traced from both ends: same unordered endpoint pair and
  // matching midpoint.
  std::vector<TracedArc> unique_arcs;
  for (auto& a : tr.arcs) {
    bool dup = false;
    if (a.closed) {
      for (const auto& b : unique_arcs) {
        if (!b.closed) continue;
        bool same_pair = (a.start_zero == b.start_zero && a.end_zero == b.end_zero) ||
                         (a.start_zero == b.end_zero && a.end_zero == b.start_zero);
        if (!same_pair) continue;
        if (abs(a.nu_end - b.nu_end) > Real(1e-5) * max(abs(a.nu_end), Real(1l))) continue;
        // compare nu-midpoints, linearly interpolated between samples
        auto midpoint = [&](const TracedArc& arc, bool reversed) {
          Real want = reversed ? arc.nu_end / Real(2l) : arc.nu_end / Real(2l);
          (void)reversed;
          size_t lo = 0;
          while (lo + 1 < arc.samples.size() && arc.samples[lo + 1].nu < want) ++lo;
          if (lo + 1 >= arc.samples.size()) return arc.samples[lo].z;
          Real d_nu = arc.samples[lo + 1].nu - arc.samples[lo].nu;
          if (d_nu.isZero()) return arc.samples[lo].z;
          Real t = (want - arc.samples[lo].nu) / d_nu;
          return arc.samples[lo].z + (arc.samples[lo + 1].z - arc.samples[lo].z) * t;
        };
        Real d = abs(midpoint(a, false) - midpoint(b, false));
        if (d < Real(0.02) * scale) {
          dup = true;
          break;
        }
      }
    }
    if (!dup) unique_arcs.push_back(std::move(a));
  }
  tr.arcs = std::move(unique_arcs);

  // Angle-defect validation on interior samples via 5-point Lagrange
  // derivatives of z(nu) (endpoint neighborhoods excluded: z(nu) has a
  // fractional power at V-type ends).
  for (auto& a : tr.arcs) {
    Real worst(0l);
    long N = static_cast<long>(a.samples.size());
    for (long i = 3; i + 3 < N; ++i) {
      Real nu_lo = a.nu_end * Real(0.02);
      if (a.samples[i].nu < nu_lo || a.samples[i].nu > a.nu_end - nu_lo) continue;
      // 5-point derivative dz/dnu at node i
      Cplx dz(0l);
      for (int u = -2; u <= 2; ++u) {
        // Lagrange derivative weight of node i+u at x = nu_i
        Real lw(1l), num(1l);
        Real xi = a.samples[i].nu;
        Real xu = a.samples[i + u].nu;
        Real der(0l);
        // derivative of l_u(x) at xi: sum over product terms
        for (int r = -2; r <= 2; ++r) {
          if (r == u) continue;
          Real prod(1l);
          for (int q = -2; q <= 2; ++q) {
            if (q == u || q == r) continue;
            prod *= (xi - a.samples[i + q].nu);
          }
          der += prod;
        }
        for (int r = -2; r <= 2; ++r) {
          if (r == u) continue;
          lw *= (xu - a.samples[i + r].nu);
        }
        (void)num;
        dz += a.samples[i + u].z * (der / lw);
      }
      if (abs(dz).isZero()) continue;
      Cplx qd = -(Vr(a.samples[i].z) / Ar(a.samples[i].z)) * dz * dz;
      Real ang = abs(atan2(qd.im, qd.re));
      worst = max(worst, ang);
    }
    a.max_angle_defect = worst;
  }
  return tr;
}

namespace {

// z(nu) on a traced arc by local bracketing plus complex Newton on the
// accumulated Abelian integral G(z) - G(anchor) = i (nu - nu_anchor).
// Near the arc ends the chord is anchored at the terminal zero itself, so
// its branch-point singularity sits exactly on the (graded) chord endpoint.
Cplx resampleArc(const Poly& V, const Poly& A, const TracedArc& arc, const Real& nu) {
  size_t n = arc.samples.size();
  size_t lo = 0;
  while (lo + 1 < n && arc.samples[lo + 1].nu < nu) ++lo;

  bool from_start = nu <= arc.samples[std::min<size_t>(2, n - 1)].nu;
  bool from_end = !from_start && nu >= arc.samples[n >= 3 ? n - 3 : 0].nu;
  Cplx za;
  Real nu0;
  int orient = 0;  // +1: val.im must match sign(nu-nu0); 0: use branch anchor
  Cplx s_anchor;
  if (from_start) {
    za = arc.samples.front().z;
    nu0 = arc.samples.front().nu;
    orient = 1;
  } else if (from_end) {
    za = arc.samples.back().z;
    nu0 = arc.samples.back().nu;
    orient = 1;
  } else {
    size_t anchor = std::min(std::max<size_t>(lo, 1), n - 2);
    za = arc.samples[anchor].z;
    nu0 = arc.samples[anchor].nu;
    fieldDirection(V, A, za, arc.samples[anchor].tangent, &s_anchor);
  }

  // Initial guess: linear interpolation between the bracketing samples.
  Cplx z;
  {
    size_t hi = std::min(lo + 1, n - 1);
    const auto& sl = arc.samples[lo];
    const auto& sh = arc.samples[hi];
    if (hi == lo || (sh.nu - sl.nu).isZero()) {
      z = sl.z;
    } else {
      Real t = (nu - sl.nu) / (sh.nu - sl.nu);
      z = sl.z + (sh.z - sl.z) * t;
    }
    if (abs(z - za).isZero()) z = za + (arc.samples[n / 2].z - za) * Real(1e-3);
  }

  Real prev_err(1e30);
  if (orient) {
    // Zero-anchored: Newton in the local square-root variable w = sqrt(z-b),
    // which cannot cross the branch point. The overall branch flip of the
    // chord integral is decided on the first iteration and kept.
    Cplx w = sqrt(z - za);
    int flip_state = 0;
    for (int it = 0; it < 48; ++it) {
      z = za + w * w;
      ChordIntegral ci = chordPeriodFull(V, A, za, z, 12, 2, Real::defaultPrec(),
                                         [](const Cplx&, const Cplx& s) { return s; });
      Cplx val = ci.value;
      Cplx dgdz = ci.last;
      if (flip_state == 0) flip_state = (val.im * (nu - nu0)).sign() < 0 ? -1 : 1;
      if (flip_state < 0) {
        val = -val;
        dgdz = -dgdz;
      }
      Cplx err = val - Cplx(Real(0l), nu - nu0);
      Real en = abs(err);
      if (en < Real::exp2i(-120) || en > prev_err * Real(0.95)) break;
      prev_err = en;
      Cplx dgdw = dgdz * w * Real(2l);
      if (dgdw.isZero()) break;
      w -= err / dgdw;
    }
    return za + w * w;
  }
  for (int it = 0; it < 40; ++it) {
    ChordIntegral ci = chordPeriodFull(V, A, za, z, 12, 2, Real::defaultPrec(),
                                       [](const Cplx&, const Cplx& s) { return s; });
    Cplx val = ci.value;
    Cplx deriv = ci.last;  // dG/dz at z for the tracked branch
    bool flip = abs(ci.first - s_anchor) > abs(ci.first + s_anchor);
    if (flip) {
      val = -val;
      deriv = -deriv;
    }
    Cplx err = val - Cplx(Real(0l), nu - nu0);
    Real en = abs(err);
    // Convergence bottoms out on the chord-quadrature floor.
    if (en < Real::exp2i(-120) || en > prev_err * Real(0.9)) break;
    prev_err = en;
    if (deriv.isZero()) break;
    z -= err / deriv;
  }
  return z;
}

}  // namespace

namespace {

// Cached z(nu) evaluator: panelwise Chebyshev interpolation, with a cube-root
// panel variable where the arc ends at a zero of V (z(nu) has a 2/3-power
// there) so every panel is analytic.
struct ArcEval {
  struct Panel {
    Real lo, hi;
    int var;  // 0 plain, 1 cube-root from lo, 2 cube-root from hi
    std::vector<Real> cre, cim;
  };
  std::vector<Panel> panels;

  Cplx operator()(const Real& nu) const {
    size_t i = 0;
    while (i + 1 < panels.size() && nu > panels[i].hi) ++i;
    const Panel& p = panels[i];
    Real t;
    if (p.var == 0) {
      t = (nu - p.lo) / (p.hi - p.lo) * Real(2l) - Real(1l);
    } else if (p.var == 1) {
      Real s = pow((nu - p.lo) / (p.hi - p.lo), Real(1l) / Real(3l));
      t = s * Real(2l) - Real(1l);
    } else {
      Real s = pow((p.hi - nu) / (p.hi - p.lo), Real(1l) / Real(3l));
      t = s * Real(2l) - Real(1l);
    }
    t = max(Real(-1l), min(Real(1l), t));
    return Cplx(chebEval(p.cre, t), chebEval(p.cim, t));
  }
};

ArcEval buildArcEval(const Poly& V, const Poly& A, const TracedArc& arc, bool v_start,
                     bool v_end) {
  ArcEval ev;
  const int K = 12, N = 24;
  auto pts = chebPoints(N);
  for (int k = 0; k < K; ++k) {
    ArcEval::Panel p;
    p.lo = arc.nu_end * Real(k) / Real(K);
    p.hi = arc.nu_end * Real(k + 1) / Real(K);
    p.var = (k == 0 && v_start) ? 1 : ((k == K - 1 && v_end) ? 2 : 0);
    std::vector<Real> vre, vim;
    for (int i = 0; i < N; ++i) {
      Real s = (pts[i] + Real(1l)) / Real(2l);
      Real nu;
      if (p.var == 0)
        nu = p.lo + (p.hi - p.lo) * s;
      else if (p.var == 1)
        nu = p.lo + (p.hi - p.lo) * s * s * s;
      else
        nu = p.hi - (p.hi - p.lo) * s * s * s;
      Cplx z = resampleArc(V, A, arc, nu);
      vre.push_back(z.re);
      vim.push_back(z.im);
    }
    p.cre = chebCoeffs(vre);
    p.cim = chebCoeffs(vim);
    ev.panels.push_back(std::move(p));
  }
  return ev;
}

}  // namespace

SMeasureReport sMeasureFromV(const Poly& A, const Poly& V, const TraceResult& tr,
                             const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.bits + 32);
  SMeasureReport rep;
  const Poly& Ar = tr.A_red;
  const Poly& Vr = tr.V_red;

  Measure mu;
  Real pi = Real::pi();
  std::vector<ArcEval> evals;
  for (const auto& arc : tr.arcs) {
    if (!arc.closed)
      throw Error(ErrorClass::Convergence, "sMeasureFromV: open trajectory in the trace");
    bool v_start = tr.zero_order[arc.start_zero] >= 1;
    bool v_end = tr.zero_order[arc.end_zero] >= 1;
    evals.push_back(buildArcEval(Vr, Ar, arc, v_start, v_end));
    const ArcEval& ev = evals.back();

    ArcPiece piece;
    // Quadrature in nu: per interpolation panel, GL nodes in the panel's own
    // analytic variable.
    const QuadNodes& gl = gaussLegendre(24, ctx.bits + 32);
    for (const auto& pan : ev.panels) {
      Real len = pan.hi - pan.lo;
      for (size_t i = 0; i < gl.x.size(); ++i) {
        Real s = (gl.x[i] + Real(1l)) / Real(2l);
        Real nu, jac;  // d(nu)/d(s) * (1/2 from GL scaling)
        if (pan.var == 0) {
          nu = pan.lo + len * s;
          jac = len;
        } else if (pan.var == 1) {
          nu = pan.lo + len * s * s * s;
          jac = Real(3l) * len * s * s;
        } else {
          nu = pan.hi - len * s * s * s;
          jac = Real(3l) * len * s * s;
        }
        piece.nodes.push_back(ev(nu));
        piece.weights.push_back(gl.w[i] / Real(2l) * jac / pi);
      }
    }
    for (const auto& s : arc.samples) {
      piece.polyline.push_back(s.z);
      piece.polyline_param.push_back(s.nu / pi);
    }
    rep.arc_masses.push_back(arc.nu_end / pi);
    mu.arcs.push_back(std::move(piece));
  }
  Real total(0l);
  for (const auto& m : rep.arc_masses) total += m;
  rep.mass_error = abs(total - Real(1l));
  if (rep.mass_error > Real(1e-4))
    throw Error(ErrorClass::Convergence,
                "sMeasureFromV: trajectory masses inconsistent with a unit Robin measure",
                rep.mass_error.toDouble());
  rep.mu = mu;

  // Potential constancy + S-property at interior samples.
  // On/near-arc potential: the nearby arc is integrated in nu with dyadic
  // grading toward the close-approach parameter, other arcs by their nodes.
  auto potentialSplit = [&](const Cplx& z, int arc_idx, const Real& nu0) {
    Real acc(0l);
    for (size_t a = 0; a < mu.arcs.size(); ++a) {
      if (static_cast<int>(a) != arc_idx) {
        for (size_t i = 0; i < mu.arcs[a].nodes.size(); ++i)
          acc -= mu.arcs[a].weights[i] * log(abs(z - mu.arcs[a].nodes[i]));
      } else {
        const TracedArc& arc = tr.arcs[a];
        const ArcEval& ev = evals[a];
        bool v_start = tr.zero_order[arc.start_zero] >= 1;
        bool v_end = tr.zero_order[arc.end_zero] >= 1;
        for (int side = 0; side < 2; ++side) {
          Real lo = side == 0 ? Real(0l) : nu0;
          Real hi = side == 0 ? nu0 : arc.nu_end;
          if ((hi - lo).sign() <= 0) continue;
          Real edge = side == 0 ? hi : lo;  // end nearest the kernel singularity
          bool far_is_v = side == 0 ? v_start : v_end;
          int levels = 36;
          const QuadNodes& gl = gaussLegendre(12, ctx.bits);
          Real len = hi - lo;
          for (int lev = 0; lev < levels; ++lev) {
            Real d1 = len / Real::exp2i(lev + 1);
            Real d0 = len / Real::exp2i(lev);
            Real p_lo = side == 0 ? edge - d0 : edge + d1;
            Real p_hi = side == 0 ? edge - d1 : edge + d0;
            bool outermost = lev == 0;
            if (outermost && far_is_v) {
              // z(nu) carries a 2/3 power at a V-type end: integrate the
              // outermost panel in the cube-root variable instead.
              Real flo = side == 0 ? p_lo : p_hi;  // the V end of this panel
              Real plen = p_hi - p_lo;
              for (int i = 0; i < static_cast<int>(gl.x.size()); ++i) {
                Real s = (gl.x[i] + Real(1l)) / Real(2l);
                Real off = plen * s * s * s;
                Real nu = side == 0 ? flo + off : flo - off;
                Real jac = Real(3l) * plen * s * s / Real(2l);
                acc -= gl.w[i] * jac / pi * log(abs(z - ev(nu)));
              }
              continue;
            }
            for (int i = 0; i < static_cast<int>(gl.x.size()); ++i) {
              Real nu = (p_lo + p_hi) / Real(2l) + (p_hi - p_lo) / Real(2l) * gl.x[i];
              acc -= gl.w[i] * (p_hi - p_lo) / Real(2l) / pi * log(abs(z - ev(nu)));
            }
          }
        }
      }
    }
    return acc;
  };

  Real pot_min(0l), pot_max(0l);
  bool first = true;
  Real smax(0l);
  for (size_t a = 0; a < tr.arcs.size(); ++a) {
    const TracedArc& arc = tr.arcs[a];
    Real interior_pot(0l);
    for (int q = 1; q <= 5; ++q) {
      Real nu = arc.nu_end * Real(q) / Real(6l);
      Cplx z = evals[a](nu);
      Real u = potentialSplit(z, static_cast<int>(a), nu);
      if (q == 3) interior_pot = u;
      if (first) {
        pot_min = pot_max = u;
        first = false;
      } else {
        pot_min = min(pot_min, u);
        pot_max = max(pot_max, u);
      }
      // S-property: one-sided normal derivatives, Richardson-accelerated.
      // The nearby evaluations keep the split-integral route (the node sums
      // are under-resolved at distance h from their own arc).
      Cplx s;
      Cplx tau = fieldDirection(Vr, Ar, z, arc.samples[arc.samples.size() / 2].tangent, &s);
      Cplx n = tau * Cplx(Real(0l), Real(1l));
      Real h = tr.scale * Real(3e-4);
      auto onesided = [&](int sign) {
        Cplx dirn = sign > 0 ? n : -n;
        Real u1 = potentialSplit(z + dirn * h, static_cast<int>(a), nu);
        Real u2 = potentialSplit(z + dirn * (h / Real(2l)), static_cast<int>(a), nu);
        Real d1 = (u1 - u) / h;
        Real d2 = (u2 - u) / (h / Real(2l));
        return Real(2l) * d2 - d1;
      };
      Real mismatch = abs(onesided(+1) - onesided(-1));
      smax = max(smax, mismatch);
    }
    rep.arc_potentials.push_back(interior_pot);
  }
  rep.potential_spread = pot_max - pot_min;
  rep.s_mismatch_max = smax;
  return rep;
}

Real greenViaAbelian(const Poly& A, const Poly& V, const TraceResult& tr, const Cplx& z,
                     const PrecisionContext& ctx) {
  PrecisionScope scope(ctx.bits + 32);
  const Poly& Ar = tr.A_red;
  const Poly& Vr = tr.V_red;

  // The traced compact is the zero level set of g.
  {
    double zx = z.re.toDouble(), zy = z.im.toDouble();
    double tol = tr.scale.toDouble() * 1e-9;
    for (const auto& arc : tr.arcs)
      for (size_t i = 1; i < arc.samples.size(); ++i) {
        double ax = arc.samples[i - 1].z.re.toDouble(), ay = arc.samples[i - 1].z.im.toDouble();
        double bx = arc.samples[i].z.re.toDouble(), by = arc.samples[i].z.im.toDouble();
        double dx = bx - ax, dy = by - ay;
        double len2 = dx * dx + dy * dy;
        double t = len2 > 0 ? ((zx - ax) * dx + (zy - ay) * dy) / len2 : 0.0;
        t = std::max(0.0, std::min(1.0, t));
        double ex = zx - (ax + t * dx), ey = zy - (ay + t * dy);
        if (std::sqrt(ex * ex + ey * ey) < tol) return Real(0l);
      }
  }
  std::vector<Cplx> a_roots = simpleRoots(Ar, ctx);
  std::sort(a_roots.begin(), a_roots.end(), lexLess);
  Cplx base = a_roots.front();
  Cplx centroid(0l);
  for (const auto& r : a_roots) centroid += r;
  centroid /= Real(static_cast<long>(a_roots.size()));
  Real Rout = Real(4l) * tr.scale + Real(2l) * abs(z - centroid);

  auto segmentHitsArcs = [&](const Cplx& p, const Cplx& q) {
    // coarse polyline crossing test
    for (const auto& arc : tr.arcs) {
      for (size_t i = 1; i < arc.samples.size(); ++i) {
        const Cplx& a = arc.samples[i - 1].z;
        const Cplx& b = arc.samples[i].z;
        // segment intersection in doubles (robust enough for routing)
        auto cross = [](double ax, double ay, double bx, double by) {
          return ax * by - ay * bx;
        };
        double px = p.re.toDouble(), py = p.im.toDouble();
        double qx = q.re.toDouble(), qy = q.im.toDouble();
        double ax2 = a.re.toDouble(), ay2 = a.im.toDouble();
        double bx2 = b.re.toDouble(), by2 = b.im.toDouble();
        double d1 = cross(qx - px, qy - py, ax2 - px, ay2 - py);
        double d2 = cross(qx - px, qy - py, bx2 - px, by2 - py);
        double d3 = cross(bx2 - ax2, by2 - ay2, px - ax2, py - ay2);
        double d4 = cross(bx2 - ax2, by2 - ay2, qx - ax2, qy - ay2);
        if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return true;
      }
    }
    return false;
  };

  // Radial escape directions for base and z, rotated until the segments
  // clear the traced arcs.
  auto escape = [&](const Cplx& from, bool is_base) {
    Cplx dir0 = is_base ? (from - centroid) : (from - centroid);
    if (abs(dir0) < tr.scale * Real(1e-9)) dir0 = Cplx(1l);
    dir0 /= abs(dir0);
    for (int k = 0; k < 64; ++k) {
      Real ang = Real::pi() * Real(2l * ((k + 1) / 2)) / Real(32l) * Real(k % 2 ? 1 : -1);
      Cplx rot(cos(ang), sin(ang));
      Cplx dir = dir0 * rot;
      Cplx target = centroid + dir * Rout;
      Cplx start = is_base ? from + dir * (tr.scale * Real(1e-7)) : from;
      if (!segmentHitsArcs(start, target)) return target;
    }
    throw Error(ErrorClass::Convergence, "greenViaAbelian: could not route around the arcs");
  };

  Cplx far_base = escape(base, true);
  Cplx far_z = escape(z, false);

  // Path: base -> far_base -> (circle chords) -> far_z -> z. The branch is
  // tracked within each segment and chained across boundaries; Re of the
  // total is path-independent once the branch is continuous.
  std::vector<Cplx> path;
  path.push_back(base);
  path.push_back(far_base);
  Real a0 = arg(far_base - centroid), a1 = arg(far_z - centroid);
  Real dtheta = a1 - a0;
  Real pi = Real::pi();
  while (dtheta > pi) dtheta -= Real(2l) * pi;
  while (dtheta < -pi) dtheta += Real(2l) * pi;
  int segs = 12;
  for (int i = 1; i <= segs; ++i) {
    Real th = a0 + dtheta * Real(i) / Real(segs);
    path.push_back(centroid + Cplx(cos(th), sin(th)) * Rout);
  }
  path.push_back(far_z);
  path.push_back(z);

  Cplx total(0l);
  Cplx first_value;
  Cplx carry;
  bool have_carry = false;
  for (size_t i = 1; i < path.size(); ++i) {
    const Cplx& P = path[i - 1];
    const Cplx& Q = path[i];
    if (abs(Q - P).isZero()) continue;
    ChordIntegral ci = chordPeriodFull(Vr, Ar, P, Q, 24, i == 1 ? 10 : 4, ctx.bits + 32,
                                       [](const Cplx&, const Cplx& s) { return s; });
    Cplx val = ci.value, last = ci.last;
    if (have_carry && abs(ci.first - carry) > abs(ci.first + carry)) {
      val = -val;
      last = -last;
    }
    if (i == 1) first_value = val;
    carry = last;
    have_carry = true;
    total += val;
  }

  // Global sign: g grows like +ln|z| outward, so the base -> far segment must
  // contribute a positive real part.
  if (first_value.re.sign() < 0) return -total.re;
  return total.re;
}

Real energyVariation(const Measure& mu, const PlaneField& h, const PrecisionContext& ctx,
                     const std::vector<Cplx>* e_vanish) {
  PrecisionScope scope(ctx.bits + 32);

  // Collect transported nodes piece by piece (ordered along each piece).
  struct Cloud {
    std::vector<Cplx> z;
    std::vector<Real> w;
    std::vector<size_t> piece_start;
  };
  Cloud cl;
  auto beginPiece = [&]() { cl.piece_start.push_back(cl.z.size()); };
  for (const auto& a : mu.atoms) {
    beginPiece();
    cl.z.push_back(a.z);
    cl.w.push_back(a.w);
  }
  for (const auto& p : mu.cheb) {
    beginPiece();
    int M = std::max<int>(96, static_cast<int>(p.coeff.size()) * 2);
    const QuadNodes& gl = gaussLegendre(48, ctx.bits);
    int panels = (M + 47) / 48;
    Real pi = Real::pi();
    for (int pan = 0; pan < panels; ++pan) {
      Real t0 = pi * Real(pan) / Real(panels), t1 = pi * Real(pan + 1) / Real(panels);
      for (size_t i = 0; i < gl.x.size(); ++i) {
        Real theta = (t0 + t1) / Real(2l) + (t1 - t0) / Real(2l) * gl.x[i];
        Real ct = cos(theta);
        cl.z.push_back(Cplx(p.mid() + p.half() * ct));
        cl.w.push_back(gl.w[i] * (t1 - t0) / Real(2l) * chebEval(p.coeff, ct) / pi);
      }
    }
  }
  for (const auto& p : mu.weights) {
    beginPiece();
    GradedGrid g = gradedGrid(p.a, p.b, 32, 16, ctx.bits);
    for (size_t i = 0; i < g.x.size(); ++i) {
      cl.z.push_back(Cplx(g.x[i]));
      cl.w.push_back(g.w[i] * p.weight(g.x[i]));
    }
  }
  for (const auto& p : mu.arcs) {
    beginPiece();
    for (size_t i = 0; i < p.nodes.size(); ++i) {
      cl.z.push_back(p.nodes[i]);
      cl.w.push_back(p.weights[i]);
    }
  }
  cl.piece_start.push_back(cl.z.size());

  size_t N = cl.z.size();
  if (N < 2) throw Error(ErrorClass::Domain, "energyVariation needs a nondegenerate measure");

  std::vector<Cplx> hz(N);
  Real hnorm(0l);
  for (size_t i = 0; i < N; ++i) {
    hz[i] = h(cl.z[i]);
    hnorm = max(hnorm, abs(hz[i]));
  }
  if (e_vanish) {
    for (const auto& a : *e_vanish)
      if (abs(h(a)) > Real(1e-12) * max(hnorm, Real(1l)))
        throw Error(ErrorClass::Domain,
                    "energyVariation: field does not vanish on the prescribed point set");
  }

  auto energyAt = [&](const Real& t) {
    std::vector<Cplx> zt(N);
    for (size_t i = 0; i < N; ++i) zt[i] = cl.z[i] + hz[i] * t;
    Real E(0l);
    for (size_t i = 0; i < N; ++i)
      for (size_t j = i + 1; j < N; ++j) E -= Real(2l) * cl.w[i] * cl.w[j] * log(abs(zt[i] - zt[j]));
    // Self-energy of each quadrature cell: only the local stretch matters for
    // the derivative; cell length from transported neighbor gaps.
    for (size_t p = 0; p + 1 < cl.piece_start.size(); ++p) {
      size_t lo = cl.piece_start[p], hi = cl.piece_start[p + 1];
      if (hi - lo < 3) continue;
      for (size_t i = lo; i < hi; ++i) {
        Real len;
        if (i == lo)
          len = abs(zt[i + 1] - zt[i]);
        else if (i + 1 == hi)
          len = abs(zt[i] - zt[i - 1]);
        else
          len = (abs(zt[i + 1] - zt[i]) + abs(zt[i] - zt[i - 1])) / Real(2l);
        if (len.isZero()) continue;
        E -= cl.w[i] * cl.w[i] * log(len);
      }
    }
    return E;
  };

  Real scale = max(hnorm, Real(1e-30));
  Real t0 = Real(1e-3) / scale;
  auto central = [&](const Real& t) { return (energyAt(t) - energyAt(-t)) / (Real(2l) * t); };
  Real d1 = central(t0);
  Real d2 = central(t0 / Real(2l));
  return (Real(4l) * d2 - d1) / Real(3l);
}

}  // namespace ratlab
