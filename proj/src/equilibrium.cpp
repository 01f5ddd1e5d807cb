#include "ratlab/equilibrium.hpp"

#include <algorithm>

#include "ratlab/linalg.hpp"

namespace ratlab {

void validateIntervalSet(const IntervalSet& F) {
  if (F.empty() || F.size() > 4)
    throw Error(ErrorClass::Domain, "interval set must hold 1..4 intervals");
  for (const auto& iv : F)
    if (!(iv.first < iv.second))
      throw Error(ErrorClass::Domain, "interval endpoints out of order");
  for (size_t i = 0; i < F.size(); ++i)
    for (size_t j = i + 1; j < F.size(); ++j) {
      if (!(F[i].second < F[j].first || F[j].second < F[i].first))
        throw Error(ErrorClass::Domain, "intervals overlap");
    }
}

namespace {

// Potential of the k-th Chebyshev basis density of plate [a,b] at real x.
Real basisPotential(const Real& a, const Real& b, int k, const Real& x) {
  Real mid = (a + b) / Real(2l), half = (b - a) / Real(2l);
  Cplx zeta((x - mid) / half, Real(0l));
  Real u = chebLogPotential(k, zeta);
  if (k == 0) u -= log(half);
  return u;
}

struct Plate {
  Real a, b;
  int cgroup;  // constant this plate's equation refers to
  int sign;    // sign of this plate's potential in the constancy expression
  int mgroup;  // mass-constraint group
};

struct LinearSolution {
  std::vector<std::vector<Real>> coeff;  // per plate
  std::vector<Real> constants;           // per constant group
};

// Least-squares solve of: for each plate p and collocation x on p,
//   sum_q sign_q U^{lambda_q}(x) + phi_p(x) - C_{cgroup(p)} = 0,
// with mass constraints sum_{q in mgroup} mass_q = m_g.
LinearSolution solveConstancy(const std::vector<Plate>& plates, const std::vector<FieldFn>& phi,
                              const std::vector<Real>& group_mass, int nconst,
                              const PrecisionContext& ctx, const SolveOpts& opts) {
  int np = static_cast<int>(plates.size());
  int N = opts.ncheb;
  int M = opts.ncheb * opts.oversample;
  long cols = static_cast<long>(np) * N + nconst;
  long rows = static_cast<long>(np) * M + static_cast<long>(group_mass.size());
  MatR A(rows, cols);
  VecR rhs(static_cast<size_t>(rows), Real(0l));

  auto pts = chebPoints(M);
  long row = 0;
  for (int p = 0; p < np; ++p) {
    Real mid = (plates[p].a + plates[p].b) / Real(2l);
    Real half = (plates[p].b - plates[p].a) / Real(2l);
    for (int i = 0; i < M; ++i, ++row) {
      Real x = mid + half * pts[i];
      for (int q = 0; q < np; ++q) {
        Real sgn(static_cast<long>(plates[q].sign));
        for (int k = 0; k < N; ++k)
          A(row, static_cast<long>(q) * N + k) =
              sgn * basisPotential(plates[q].a, plates[q].b, k, x);
      }
      A(row, static_cast<long>(np) * N + plates[p].cgroup) = Real(-1l);
      if (phi[p]) rhs[row] = -phi[p](x);
    }
  }
  for (size_t g = 0; g < group_mass.size(); ++g, ++row) {
    for (int q = 0; q < np; ++q)
      if (plates[q].mgroup == static_cast<int>(g)) A(row, static_cast<long>(q) * N) = Real(1l);
    rhs[row] = group_mass[g];
  }

  VecR x = solveLeastSquares(A, rhs, ctx);
  LinearSolution sol;
  sol.coeff.resize(np);
  for (int p = 0; p < np; ++p)
    sol.coeff[p].assign(x.begin() + static_cast<long>(p) * N,
                        x.begin() + static_cast<long>(p + 1) * N);
  for (int g = 0; g < nconst; ++g) sol.constants.push_back(x[static_cast<size_t>(np) * N + g]);
  return sol;
}

Measure measureFromSolution(const std::vector<Plate>& plates, const LinearSolution& sol,
                            int mgroup) {
  Measure m;
  for (size_t p = 0; p < plates.size(); ++p) {
    if (plates[p].mgroup != mgroup) continue;
    ChebPiece piece;
    piece.a = plates[p].a;
    piece.b = plates[p].b;
    piece.coeff = sol.coeff[p];
    m.cheb.push_back(std::move(piece));
  }
  return m;
}

Real potentialOfSolution(const std::vector<Plate>& plates, const LinearSolution& sol, int mgroup,
                         const Real& x) {
  Real u(0l);
  for (size_t p = 0; p < plates.size(); ++p) {
    if (plates[p].mgroup != mgroup) continue;
    for (size_t k = 0; k < sol.coeff[p].size(); ++k)
      u += sol.coeff[p][k] * basisPotential(plates[p].a, plates[p].b, static_cast<int>(k), x);
  }
  return u;
}

struct SupportPiece {
  Real a, b;
  bool soft_a = false, soft_b = false;
};

struct FieldSolveOutput {
  LinearSolution sol;
  std::vector<Plate> plates;
};

FieldSolveOutput solveOnSupport(const std::vector<SupportPiece>& sup, const FieldFn& phi,
                                const PrecisionContext& ctx, const SolveOpts& opts) {
  std::vector<Plate> plates;
  for (const auto& s : sup) plates.push_back({s.a, s.b, 0, +1, 0});
  std::vector<FieldFn> phis(plates.size(), phi);
  FieldSolveOutput out;
  out.sol = solveConstancy(plates, phis, {Real(1l)}, 1, ctx, opts);
  out.plates = std::move(plates);
  return out;
}

Real smoothPart(const LinearSolution& sol, int p, const Real& t) {
  return chebEval(sol.coeff[p], t);
}

}  // namespace

FieldEquilibrium robinEquilibrium(const IntervalSet& F, const PrecisionContext& ctx,
                                  const SolveOpts& opts) {
  FieldFn zero;
  return fieldEquilibrium(F, zero, ctx, opts);
}

FieldEquilibrium fieldEquilibrium(const IntervalSet& F, const FieldFn& phi,
                                  const PrecisionContext& ctx, const SolveOpts& opts_in) {
  validateIntervalSet(F);
  PrecisionScope scope(ctx.bits + 32);
  SolveOpts opts = opts_in;

  for (int esc = 0;; ++esc) {
    std::vector<SupportPiece> sup;
    for (const auto& iv : F) sup.push_back({iv.first, iv.second, false, false});

    FieldSolveOutput cur;
    int trims = 0;
    const int scan = 200;

    // Support trimming: keep, per plate, the positive run of the smooth
    // density factor around its maximum; everything else is off-support.
    for (; trims < opts.max_trim; ++trims) {
      cur = solveOnSupport(sup, phi, ctx, opts);
      if (!phi) break;  // zero field: full support
      bool changed = false;
      std::vector<SupportPiece> next;
      for (size_t p = 0; p < sup.size(); ++p) {
        auto& piece = sup[p];
        Real mid = (piece.a + piece.b) / Real(2l), half = (piece.b - piece.a) / Real(2l);
        std::vector<Real> t(scan + 1, Real(0l)), h(scan + 1, Real(0l));
        int imax = 0;
        for (int i = 0; i <= scan; ++i) {
          t[i] = Real(-1l) + Real(2l * i) / Real(scan);
          h[i] = smoothPart(cur.sol, static_cast<int>(p), t[i]);
          if (h[i] > h[imax]) imax = i;
        }
        if (h[imax].sign() <= 0) {
          changed = true;  // plate extinguished
          continue;
        }
        int lo = imax, hi = imax;
        while (lo > 0 && h[lo - 1].sign() > 0) --lo;
        while (hi < scan && h[hi + 1].sign() > 0) ++hi;
        SupportPiece np = piece;
        if (lo > 0) {
          np.a = mid + half * t[lo];
          np.soft_a = true;
          changed = true;
        }
        if (hi < scan) {
          np.b = mid + half * t[hi];
          np.soft_b = true;
          changed = true;
        }
        next.push_back(np);
      }
      if (!changed) break;
      if (next.empty())
        throw Error(ErrorClass::Convergence, "field equilibrium: support vanished");
      sup = next;
    }
    if (trims >= opts.max_trim)
      throw Error(ErrorClass::Convergence, "field equilibrium: support iteration did not settle");

    // Newton polish of the soft endpoints: the smooth factor must vanish
    // there (density behaves like a square root at a free endpoint).
    std::vector<std::pair<int, int>> soft;  // (piece, end: 0=a, 1=b)
    for (size_t p = 0; p < sup.size(); ++p) {
      if (sup[p].soft_a) soft.push_back({static_cast<int>(p), 0});
      if (sup[p].soft_b) soft.push_back({static_cast<int>(p), 1});
    }
    if (!soft.empty()) {
      auto eval = [&](const std::vector<Real>& ends) {
        std::vector<SupportPiece> s2 = sup;
        for (size_t i = 0; i < soft.size(); ++i) {
          if (soft[i].second == 0)
            s2[soft[i].first].a = ends[i];
          else
            s2[soft[i].first].b = ends[i];
        }
        FieldSolveOutput o = solveOnSupport(s2, phi, ctx, opts);
        std::vector<Real> r;
        for (size_t i = 0; i < soft.size(); ++i)
          r.push_back(
              smoothPart(o.sol, soft[i].first, soft[i].second == 0 ? Real(-1l) : Real(1l)));
        return std::make_pair(r, o);
      };
      std::vector<Real> ends;
      for (auto& s : soft) ends.push_back(s.second == 0 ? sup[s.first].a : sup[s.first].b);
      auto [r0, o0] = eval(ends);
      std::vector<Real> r = r0;
      cur = o0;
      Real width = sup[0].b - sup[0].a;
      Real fd = width * Real::exp2i(-20);
      for (int it = 0; it < 12; ++it) {
        Real rn(0l);
        for (const auto& v : r) rn = max(rn, abs(v));
        if (rn.toDouble() < 1e-13) break;
        long nsoft = static_cast<long>(soft.size());
        MatR J(nsoft, nsoft);
        for (long j = 0; j < nsoft; ++j) {
          auto e2 = ends;
          e2[j] += fd;
          auto [r2, o2] = eval(e2);
          for (long i = 0; i < nsoft; ++i) J(i, j) = (r2[i] - r[i]) / fd;
        }
        VecR rhs(r.size(), Real(0l));
        for (size_t i = 0; i < r.size(); ++i) rhs[i] = -r[i];
        VecR step = solveLeastSquares(J, rhs, ctx);
        Real cap = width / Real(10l);
        for (size_t i = 0; i < soft.size(); ++i) {
          if (step[i] > cap) step[i] = cap;
          if (step[i] < -cap) step[i] = -cap;
          ends[i] += step[i];
        }
        auto [r3, o3] = eval(ends);
        r = r3;
        cur = o3;
      }
      for (size_t i = 0; i < soft.size(); ++i) {
        if (soft[i].second == 0)
          sup[soft[i].first].a = ends[i];
        else
          sup[soft[i].first].b = ends[i];
      }
    }

    FieldEquilibrium out;
    out.trim_iterations = trims;
    out.C = cur.sol.constants[0];
    out.capacity = exp(-out.C);
    for (const auto& s : sup) out.support.push_back({s.a, s.b});
    out.lambda = measureFromSolution(cur.plates, cur.sol, 0);

    Real rs(0l);
    for (size_t p = 0; p < sup.size(); ++p) {
      Real mid = (sup[p].a + sup[p].b) / Real(2l), half = (sup[p].b - sup[p].a) / Real(2l);
      for (int i = 1; i < opts.grid; ++i) {
        Real x = mid + half * cos(Real::pi() * Real(i) / Real(opts.grid));
        Real v = potentialOfSolution(cur.plates, cur.sol, 0, x) - out.C;
        if (phi) v += phi(x);
        rs = max(rs, abs(v));
      }
    }
    out.residual_support = rs;

    Real slack(0l);
    bool have_slack = false;
    for (const auto& iv : F) {
      std::vector<Interval> gaps;
      Real lo = iv.first;
      for (const auto& s : out.support) {
        if (s.first > iv.second || s.second < iv.first) continue;
        if (s.first > lo) gaps.push_back({lo, s.first});
        lo = s.second;
      }
      if (lo < iv.second) gaps.push_back({lo, iv.second});
      for (const auto& g : gaps) {
        for (int i = 0; i <= 60; ++i) {
          Real x = g.first + (g.second - g.first) * Real(i) / Real(60l);
          Real v = potentialOfSolution(cur.plates, cur.sol, 0, x) - out.C;
          if (phi) v += phi(x);
          if (!have_slack || v < slack) {
            slack = v;
            have_slack = true;
          }
        }
      }
    }
    out.residual_slack = have_slack ? slack : Real(0l);

    if (out.residual_support.toDouble() <= opts.tol) return out;
    if (esc >= opts.escalations)
      throw Error(ErrorClass::Precision, "field equilibrium residual above tolerance",
                  out.residual_support.toDouble());
    opts.ncheb = opts.ncheb * 3 / 2;
  }
}

CondenserEquilibrium condenserEquilibrium(const Interval& E, const IntervalSet& F,
                                          const PrecisionContext& ctx, const SolveOpts& opts_in) {
  IntervalSet all = F;
  all.push_back(E);
  validateIntervalSet(all);  // also rejects overlaps
  Real tol = Real::exp2i(ctx.tol_eq_log2);
  for (const auto& iv : F) {
    Real gap = max(iv.first - E.second, E.first - iv.second);
    if (gap <= tol)
      throw Error(ErrorClass::Degenerate, "condenser plates touch (collapsing condenser)");
  }
  PrecisionScope scope(ctx.bits + 32);
  SolveOpts opts = opts_in;

  for (int esc = 0;; ++esc) {
    // Expression U^{lambda_F} - U^{lambda_E}: F plates sign +1, E sign -1.
    std::vector<Plate> plates;
    for (const auto& iv : F) plates.push_back({iv.first, iv.second, 0, +1, 0});
    plates.push_back({E.first, E.second, 1, -1, 1});
    std::vector<FieldFn> phis(plates.size());
    LinearSolution sol = solveConstancy(plates, phis, {Real(1l), Real(1l)}, 2, ctx, opts);

    CondenserEquilibrium out;
    out.C_F = sol.constants[0];
    out.C_E = sol.constants[1];
    out.w = out.C_F - out.C_E;
    if (out.w.sign() <= 0)
      throw Error(ErrorClass::Internal, "condenser solve produced nonpositive modulus");
    out.capacity = Real(1l) / out.w;
    out.rho = exp(-out.w);
    out.lambda_F = measureFromSolution(plates, sol, 0);
    out.lambda_E = measureFromSolution(plates, sol, 1);

    Real rs(0l);
    for (size_t p = 0; p < plates.size(); ++p) {
      Real mid = (plates[p].a + plates[p].b) / Real(2l),
           half = (plates[p].b - plates[p].a) / Real(2l);
      Real C = sol.constants[plates[p].cgroup];
      for (int i = 1; i < opts.grid; ++i) {
        Real x = mid + half * cos(Real::pi() * Real(i) / Real(opts.grid));
        Real v =
            potentialOfSolution(plates, sol, 0, x) - potentialOfSolution(plates, sol, 1, x) - C;
        rs = max(rs, abs(v));
      }
    }
    out.residual = rs;
    if (out.residual.toDouble() <= opts.tol) return out;
    if (esc >= opts.escalations)
      throw Error(ErrorClass::Precision, "condenser residual above tolerance",
                  out.residual.toDouble());
    opts.ncheb = opts.ncheb * 3 / 2;
  }
}

BalayageResult balayageFull(const Measure& mu, const IntervalSet& F, const PrecisionContext& ctx,
                            const SolveOpts& opts_in) {
  validateIntervalSet(F);
  if (mu.hasInfiniteAtom())
    throw Error(ErrorClass::Domain, "balayage of unbounded charge not supported");
  PrecisionScope scope(ctx.bits + 32);
  Real m = mu.mass(ctx.bits + 32);

  // supp mu inside one component of F => balayage is mu itself. Measures off
  // the real axis are always disjoint from F.
  auto hull = mu.realHullIfReal();
  if (hull) {
    bool inside = false;
    for (const auto& iv : F)
      if (hull->first >= iv.first && hull->second <= iv.second) inside = true;
    if (inside) return BalayageResult{mu, Real(0l), Real(0l), Real(0l)};
    for (const auto& iv : F)
      if (!(hull->second < iv.first || hull->first > iv.second))
        throw Error(ErrorClass::Domain, "balayage: support straddles F");
  }

  SolveOpts opts = opts_in;
  for (int esc = 0;; ++esc) {
    std::vector<Plate> plates;
    for (const auto& iv : F) plates.push_back({iv.first, iv.second, 0, +1, 0});
    FieldFn phi = [&](const Real& x) { return -mu.logPotential(Cplx(x), ctx.bits + 32); };
    std::vector<FieldFn> phis(plates.size(), phi);
    LinearSolution sol = solveConstancy(plates, phis, {m}, 1, ctx, opts);

    BalayageResult out;
    out.lambda = measureFromSolution(plates, sol, 0);
    out.C_F = sol.constants[0];
    out.mass_error = abs(out.lambda.mass(ctx.bits) - m);
    Real rs(0l);
    for (size_t p = 0; p < plates.size(); ++p) {
      Real mid = (plates[p].a + plates[p].b) / Real(2l),
           half = (plates[p].b - plates[p].a) / Real(2l);
      for (int i = 1; i < opts.grid; ++i) {
        Real x = mid + half * cos(Real::pi() * Real(i) / Real(opts.grid));
        Real v = potentialOfSolution(plates, sol, 0, x) + phi(x) - out.C_F;
        rs = max(rs, abs(v));
      }
    }
    out.residual = rs;
    if (out.residual.toDouble() <= opts.tol) return out;
    if (esc >= opts.escalations)
      throw Error(ErrorClass::Precision, "balayage residual above tolerance",
                  out.residual.toDouble());
    opts.ncheb = opts.ncheb * 3 / 2;
  }
}

Real greenPotential(const Measure& mu, const IntervalSet& F, const Cplx& z,
                    const PrecisionContext& ctx, const SolveOpts& opts) {
  validateIntervalSet(F);
  if (mu.hasInfiniteAtom()) {
    if (!mu.cheb.empty() || !mu.weights.empty() || !mu.arcs.empty() || mu.atoms.size() != 1)
      throw Error(ErrorClass::Domain, "charge at infinity must be the only component");
    FieldEquilibrium rob = robinEquilibrium(F, ctx, opts);
    return mu.atoms[0].w * (rob.C - rob.lambda.logPotential(z, ctx.bits + 32));
  }
  BalayageResult bal = balayageFull(mu, F, ctx, opts);
  return mu.logPotential(z, ctx.bits + 32) - bal.lambda.logPotential(z, ctx.bits + 32) + bal.C_F;
}

Real mutualEnergy(const Measure& mu, const Measure& nu, mpfr_prec_t bits) {
  RealFn f = [&](const Real& x) { return nu.logPotential(Cplx(x), bits); };
  return mu.integrate(f, bits, 96);
}

VectorEquilibriumResult vectorEquilibrium(const Interval& F1, const Interval& F2,
                                          const Real a[2][2], const PrecisionContext& ctx,
                                          const SolveOpts& opts) {
  validateIntervalSet({F1, F2});
  if (a[0][1] != a[1][0] || a[0][0].sign() <= 0 ||
      (a[0][0] * a[1][1] - a[0][1] * a[1][0]).sign() <= 0)
    throw Error(ErrorClass::Domain, "interaction matrix must be symmetric positive definite");
  if (a[0][1].sign() < 0)
    throw Error(ErrorClass::Domain, "interaction matrix entries must be nonnegative");
  PrecisionScope scope(ctx.bits + 32);

  Measure m1 = Measure::arcsine(F1.first, F1.second);
  Measure m2 = Measure::arcsine(F2.first, F2.second);
  Real energy_init = a[0][0] * mutualEnergy(m1, m1, ctx.bits) +
                     Real(2l) * a[0][1] * mutualEnergy(m1, m2, ctx.bits) +
                     a[1][1] * mutualEnergy(m2, m2, ctx.bits);

  VectorEquilibriumResult out;
  out.energy_init = energy_init;
  FieldEquilibrium e1, e2;
  int it = 0;
  for (; it < 60; ++it) {
    Measure m2c = m2;
    Real coupling1 = a[0][1] / a[0][0];
    FieldFn phi1 = [m2c, coupling1, &ctx](const Real& x) {
      return coupling1 * m2c.logPotential(Cplx(x), ctx.bits);
    };
    e1 = fieldEquilibrium({F1}, phi1, ctx, opts);
    Measure m1n = e1.lambda;
    Measure m1c = m1n;
    Real coupling2 = a[0][1] / a[1][1];
    FieldFn phi2 = [m1c, coupling2, &ctx](const Real& x) {
      return coupling2 * m1c.logPotential(Cplx(x), ctx.bits);
    };
    e2 = fieldEquilibrium({F2}, phi2, ctx, opts);
    Measure m2n = e2.lambda;

    Real probe1 = (F1.first + F1.second) / Real(2l);
    Real probe2 = (F2.first + F2.second) / Real(2l);
    Real change =
        abs(m1n.logPotential(Cplx(probe2), ctx.bits) - m1.logPotential(Cplx(probe2), ctx.bits)) +
        abs(m2n.logPotential(Cplx(probe1), ctx.bits) - m2.logPotential(Cplx(probe1), ctx.bits));
    m1 = std::move(m1n);
    m2 = std::move(m2n);
    if (change.toDouble() < 0.003 * opts.tol) break;
  }
  out.iterations = it + 1;
  out.comp1 = e1;
  out.comp2 = e2;
  out.energy = a[0][0] * mutualEnergy(m1, m1, ctx.bits) +
               Real(2l) * a[0][1] * mutualEnergy(m1, m2, ctx.bits) +
               a[1][1] * mutualEnergy(m2, m2, ctx.bits);
  out.residual = max(e1.residual_support * a[0][0], e2.residual_support * a[1][1]);
  return out;
}

}  // namespace ratlab
