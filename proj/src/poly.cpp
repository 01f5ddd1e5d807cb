#include "ratlab/poly.hpp"

#include <algorithm>

namespace ratlab {

Poly Poly::fromRoots(const std::vector<Cplx>& roots, const Cplx& lead) {
  Poly p = Poly::constant(lead);
  for (const Cplx& r : roots) p = p * Poly({-r, Cplx(1l)});
  return p;
}

void Poly::trim() {
  while (!c_.empty() && c_.back().isZero()) c_.pop_back();
}

bool Poly::isMonic(double tol) const {
  if (c_.empty()) return false;
  Cplx d = c_.back() - Cplx(1l);
  return abs(d).toDouble() <= tol;
}

Cplx Poly::operator()(const Cplx& z) const {
  if (c_.empty()) return Cplx(0l);
  Cplx acc = c_.back();
  for (size_t i = c_.size() - 1; i-- > 0;) {
    acc *= z;
    acc += c_[i];
  }
  return acc;
}

Real Poly::operator()(const Real& x) const {
  if (c_.empty()) return Real(0l);
  Real acc = c_.back().re;
  for (size_t i = c_.size() - 1; i-- > 0;) {
    acc *= x;
    acc += c_[i].re;
  }
  return acc;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly();
  std::vector<Cplx> d(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * Real(static_cast<long>(i));
  return Poly(std::move(d));
}

Poly Poly::monic() const {
  if (c_.empty()) throw Error(ErrorClass::Domain, "monic of zero polynomial");
  std::vector<Cplx> d(c_.size());
  for (size_t i = 0; i < c_.size(); ++i) d[i] = c_[i] / c_.back();
  return Poly(std::move(d));
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<Cplx> r(std::max(a.c_.size(), b.c_.size()), Cplx(0l));
  for (size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
  return Poly(std::move(r));
}

Poly operator-(const Poly& a, const Poly& b) {
  std::vector<Cplx> r(std::max(a.c_.size(), b.c_.size()), Cplx(0l));
  for (size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) r[i] -= b.c_[i];
  return Poly(std::move(r));
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.isZero() || b.isZero()) return Poly();
  std::vector<Cplx> r(a.c_.size() + b.c_.size() - 1, Cplx(0l));
  for (size_t i = 0; i < a.c_.size(); ++i)
    for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
  return Poly(std::move(r));
}

Poly Poly::operator*(const Cplx& s) const {
  std::vector<Cplx> r(c_);
  for (auto& v : r) v *= s;
  return Poly(std::move(r));
}

Poly Poly::composeAffine(const Cplx& a, const Cplx& b) const {
  // Horner in the affine argument.
  Poly acc;
  Poly lin({b, a});
  for (size_t i = c_.size(); i-- > 0;) {
    acc = acc * lin;
    acc = acc + Poly::constant(c_[i]);
  }
  return acc;
}

Poly Poly::composeSquare() const {
  if (c_.empty()) return Poly();
  std::vector<Cplx> r(2 * c_.size() - 1, Cplx(0l));
  for (size_t i = 0; i < c_.size(); ++i) r[2 * i] = c_[i];
  return Poly(std::move(r));
}

Real Poly::maxCoeffAbs() const {
  Real m(0l);
  for (const auto& v : c_) m = max(m, abs(v));
  return m;
}

void Poly::trimTo(const Real& eps) {
  Real cut = eps * maxCoeffAbs();
  while (!c_.empty() && abs(c_.back()) <= cut) c_.pop_back();
}

std::vector<Cplx> rootsFlat(const RootResult& r) {
  std::vector<Cplx> out;
  for (const auto& rm : r.roots)
    for (int i = 0; i < rm.multiplicity; ++i) out.push_back(rm.z);
  return out;
}

namespace {

// Coefficientwise reconstruction error of lead * prod (z - r_i) against p,
// relative to the largest coefficient of p.
Real reconstructionResidual(const Poly& p, const std::vector<Cplx>& roots) {
  Poly q = Poly::fromRoots(roots, p.lead());
  Real m = p.maxCoeffAbs();
  Real worst(0l);
  long n = std::max(p.degree(), q.degree());
  for (long i = 0; i <= n; ++i) {
    Cplx a = i <= p.degree() ? p[i] : Cplx(0l);
    Cplx b = i <= q.degree() ? q[i] : Cplx(0l);
    worst = max(worst, abs(a - b));
  }
  return worst / m;
}

// Newton refinement of an m-fold root via the (m-1)-th derivative.
Cplx refineMultiple(const Poly& p, Cplx z, int m, int iters) {
  Poly d = p;
  for (int i = 1; i < m; ++i) d = d.derivative();
  Poly dp = d.derivative();
  for (int it = 0; it < iters; ++it) {
    Cplx f = d(z);
    Cplx g = dp(z);
    if (g.isZero()) break;
    z -= f / g;
  }
  return z;
}

}  // namespace

RootResult polyRoots(const Poly& p, const PrecisionContext& ctx) {
  if (p.isZero()) throw Error(ErrorClass::Domain, "polyRoots of zero polynomial");
  long deg = p.degree();
  RootResult out;
  out.residual = Real(0l);
  if (deg == 0) return out;

  long work_bits = ctx.bits + 64;
  PrecisionScope scope(work_bits);

  // Factor out exact zero roots first.
  std::vector<Cplx> c = p.coeffs();
  int zero_mult = 0;
  while (!c.empty() && c.front().isZero()) {
    c.erase(c.begin());
    ++zero_mult;
  }
  Poly q{std::vector<Cplx>(c)};
  long n = q.degree();

  std::vector<Cplx> z;
  if (n > 0) {
    // Starting circle: Cauchy-style radius, deterministic angle offset.
    Real r(1l);
    Real la = abs(q.lead());
    for (long i = 0; i < n; ++i) r = max(r, abs(q[i]) / la);
    r += Real(1l);
    Real pi = Real::pi();
    for (long i = 0; i < n; ++i) {
      Real theta = pi * Real(2 * i + 1) / Real(n) + Real(0.3969);
      z.emplace_back(r * cos(theta), r * sin(theta));
    }

    Poly dq = q.derivative();
    Real stop = Real::exp2i(-static_cast<double>(work_bits) + 24);
    long maxit = 200 + 4 * n;
    bool converged = false;
    for (long it = 0; it < maxit && !converged; ++it) {
      Real step_max(0l);
      for (long i = 0; i < n; ++i) {
        Cplx pv = q(z[i]);
        if (pv.isZero()) continue;
        Cplx dv = dq(z[i]);
        Cplx w = dv.isZero() ? Cplx(0l) : pv / dv;
        Cplx s(0l);
        for (long j = 0; j < n; ++j) {
          if (j == i) continue;
          Cplx d = z[i] - z[j];
          if (d.isZero()) d = Cplx(Real::exp2i(-work_bits), Real(0l));
          s += Cplx(1l) / d;
        }
        Cplx denom = Cplx(1l) - w * s;
        Cplx delta = denom.isZero() ? w : w / denom;
        z[i] -= delta;
        Real rel = abs(delta) / max(Real(1l), abs(z[i]));
        step_max = max(step_max, rel);
      }
      converged = step_max < stop;
    }
    out.residual = reconstructionResidual(q, z);
    Real tol = Real::exp2i(ctx.tol_eq_log2);
    if (!converged && out.residual > tol) {
      // Cluster pass below may still fix it; if not, report.
      ;
    }

    // Cluster detection: roots closer than a multiplicity-aware threshold are
    // candidates for a common multiple root.
    Real cluster_eps = Real::exp2i(-static_cast<double>(ctx.bits) / 4);
    std::vector<int> comp(n);
    for (long i = 0; i < n; ++i) comp[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int a) {
      while (comp[a] != a) a = comp[a] = comp[comp[a]];
      return a;
    };
    for (long i = 0; i < n; ++i)
      for (long j = i + 1; j < n; ++j) {
        Real scale = max(Real(1l), abs(z[i]));
        if (abs(z[i] - z[j]) <= cluster_eps * scale) comp[find(static_cast<int>(i))] = find(static_cast<int>(j));
      }
    std::vector<std::vector<int>> groups(n);
    for (long i = 0; i < n; ++i) groups[find(static_cast<int>(i))].push_back(static_cast<int>(i));

    bool any_cluster = false;
    std::vector<Cplx> z2 = z;
    for (auto& g : groups) {
      if (g.size() < 2) continue;
      any_cluster = true;
      Cplx centroid(0l);
      for (int idx : g) centroid += z[idx];
      centroid /= Real(static_cast<long>(g.size()));
      Cplx refined = refineMultiple(q, centroid, static_cast<int>(g.size()), 40);
      for (int idx : g) z2[idx] = refined;
    }
    if (any_cluster) {
      Real res2 = reconstructionResidual(q, z2);
      if (res2 <= out.residual) {
        z = z2;
        out.residual = res2;
        out.clustered = true;
      }
    }
  }

  for (int i = 0; i < zero_mult; ++i) z.push_back(Cplx(0l));
  std::sort(z.begin(), z.end(), lexLess);

  Real tol = Real::exp2i(ctx.tol_eq_log2);
  if (out.residual > tol)
    throw Error(ErrorClass::Convergence, "polyRoots did not reach requested precision",
                out.residual.toDouble());

  // Merge identical (post-clustering) roots into multiplicity form.
  for (const Cplx& zi : z) {
    if (!out.roots.empty() && out.roots.back().z == zi)
      out.roots.back().multiplicity++;
    else
      out.roots.push_back({zi, 1});
  }
  return out;
}

}  // namespace ratlab
