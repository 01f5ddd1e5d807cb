#include "ratlab/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace ratlab {

using detail::absval;
using detail::conjugate;

Real vecNorm(const VecC& v) {
  Real s(0l);
  for (const auto& x : v) s += norm(x);
  return sqrt(s);
}
Real vecNorm(const VecR& v) {
  Real s(0l);
  for (const auto& x : v) s += x * x;
  return sqrt(s);
}

VecC matVec(const MatC& M, const VecC& x) {
  VecC y(static_cast<size_t>(M.rows()), Cplx(0l));
  for (long j = 0; j < M.cols(); ++j)
    for (long i = 0; i < M.rows(); ++i) y[i] += M(i, j) * x[j];
  return y;
}
VecR matVec(const MatR& M, const VecR& x) {
  VecR y(static_cast<size_t>(M.rows()), Real(0l));
  for (long j = 0; j < M.cols(); ++j)
    for (long i = 0; i < M.rows(); ++i) y[i] += M(i, j) * x[j];
  return y;
}

namespace {

void assign(Real& dst, const Cplx& z) { dst = z.re; }
void assign(Cplx& dst, const Cplx& z) { dst = z; }

// In-place Householder QR; returns x minimizing ||Mx - b||.
template <class T>
std::vector<T> qrSolve(Mat<T> A, std::vector<T> b, const PrecisionContext& ctx) {
  long m = A.rows(), n = A.cols();
  if (static_cast<long>(b.size()) != m)
    throw Error(ErrorClass::Domain, "solveLeastSquares: dimension mismatch");
  if (m < n) throw Error(ErrorClass::Domain, "solveLeastSquares: underdetermined system");

  Real tiny = Real::exp2i(-2 * ctx.bits);
  for (long k = 0; k < n; ++k) {
    // Householder vector for column k.
    Real colnorm(0l);
    for (long i = k; i < m; ++i) colnorm += norm(Cplx(A(i, k)));
    colnorm = sqrt(colnorm);
    if (colnorm <= tiny) {
      bool b_nonzero = false;
      for (long i = k; i < m; ++i)
        if (!(absval(b[i]) <= tiny)) b_nonzero = true;
      if (b_nonzero)
        throw Error(ErrorClass::Degenerate, "solveLeastSquares: zero column with nonzero rhs");
      continue;
    }
    T akk = A(k, k);
    Real akk_abs = absval(akk);
    // alpha = -sign(akk) * colnorm, with sign(0) = 1.
    T phase = akk_abs.isZero() ? T(1l) : akk * (Real(1l) / akk_abs);
    T alpha = phase * (-colnorm);
    std::vector<T> v(static_cast<size_t>(m - k), T(0l));
    v[0] = akk - alpha;
    for (long i = k + 1; i < m; ++i) v[i - k] = A(i, k);
    Real vnorm2(0l);
    for (auto& x : v) vnorm2 += norm(Cplx(x));
    if (vnorm2.isZero()) continue;
    A(k, k) = alpha;
    for (long i = k + 1; i < m; ++i) A(i, k) = T(0l);
    // Apply H = I - 2 v v^H / (v^H v) to remaining columns and to b.
    for (long j = k + 1; j < n; ++j) {
      T dot(0l);
      for (long i = k; i < m; ++i) dot += conjugate(v[i - k]) * A(i, j);
      T f = dot * (Real(2l) / vnorm2);
      for (long i = k; i < m; ++i) A(i, j) -= f * v[i - k];
    }
    T dot(0l);
    for (long i = k; i < m; ++i) dot += conjugate(v[i - k]) * b[i];
    T f = dot * (Real(2l) / vnorm2);
    for (long i = k; i < m; ++i) b[i] -= f * v[i - k];
  }

  // Back substitution on the n x n leading triangle.
  std::vector<T> x(static_cast<size_t>(n), T(0l));
  for (long i = n - 1; i >= 0; --i) {
    T s = b[i];
    for (long j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
    if (absval(A(i, i)) <= tiny) {
      x[i] = T(0l);  // rank-deficient direction; minimum-norm-ish choice
      continue;
    }
    x[i] = s / A(i, i);
  }
  return x;
}

template <class TMat, class TRes>
TRes jacobiCore(const TMat& M, const PrecisionContext& ctx) {
  long m = M.rows(), n = M.cols();
  TMat A = M;
  TMat V(n, n);
  for (long i = 0; i < n; ++i) V(i, i) = Real(1l);

  Real eps = Real::exp2i(-ctx.bits - 16);
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (long p = 0; p < n - 1; ++p) {
      for (long q = p + 1; q < n; ++q) {
        // 2x2 Gram block of columns p, q.
        Real app(0l), aqq(0l);
        Cplx apq(0l);
        for (long i = 0; i < m; ++i) {
          app += norm(Cplx(A(i, p)));
          aqq += norm(Cplx(A(i, q)));
          apq += Cplx(conjugate(A(i, p))) * Cplx(A(i, q));
        }
        Real off = abs(apq);
        if (off <= eps * sqrt(app * aqq) || off.isZero()) continue;
        rotated = true;
        // Complex Jacobi rotation diagonalizing [[app, apq],[apq^H, aqq]].
        Real tau = (aqq - app) / (Real(2l) * off);
        Real t = Real(1l) / (abs(tau) + sqrt(Real(1l) + tau * tau));
        if (tau.sign() < 0) t = -t;
        Real c = Real(1l) / sqrt(Real(1l) + t * t);
        Real s = c * t;
        Cplx phase = apq * (Real(1l) / off);
        // Columns: [p q] <- [p q] * [[c, s*phase],[-s*conj(phase), c]]
        auto rotate = [&](TMat& X, long rows) {
          for (long i = 0; i < rows; ++i) {
            Cplx xp(X(i, p)), xq(X(i, q));
            Cplx np = xp * c - xq * conj(phase) * s;
            Cplx nq = xp * phase * s + xq * c;
            assign(X(i, p), np);
            assign(X(i, q), nq);
          }
        };
        rotate(A, m);
        rotate(V, n);
      }
    }
    if (!rotated) break;
  }

  TRes res;
  res.V = TMat(n, n);
  std::vector<Real> sig(static_cast<size_t>(n), Real(0l));
  for (long j = 0; j < n; ++j) {
    Real s(0l);
    for (long i = 0; i < m; ++i) s += norm(Cplx(A(i, j)));
    sig[j] = sqrt(s);
  }
  std::vector<long> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0l);
  std::stable_sort(order.begin(), order.end(), [&](long a, long b) { return sig[b] < sig[a]; });
  res.sigma.resize(static_cast<size_t>(n), Real(0l));
  for (long j = 0; j < n; ++j) {
    res.sigma[j] = sig[order[j]];
    for (long i = 0; i < n; ++i) res.V(i, j) = V(i, order[j]);
  }
  return res;
}

// Minimum-norm solution of an underdetermined system via the normal equations
// of the adjoint: x = M^H (M M^H)^{-1} b. Only exercised on small systems.
template <class T>
std::vector<T> wideSolve(const Mat<T>& M, const std::vector<T>& b, const PrecisionContext& ctx) {
  long m = M.rows(), n = M.cols();
  Mat<T> N(m, m);
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < m; ++j) {
      Cplx s(0l);
      for (long k = 0; k < n; ++k) s += Cplx(M(i, k)) * Cplx(conjugate(M(j, k)));
      assign(N(i, j), s);
    }
  std::vector<T> y = qrSolve(N, b, ctx);
  std::vector<T> x(static_cast<size_t>(n), T(0l));
  for (long k = 0; k < n; ++k) {
    Cplx s(0l);
    for (long i = 0; i < m; ++i) s += Cplx(conjugate(M(i, k))) * Cplx(y[i]);
    assign(x[k], s);
  }
  return x;
}

}  // namespace

VecR nullVectorOfWide(const MatR& A, const PrecisionContext& ctx) {
  long m = A.rows(), n = A.cols();
  if (n != m + 1) throw Error(ErrorClass::Internal, "nullVectorOfWide expects m x (m+1)");
  // Householder QR of A^T ((m+1) x m); the null vector is Q e_{m+1}.
  MatR At(n, m);
  for (long i = 0; i < m; ++i)
    for (long j = 0; j < n; ++j) At(j, i) = A(i, j);
  std::vector<VecR> reflectors;
  Real t1(0l);
  for (long k = 0; k < m; ++k) {
    Real colnorm(0l);
    for (long i = k; i < n; ++i) fmadd(colnorm, At(i, k), At(i, k));
    colnorm = sqrt(colnorm);
    if (colnorm.isZero())
      throw Error(ErrorClass::Degenerate, "nullVectorOfWide: rank-deficient system");
    Real alpha = At(k, k).sign() >= 0 ? -colnorm : colnorm;
    VecR v(static_cast<size_t>(n - k), Real(0l));
    v[0] = At(k, k) - alpha;
    for (long i = k + 1; i < n; ++i) v[i - k] = At(i, k);
    Real vnorm2(0l);
    for (const auto& x : v) fmadd(vnorm2, x, x);
    if (!vnorm2.isZero()) {
      for (long j = k; j < m; ++j) {
        Real dot(0l);
        for (long i = k; i < n; ++i) fmadd(dot, v[i - k], At(i, j));
        Real f = dot * Real(2l) / vnorm2;
        for (long i = k; i < n; ++i) {
          mulInto(t1, f, v[i - k]);
          At(i, j) -= t1;
        }
      }
    }
    reflectors.push_back(std::move(v));
  }
  VecR x(static_cast<size_t>(n), Real(0l));
  x[n - 1] = Real(1l);
  for (long k = m - 1; k >= 0; --k) {
    const VecR& v = reflectors[k];
    Real vnorm2(0l);
    for (const auto& w : v) fmadd(vnorm2, w, w);
    if (vnorm2.isZero()) continue;
    Real dot(0l);
    for (long i = k; i < n; ++i) fmadd(dot, v[i - k], x[i]);
    Real f = dot * Real(2l) / vnorm2;
    for (long i = k; i < n; ++i) {
      mulInto(t1, f, v[i - k]);
      x[i] -= t1;
    }
  }
  long imax = 0;
  Real best(-1l);
  for (long i = 0; i < n; ++i)
    if (abs(x[i]) > best) {
      best = abs(x[i]);
      imax = i;
    }
  if (x[imax].sign() < 0)
    for (auto& w : x) w = -w;
  return x;
}

VecC solveLeastSquares(const MatC& M, const VecC& b, const PrecisionContext& ctx) {
  if (M.rows() < M.cols()) return wideSolve(M, b, ctx);
  return qrSolve(M, b, ctx);
}
VecR solveLeastSquares(const MatR& M, const VecR& b, const PrecisionContext& ctx) {
  if (M.rows() < M.cols()) return wideSolve(M, b, ctx);
  return qrSolve(M, b, ctx);
}

SvdResult jacobiSvd(const MatC& M, const PrecisionContext& ctx) {
  return jacobiCore<MatC, SvdResult>(M, ctx);
}

// Real one-sided Jacobi with fused in-place updates; the workhorse behind
// the moment-matrix null spaces.
SvdResultR jacobiSvd(const MatR& M, const PrecisionContext& ctx) {
  long m = M.rows(), n = M.cols();
  MatR A = M;
  MatR V(n, n);
  for (long i = 0; i < n; ++i) V(i, i) = Real(1l);

  Real eps = Real::exp2i(-ctx.bits - 16);
  Real app(0l), aqq(0l), apq(0l), t1(0l), t2(0l);
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (long p = 0; p < n - 1; ++p) {
      for (long q = p + 1; q < n; ++q) {
        mpfr_set_zero(app.raw(), 1);
        mpfr_set_zero(aqq.raw(), 1);
        mpfr_set_zero(apq.raw(), 1);
        for (long i = 0; i < m; ++i) {
          fmadd(app, A(i, p), A(i, p));
          fmadd(aqq, A(i, q), A(i, q));
          fmadd(apq, A(i, p), A(i, q));
        }
        Real off = abs(apq);
        if (off.isZero() || off <= eps * sqrt(app * aqq)) continue;
        rotated = true;
        Real tau = (aqq - app) / (Real(2l) * off);
        Real t = Real(1l) / (abs(tau) + sqrt(Real(1l) + tau * tau));
        if (tau.sign() < 0) t = -t;
        Real c = Real(1l) / sqrt(Real(1l) + t * t);
        Real s = c * t;
        if (apq.sign() < 0) s = -s;  // fold the sign of the coupling
        auto rotate = [&](MatR& X, long rows) {
          for (long i = 0; i < rows; ++i) {
            mulInto(t1, X(i, p), c);
            mulInto(t2, X(i, q), s);
            t1 -= t2;
            mulInto(t2, X(i, p), s);
            fmadd(t2, X(i, q), c);
            X(i, p) = t1;
            X(i, q) = t2;
          }
        };
        rotate(A, m);
        rotate(V, n);
      }
    }
    if (!rotated) break;
  }

  SvdResultR res;
  std::vector<Real> sig(static_cast<size_t>(n), Real(0l));
  for (long j = 0; j < n; ++j) {
    Real s(0l);
    for (long i = 0; i < m; ++i) fmadd(s, A(i, j), A(i, j));
    sig[j] = sqrt(s);
  }
  std::vector<long> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0l);
  std::stable_sort(order.begin(), order.end(), [&](long a, long b) { return sig[b] < sig[a]; });
  res.V = MatR(n, n);
  res.sigma.resize(static_cast<size_t>(n), Real(0l));
  for (long j = 0; j < n; ++j) {
    res.sigma[j] = sig[order[j]];
    for (long i = 0; i < n; ++i) res.V(i, j) = V(i, order[j]);
  }
  return res;
}

VecC smallestSingularDirection(const MatC& M, const PrecisionContext& ctx, Real* sigma_min,
                               Real* sigma_max) {
  SvdResult svd = jacobiSvd(M, ctx);
  long n = M.cols();
  VecC v(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) v[i] = svd.V(i, n - 1);
  if (sigma_min) *sigma_min = svd.sigma.back();
  if (sigma_max) *sigma_max = svd.sigma.front();
  // Canonical phase: largest entry real positive.
  long imax = 0;
  Real best(-1l);
  for (long i = 0; i < n; ++i) {
    Real a = abs(v[i]);
    if (a > best) { best = a; imax = i; }
  }
  if (!best.isZero()) {
    Cplx phase = conj(v[imax]) * (Real(1l) / best);
    for (auto& x : v) x *= phase;
  }
  Real nrm = vecNorm(v);
  if (!nrm.isZero())
    for (auto& x : v) x /= nrm;
  return v;
}

VecR smallestSingularDirection(const MatR& M, const PrecisionContext& ctx, Real* sigma_min,
                               Real* sigma_max) {
  SvdResultR svd = jacobiSvd(M, ctx);
  long n = M.cols();
  VecR v(static_cast<size_t>(n), Real(0l));
  for (long i = 0; i < n; ++i) v[i] = svd.V(i, n - 1);
  if (sigma_min) *sigma_min = svd.sigma.back();
  if (sigma_max) *sigma_max = svd.sigma.front();
  long imax = 0;
  Real best(-1l);
  for (long i = 0; i < n; ++i) {
    Real a = abs(v[i]);
    if (a > best) { best = a; imax = i; }
  }
  if (v[imax].sign() < 0)
    for (auto& x : v) x = -x;
  Real nrm = vecNorm(v);
  if (!nrm.isZero())
    for (auto& x : v) x /= nrm;
  return v;
}

}  // namespace ratlab
