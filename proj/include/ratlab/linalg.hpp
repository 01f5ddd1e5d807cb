#pragma once

#include <vector>

#include "ratlab/cplx.hpp"
#include "ratlab/context.hpp"

namespace ratlab {

// Dense column-major matrix over Real or Cplx.
template <class T>
class Mat {
 public:
  Mat() = default;
  Mat(long rows, long cols) : r_(rows), c_(cols), d_(static_cast<size_t>(rows * cols), T(0l)) {}
  long rows() const { return r_; }
  long cols() const { return c_; }
  T& operator()(long i, long j) { return d_[static_cast<size_t>(j * r_ + i)]; }
  const T& operator()(long i, long j) const { return d_[static_cast<size_t>(j * r_ + i)]; }
  T* col(long j) { return d_.data() + j * r_; }
  const T* col(long j) const { return d_.data() + j * r_; }

 private:
  long r_ = 0, c_ = 0;
  std::vector<T> d_;
};

using MatC = Mat<Cplx>;
using MatR = Mat<Real>;
using VecC = std::vector<Cplx>;
using VecR = std::vector<Real>;

namespace detail {
inline Real conjugate(const Real& x) { return x; }
inline Cplx conjugate(const Cplx& z) { return conj(z); }
inline Real absval(const Real& x) { return abs(x); }
inline Real absval(const Cplx& z) { return abs(z); }
}  // namespace detail

// Minimum-residual solution of M x = b by Householder QR (M may be square or
// tall). Throws on dimension mismatch or a numerically zero pivot column with
// inconsistent right-hand side.
VecC solveLeastSquares(const MatC& M, const VecC& b, const PrecisionContext& ctx);
VecR solveLeastSquares(const MatR& M, const VecR& b, const PrecisionContext& ctx);

struct SvdResult {
  std::vector<Real> sigma;  // descending
  MatC V;                   // right singular vectors, columns match sigma
};
struct SvdResultR {
  std::vector<Real> sigma;
  MatR V;
};

// One-sided Jacobi on columns. Only singular values and right vectors are
// produced; that is all the null-space extraction needs.
SvdResult jacobiSvd(const MatC& M, const PrecisionContext& ctx);
SvdResultR jacobiSvd(const MatR& M, const PrecisionContext& ctx);

// Unit-norm null-space representative: right singular vector of the smallest
// singular value, sign-fixed so the largest-magnitude entry is real positive.
// One SVD; sigma_max reports the top singular value for rank diagnostics.
VecC smallestSingularDirection(const MatC& M, const PrecisionContext& ctx,
                               Real* sigma_min = nullptr, Real* sigma_max = nullptr);
VecR smallestSingularDirection(const MatR& M, const PrecisionContext& ctx,
                               Real* sigma_min = nullptr, Real* sigma_max = nullptr);

// Unit null vector of a full-row-rank m x (m+1) system via Householder QR of
// the transpose; deterministic sign (largest entry positive).
VecR nullVectorOfWide(const MatR& A, const PrecisionContext& ctx);

Real vecNorm(const VecC& v);
Real vecNorm(const VecR& v);
VecC matVec(const MatC& M, const VecC& x);
VecR matVec(const MatR& M, const VecR& x);

}  // namespace ratlab
