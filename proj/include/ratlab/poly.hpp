#pragma once

#include <vector>

#include "ratlab/cplx.hpp"
#include "ratlab/context.hpp"

namespace ratlab {

// Dense polynomial with complex coefficients, ascending powers.
// The zero polynomial is the empty coefficient vector.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Cplx> coeffs) : c_(std::move(coeffs)) { trim(); }
  static Poly constant(Cplx v) { return Poly(std::vector<Cplx>{std::move(v)}); }
  static Poly x() { return Poly({Cplx(0l), Cplx(1l)}); }
  static Poly fromRoots(const std::vector<Cplx>& roots, const Cplx& lead = Cplx(1l));

  bool isZero() const { return c_.empty(); }
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  const std::vector<Cplx>& coeffs() const { return c_; }
  const Cplx& operator[](size_t i) const { return c_[i]; }
  Cplx& at(size_t i) { return c_[i]; }
  const Cplx& lead() const { return c_.back(); }
  bool isMonic(double tol = 0.0) const;

  Cplx operator()(const Cplx& z) const;  // Horner
  Real operator()(const Real& x) const;  // real path, real coefficients assumed

  Poly derivative() const;
  Poly monic() const;
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly operator*(const Cplx& s) const;
  // p(a*x + b)
  Poly composeAffine(const Cplx& a, const Cplx& b) const;
  // p(x^2)
  Poly composeSquare() const;

  Real maxCoeffAbs() const;
  // Drop trailing coefficients of magnitude <= eps * max |c_k|.
  void trimTo(const Real& eps);

 private:
  void trim();  // exact zeros only
  std::vector<Cplx> c_;
};

struct RootWithMultiplicity {
  Cplx z;
  int multiplicity = 1;
};

struct RootResult {
  std::vector<RootWithMultiplicity> roots;  // lexicographic (Re, then Im)
  Real residual;                            // coefficientwise reconstruction error, relative
  bool clustered = false;                   // multiplicities were merged
};

// All roots of p by Aberth-Ehrlich simultaneous iteration with a cluster
// post-pass that restores exact multiplicities when that lowers the
// reconstruction residual. Deterministic for fixed inputs and context.
RootResult polyRoots(const Poly& p, const PrecisionContext& ctx);

// Flat expansion of the multiplicity form, still sorted.
std::vector<Cplx> rootsFlat(const RootResult& r);

}  // namespace ratlab
