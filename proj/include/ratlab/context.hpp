#pragma once

#include <stdexcept>
#include <string>

namespace ratlab {

// Error classes surface in CLI exit codes and structured error output.
enum class ErrorClass {
  Config,       // bad user input / unknown experiment / malformed config
  Domain,       // precondition violated (overlapping intervals, node on support, ...)
  Convergence,  // iteration failed to reach tolerance
  Precision,    // requested accuracy unreachable at the given bit count
  Degenerate,   // structurally degenerate problem (touching plates, rank collapse)
  Io,           // file system / serialization
  Internal,
};

const char* errorClassName(ErrorClass c);
int errorClassExitCode(ErrorClass c);

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string msg, double residual = 0.0)
      : std::runtime_error(std::move(msg)), cls_(cls), residual_(residual) {}
  ErrorClass cls() const { return cls_; }
  // Best residual reached before giving up, when meaningful.
  double residual() const { return residual_; }

 private:
  ErrorClass cls_;
  double residual_;
};

// Binary working precision plus the derived tolerances used throughout.
// tol_eq is the generic "equal up to rounding noise" threshold, tol_newton
// the stopping tolerance of the geometric Newton solvers.
struct PrecisionContext {
  long bits = 256;
  double tol_eq_log2 = -128.0;      // tol_eq = 2^tol_eq_log2
  double tol_newton_log2 = -64.0;   // tol_newton = 2^tol_newton_log2

  static PrecisionContext withBits(long bits) {
    if (bits < 64) throw Error(ErrorClass::Config, "precision must be at least 64 bits");
    PrecisionContext c;
    c.bits = bits;
    c.tol_eq_log2 = -static_cast<double>(bits) / 2;
    c.tol_newton_log2 = -static_cast<double>(bits) / 4;
    return c;
  }

  // Hankel-type Pade systems lose O(n) digits; degree-aware default.
  static PrecisionContext forDegree(long n) {
    return withBits(std::max(256l, 12 * n));
  }
};

}  // namespace ratlab
