#pragma once

#include "ratlab/measure.hpp"

namespace ratlab {

// Reference to a zero of A*V: either a root of A or a root of V (by index).
struct ZeroRef {
  bool is_v = false;
  int index = 0;
};

// Homotopy signature of a cell: the arcs the period conditions integrate
// over, as endpoint pairs joined by straight chords (optionally detoured
// through waypoints).
struct CellSignature {
  struct Arc {
    ZeroRef from, to;
    std::vector<Cplx> waypoints;
  };
  std::vector<Arc> arcs;

  // Star of arcs from the single V-root to every root of A (p = 3), the
  // Chebotarev configuration.
  static CellSignature star(int p);
};

struct PeriodResidual {
  std::vector<Real> values;  // Re of each arc period
  Real norm;                 // max |value|
};

struct PeriodSolveResult {
  Poly V;
  std::vector<Cplx> v;
  PeriodResidual residual;
  int iterations = 0;
  // v_j landing on a root of A: reported as genus reduction, not failure.
  std::vector<std::pair<int, int>> cancellations;  // (v index, a index)
};

struct ArcSample {
  Cplx z;
  Real nu;       // Im of the accumulated Abelian integral; d(mass) = d(nu)/pi
  Cplx tangent;  // unit field direction at z
};

struct TracedArc {
  int start_zero = -1, end_zero = -1;  // indices into TraceResult::zeros; -1 = open
  bool closed = true;                  // terminated on a zero of A*V
  std::vector<ArcSample> samples;
  Real nu_end;                  // total Im G along the arc; mass = nu_end/pi
  Real max_angle_defect;        // worst |arg(-(V/A) zdot^2)| at interior samples
};

struct TraceOpts {
  double base_step = 0.003;    // relative to the configuration scale
  double capture_radius = 5e-4;
  int max_steps = 40000;
};

struct TraceResult {
  Poly A_red, V_red;                      // after common-root cancellation
  std::vector<Cplx> zeros;                // zeros of A_red * V_red
  std::vector<int> zero_order;            // local QD order m (-1 for A-zeros, k for V-zeros)
  std::vector<TracedArc> arcs;
  Real scale;
  std::vector<std::pair<int, int>> cancellations;
};

struct SMeasureReport {
  Measure mu;                      // unit Robin measure on the traced compact
  Real mass_error;                 // |total - 1|
  std::vector<Real> arc_masses;
  std::vector<Real> arc_potentials;  // U^mu at an interior point of each arc
  Real potential_spread;           // max deviation of U^mu over on-arc samples
  Real s_mismatch_max;             // worst |dU/dn1 - dU/dn2| at interior samples
};

// Damped Gauss-Newton on Re Int_{arc} sqrt(V/A) = 0 over the signature arcs.
PeriodSolveResult periodSolve(const Poly& A, const CellSignature& cell,
                              const std::vector<Cplx>& v0, const PrecisionContext& ctx);

// W (monic, degree p-2) with Re of all periods of W dt / sqrt(AV) vanishing;
// confluent roots of AV are cancelled pairwise (reduced genus) first.
Poly phiMap(const Poly& A, const Poly& V, const PrecisionContext& ctx);

TraceResult traceTrajectories(const Poly& A, const Poly& V, const PrecisionContext& ctx,
                              const TraceOpts& opts = {});

SMeasureReport sMeasureFromV(const Poly& A, const Poly& V, const TraceResult& tr,
                             const PrecisionContext& ctx);

// g(z) = Re Int_a^z sqrt(V/A) dt along a path avoiding the traced arcs.
Real greenViaAbelian(const Poly& A, const Poly& V, const TraceResult& tr, const Cplx& z,
                     const PrecisionContext& ctx);

using PlaneField = std::function<Cplx(const Cplx&)>;

// Central finite difference (with Richardson) of the energy of the node-
// transported measure z -> z + t h(z). When e_vanish is given, h must vanish
// there (the admissibility condition of the critical-measure variation).
Real energyVariation(const Measure& mu, const PlaneField& h, const PrecisionContext& ctx,
                     const std::vector<Cplx>* e_vanish = nullptr);

}  // namespace ratlab
