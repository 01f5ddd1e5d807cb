#pragma once

#include "ratlab/measure.hpp"
#include "ratlab/poly.hpp"

namespace ratlab {

struct CountingMeasure {
  std::vector<Cplx> zeros;  // with multiplicity, flattened
  long normalization = 1;   // mass = zeros.size()/normalization
  long source_degree = 0;

  Real mass() const { return Real(static_cast<long>(zeros.size())) / Real(normalization); }
};

CountingMeasure countingMeasure(const Poly& p, long n, const PrecisionContext& ctx);

// Reference arc system for the weak-* comparison: either real intervals or
// plane polylines (traced trajectories), each with the target measure's CDF
// along it.
struct RefArc {
  // Polyline with the cumulative target-measure parameter at each vertex.
  std::vector<Cplx> points;
  std::vector<Real> target_cdf;  // same length; nondecreasing, in mass units
};

struct DistanceReport {
  Real kolmogorov;        // sup CDF gap along the reference system
  Real moment_dist;       // max_k |moment_k difference|, k <= 8
  Real hausdorff_support; // max projection distance of the counted zeros
  long stray_zeros = 0;   // zeros farther than 0.2 from the system (excluded)
};

// Reference system built from a real-interval measure (single ChebPiece) or
// the arcs of a traced compact.
std::vector<RefArc> refFromChebMeasure(const Measure& nu, int samples = 2048);
std::vector<RefArc> refFromArcMeasure(const Measure& nu);

DistanceReport weakStarDistance(const CountingMeasure& mu, const Measure& nu,
                                const std::vector<RefArc>& ref, mpfr_prec_t bits);

}  // namespace ratlab
