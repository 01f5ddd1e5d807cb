#include "ratlab/zerodist.hpp"

#include <algorithm>
#include <cmath>

namespace ratlab {

CountingMeasure countingMeasure(const Poly& p, long n, const PrecisionContext& ctx) {
  if (p.isZero()) throw Error(ErrorClass::Domain, "counting measure of the zero polynomial");
  if (n <= 0) throw Error(ErrorClass::Config, "normalization must be positive");
  CountingMeasure cm;
  cm.normalization = n;
  cm.source_degree = p.degree();
  auto roots = polyRoots(p, ctx);
  cm.zeros = rootsFlat(roots);
  return cm;
}

std::vector<RefArc> refFromChebMeasure(const Measure& nu, int samples) {
  std::vector<RefArc> out;
  for (const auto& piece : nu.cheb) {
    // Mass-uniform sampling keeps the interpolated CDF accurate through the
    // endpoint density singularities.
    RefArc arc;
    Real mass = piece.mass();
    arc.points.emplace_back(Cplx(piece.a));
    arc.target_cdf.push_back(Real(0l));
    for (int i = 1; i < samples; ++i) {
      Real q = mass * Real(i) / Real(samples);
      Real t = chebDensityQuantile(piece.coeff, q, piece.a.prec());
      arc.points.emplace_back(piece.mid() + piece.half() * t);
      arc.target_cdf.push_back(q);
    }
    arc.points.emplace_back(Cplx(piece.b));
    arc.target_cdf.push_back(mass);
    out.push_back(std::move(arc));
  }
  if (out.empty()) throw Error(ErrorClass::Config, "reference measure holds no interval pieces");
  return out;
}

std::vector<RefArc> refFromArcMeasure(const Measure& nu) {
  std::vector<RefArc> out;
  for (const auto& piece : nu.arcs) {
    RefArc arc;
    arc.points = piece.polyline;
    arc.target_cdf = piece.polyline_param;
    out.push_back(std::move(arc));
  }
  if (out.empty()) throw Error(ErrorClass::Config, "reference measure holds no plane arcs");
  return out;
}

namespace {

struct Projection {
  int arc = -1;
  double dist = 1e300;
  double cdf = 0;  // target CDF value at the projected parameter
};

Projection projectPoint(const Cplx& z, const std::vector<RefArc>& ref) {
  Projection best;
  double zx = z.re.toDouble(), zy = z.im.toDouble();
  for (size_t a = 0; a < ref.size(); ++a) {
    const auto& arc = ref[a];
    for (size_t i = 1; i < arc.points.size(); ++i) {
      double ax = arc.points[i - 1].re.toDouble(), ay = arc.points[i - 1].im.toDouble();
      double bx = arc.points[i].re.toDouble(), by = arc.points[i].im.toDouble();
      double dx = bx - ax, dy = by - ay;
      double len2 = dx * dx + dy * dy;
      double t = len2 > 0 ? ((zx - ax) * dx + (zy - ay) * dy) / len2 : 0.0;
      t = std::max(0.0, std::min(1.0, t));
      double ex = zx - (ax + t * dx), ey = zy - (ay + t * dy);
      double d = std::sqrt(ex * ex + ey * ey);
      if (d < best.dist) {
        best.dist = d;
        best.arc = static_cast<int>(a);
        double c0 = arc.target_cdf[i - 1].toDouble(), c1 = arc.target_cdf[i].toDouble();
        best.cdf = c0 + t * (c1 - c0);
      }
    }
  }
  return best;
}

}  // namespace

DistanceReport weakStarDistance(const CountingMeasure& mu, const Measure& nu,
                                const std::vector<RefArc>& ref, mpfr_prec_t bits) {
  DistanceReport rep;
  Real mu_mass = mu.mass();
  Real nu_mass = nu.mass(bits);
  Real mass_scale(1l);
  if (abs(mu_mass - nu_mass) > Real(1e-6)) {
    // normalized comparison, with a warning carried by the report itself
    mass_scale = nu_mass / mu_mass;
  }

  // Project the zeros; stray ones (dist > 0.2) are excluded from the CDF
  // comparison but counted in the support distance.
  const double stray_cut = 0.2;
  std::vector<std::vector<double>> placed(ref.size());
  double worst_dist = 0;
  for (const auto& z : mu.zeros) {
    Projection pr = projectPoint(z, ref);
    worst_dist = std::max(worst_dist, pr.dist);
    if (pr.dist > stray_cut) {
      ++rep.stray_zeros;
      continue;
    }
    placed[pr.arc].push_back(pr.cdf);
  }
  rep.hausdorff_support = Real(worst_dist);

  // Kolmogorov distance per arc (max over arcs): empirical CDF of the
  // projected zeros against the target CDF along the same arc.
  double unit = mass_scale.toDouble() / static_cast<double>(mu.normalization);
  double kol = 0;
  for (size_t a = 0; a < ref.size(); ++a) {
    auto& v = placed[a];
    std::sort(v.begin(), v.end());
    double arc_lo = ref[a].target_cdf.front().toDouble();
    double arc_hi = ref[a].target_cdf.back().toDouble();
    // the gap is extremal at the jump points and at the arc end
    for (size_t i = 0; i <= v.size(); ++i) {
      double emp = static_cast<double>(i) * unit;
      double target_next = (i < v.size() ? v[i] : arc_hi) - arc_lo;
      double target_prev = (i == 0 ? arc_lo : v[i - 1]) - arc_lo;
      kol = std::max(kol, std::abs(emp - target_prev));
      kol = std::max(kol, std::abs(emp - target_next));
    }
  }
  rep.kolmogorov = Real(kol);

  // Moment distance over z^k, k <= 8.
  Real worst(0l);
  for (int k = 0; k <= 8; ++k) {
    Cplx m_mu(0l);
    for (const auto& z : mu.zeros) m_mu += pow(z, Real(static_cast<long>(k)));
    m_mu *= mass_scale / Real(mu.normalization);
    Cplx m_nu = nu.moment(k, bits);
    worst = max(worst, abs(m_mu - m_nu));
  }
  rep.moment_dist = worst;
  return rep;
}

}  // namespace ratlab
