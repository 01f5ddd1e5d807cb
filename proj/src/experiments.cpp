#include "ratlab/experiments.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "json.hpp"
#include "ratlab/funcs.hpp"
#include "ratlab/io.hpp"
#include "ratlab/minimax.hpp"
#include "ratlab/rates.hpp"
#include "ratlab/scompact.hpp"
#include "ratlab/zerodist.hpp"

namespace ratlab {

using nlohmann::json;

std::string ExperimentConfig::canonical() const {
  std::string s = "name=" + name + ";version=" + kVersion +
                  ";bits=" + std::to_string(precision_bits);
  for (const auto& [k, v] : params) s += ";" + k + "=" + v;
  return s;
}

std::string ExperimentConfig::hash() const { return hashHex(fnv1a64(canonical())); }

long ExperimentConfig::paramInt(const std::string& key, long fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  return std::stol(it->second);
}

double ExperimentConfig::paramDouble(const std::string& key, double fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  return std::stod(it->second);
}

namespace {

void checkKeys(const ExperimentConfig& cfg, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : cfg.params)
    if (!allowed.count(k))
      throw Error(ErrorClass::Config, "unknown parameter '" + k + "' for " + cfg.name);
}

json configJson(const ExperimentConfig& cfg, long bits_used) {
  json j;
  j["experiment"] = cfg.name;
  j["version"] = kVersion;
  j["bits"] = bits_used;
  json p = json::object();
  for (const auto& [k, v] : cfg.params) p[k] = v;
  j["params"] = p;
  return j;
}

std::string tableHeader(const ExperimentConfig& cfg, long bits) {
  return "# " + cfg.canonical() + ";bits_used=" + std::to_string(bits) + "\n";
}

// ---- shared building blocks -------------------------------------------------

struct MarkovSetup {
  MarkovFunction f;
  Interval E;
  CondenserEquilibrium ce;
};

MarkovSetup markovSetup(const PrecisionContext& ctx) {
  MarkovSetup s{MarkovFunction::fromMeasure(Measure::lebesgue(Real(-1l), Real(-0.25)), ctx.bits),
                {Real(0l), Real(1l)},
                {}};
  s.ce = condenserEquilibrium(s.E, {{s.f.f_lo, s.f.f_hi}}, ctx);
  return s;
}

AlgebraicFunction cubeRootsElement() {
  AlgebraicFunction f;
  PrecisionScope scope(Real::defaultPrec());
  Real half(0.5);
  Real s3 = sqrt(Real(3l)) / Real(2l);
  f.branch_points = {Cplx(0l), Cplx(1l), Cplx(-half, s3), Cplx(-half, -s3)};
  f.exponents = {Real(1.5), Real(-0.5), Real(-0.5), Real(-0.5)};
  return f;
}

struct StarGeometry {
  Poly A, V;
  TraceResult trace;
  SMeasureReport robin;
};

StarGeometry starGeometry(const PrecisionContext& ctx) {
  StarGeometry g;
  g.A = Poly({Cplx(-1l), Cplx(0l), Cplx(0l), Cplx(1l)});
  g.V = Poly({Cplx(0l), Cplx(1l)});
  g.trace = traceTrajectories(g.A, g.V, ctx);
  g.robin = sMeasureFromV(g.A, g.V, g.trace, ctx);
  return g;
}

// ---- experiments ------------------------------------------------------------

ExperimentResult runRho2Markov(const ExperimentConfig& cfg, bool walsh_view) {
  checkKeys(cfg, {"n_min", "n_max", "n_step"});
  long n_min = cfg.paramInt("n_min", 8);
  long n_max = cfg.paramInt("n_max", 32);
  long n_step = cfg.paramInt("n_step", walsh_view ? 4 : 4);
  long bits = cfg.precision_bits ? cfg.precision_bits : std::max(384l, 12 * n_max);
  auto ctx = PrecisionContext::withBits(bits);
  PrecisionScope scope(ctx.bits);

  MarkovSetup s = markovSetup(ctx);
  Real rho = s.ce.rho;
  Real rho2 = rho * rho;

  std::string csv = tableHeader(cfg, bits);
  csv += "n,error,error_nth_root,rho,rho2,root_over_rho2\n";
  Real final_gap(0l);
  Real worst_walsh(0l);
  for (long n = n_min; n <= n_max; n += n_step) {
    auto nb = nearBestInterpolant(s.f, s.E, static_cast<int>(n), ctx);
    Real root = exp(log(nb.sup_error) / Real(n));
    Real ratio = root / rho2;
    final_gap = abs(root - rho2) / rho2;
    worst_walsh = max(worst_walsh, root / rho);
    csv += csvLine({std::to_string(n), fmtReal(nb.sup_error), fmtReal(root), fmtReal(rho),
                    fmtReal(rho2), fmtReal(ratio)});
  }

  ExperimentResult out;
  out.name = cfg.name;
  json j = configJson(cfg, bits);
  j["rho"] = fmtReal(rho);
  j["rho2"] = fmtReal(rho2);
  j["capacity"] = fmtReal(s.ce.capacity);
  j["final_relative_gap"] = fmtReal(final_gap);
  j["max_root_over_rho"] = fmtReal(worst_walsh);
  out.summary = j.dump(2);
  out.tables.push_back({walsh_view ? "walsh_bound.csv" : "rho2_markov.csv", csv});
  return out;
}

ExperimentResult runStahlCubeRoots(const ExperimentConfig& cfg) {
  checkKeys(cfg, {"n"});
  long n = cfg.paramInt("n", 60);
  long bits = cfg.precision_bits ? cfg.precision_bits : std::max(256l, 12 * n);
  auto ctx = PrecisionContext::withBits(bits);
  PrecisionScope scope(ctx.bits);

  AlgebraicFunction f = cubeRootsElement();
  auto series = seriesAtInfinity(f, static_cast<int>(2 * n + 2), ctx);
  auto pade = diagonalPade(series, static_cast<int>(n), ctx);

  auto geo_ctx = PrecisionContext::withBits(320);
  StarGeometry geo = starGeometry(geo_ctx);
  auto cm = countingMeasure(pade.Q, n, ctx);
  auto ref = refFromArcMeasure(geo.robin.mu);
  auto rep = weakStarDistance(cm, geo.robin.mu, ref, ctx.bits);

  // complex orthogonality residual on |z| = 3
  WeightSpec w;
  w.kind = WeightSpec::Kind::Contour;
  w.center = Cplx(0l);
  w.radius = Real(3l);
  w.contour_fn = [f](const Cplx& z) { return f.evalOutside(z); };
  w.contour_points = 4096;
  Real resid = orthogonalityResidual(pade.Q, w, ctx);

  long close = 0;
  std::string csv = tableHeader(cfg, bits);
  csv += "re,im\n";
  for (const auto& z : cm.zeros) {
    csv += csvLine({fmtReal(z.re), fmtReal(z.im)});
  }
  // fraction within 0.05 of the trajectories
  for (const auto& z : cm.zeros) {
    double best = 1e300;
    for (const auto& arc : geo.trace.arcs)
      for (const auto& sm : arc.samples) {
        double d = abs(z - sm.z).toDouble();
        best = std::min(best, d);
      }
    if (best <= 0.05) ++close;
  }

  ExperimentResult out;
  out.name = cfg.name;
  json j = configJson(cfg, bits);
  j["kolmogorov"] = fmtReal(rep.kolmogorov);
  j["moment_dist"] = fmtReal(rep.moment_dist);
  j["stray_zeros"] = rep.stray_zeros;
  j["close_fraction"] = static_cast<double>(close) / static_cast<double>(cm.zeros.size());
  j["orthogonality_residual"] = fmtReal(resid);
  j["rank_gap"] = fmtReal(pade.rank_gap);
  out.summary = j.dump(2);
  out.tables.push_back({"zeros.csv", csv});
  return out;
}

ExperimentResult runStabilityLe(const ExperimentConfig& cfg) {
  checkKeys(cfg, {"n", "n_min", "perturbation"});
  long n_max = cfg.paramInt("n", 60);
  long n_min = cfg.paramInt("n_min", n_max);
  double pert = cfg.paramDouble("perturbation", 0.3);
  long bits = cfg.precision_bits ? cfg.precision_bits : std::max(256l, 12 * n_max);
  auto ctx = PrecisionContext::withBits(bits);
  PrecisionScope scope(ctx.bits);

  auto geo_ctx = PrecisionContext::withBits(320);
  StarGeometry geo = starGeometry(geo_ctx);
  auto ref = refFromArcMeasure(geo.robin.mu);

  std::string csv = tableHeader(cfg, bits);
  csv += "n,kolmogorov,stray\n";
  Real last(0l);
  for (long n = n_min; n <= n_max; n += std::max<long>(1, (n_max - n_min) / 2)) {
    // exponents drifting to a generic limit: alpha_k(n) = alpha_k + d_k/sqrt(n)
    AlgebraicFunction fn = cubeRootsElement();
    Real eps = Real(pert) / sqrt(Real(n));
    fn.exponents[1] += eps;
    fn.exponents[2] += eps * Real(-2l);
    fn.exponents[3] += eps;
    auto series = seriesAtInfinity(fn, static_cast<int>(2 * n + 2), ctx);
    auto pade = diagonalPade(series, static_cast<int>(n), ctx);
    auto cm = countingMeasure(pade.Q, n, ctx);
    auto rep = weakStarDistance(cm, geo.robin.mu, ref, ctx.bits);
    last = rep.kolmogorov;
    csv += csvLine({std::to_string(n), fmtReal(rep.kolmogorov),
                    std::to_string(rep.stray_zeros)});
    if (n == n_max) break;
  }

  ExperimentResult out;
  out.name = cfg.name;
  json j = configJson(cfg, bits);
  j["final_kolmogorov"] = fmtReal(last);
  out.summary = j.dump(2);
  out.tables.push_back({"stability.csv", csv});
  return out;
}

ExperimentResult runAbsX(const ExperimentConfig& cfg) {
  checkKeys(cfg, {"n_min", "n_max", "n_step"});
  long n_min = cfg.paramInt("n_min", 4);
  long n_max = cfg.paramInt("n_max", 16);
  long n_step = cfg.paramInt("n_step", 2);
  long bits = cfg.precision_bits ? cfg.precision_bits : 512;
  auto ctx = PrecisionContext::withBits(bits);
  PrecisionScope scope(ctx.bits);

  RealFn f = [](const Real& x) { return abs(x); };
  MinimaxOpts opts;
  opts.even_reduction = true;

  std::vector<RateEntry> series;
  std::string csv = tableHeader(cfg, bits);
  csv += "n,error,certified,error_exp_pi_sqrt_n,log_error_over_sqrt_n\n";
  for (long n = n_min; n <= n_max; n += n_step) {
    auto res = rationalMinimax(f, {Real(-1l), Real(1l)}, static_cast<int>(n), ctx, opts);
    Real rn = sqrt(Real(n));
    Real scaled = res.error * exp(Real::pi() * rn);
    Real logrt = log(res.error) / rn;
    series.push_back({static_cast<int>(n), res.error});
    csv += csvLine({std::to_string(n), fmtReal(res.error), res.certified ? "1" : "0",
                    fmtReal(scaled), fmtReal(logrt)});
  }

  ExperimentResult out;
  out.name = cfg.name;
  json j = configJson(cfg, bits);
  if (series.size() >= 4) {
    auto rep = rateReport(series, RateLaw::SqrtN);
    j["extrapolated_limit"] = fmtReal(rep.estimate);
    j["last_scaled"] = fmtReal(rep.raw.back());
  } else {
    j["extrapolated_limit"] = nullptr;  // too few entries for extrapolation
  }
  out.summary = j.dump(2);
  out.tables.push_back({"abs_x.csv", csv});
  return out;
}

ExperimentResult runExpHalfline(const ExperimentConfig& cfg) {
  checkKeys(cfg, {"n_min", "n_max"});
  long n_min = cfg.paramInt("n_min", 6);
  long n_max = cfg.paramInt("n_max", 12);
  long bits = cfg.precision_bits ? cfg.precision_bits : 512;
  auto ctx = PrecisionContext::withBits(bits);
  PrecisionScope scope(ctx.bits);

  RealFn f = [](const Real& x) {
    if (x.isInf()) return Real(0l);
    return exp(-x);
  };
  MinimaxOpts opts;
  opts.mobius_semiaxis = true;

  std::vector<RateEntry> series;
  std::string csv = tableHeader(cfg, bits);
  csv += "n,error,certified,ratio_to_previous\n";
  Real prev(0l);
  for (long n = n_min; n <= n_max; ++n) {
    auto res = rationalMinimax(f, {Real(0l), Real(1l)}, static_cast<int>(n), ctx, opts);
    series.push_back({static_cast<int>(n), res.error});
    std::string ratio = prev.isZero() ? "" : fmtReal(res.error / prev);
    prev = res.error;
    csv += csvLine({std::to_string(n), fmtReal(res.error), res.certified ? "1" : "0", ratio});
  }

  ExperimentResult out;
  out.name = cfg.name;
  json j = configJson(cfg, bits);
  if (series.size() >= 4) {
    auto rep = rateReport(series, RateLaw::Halphen);
    j["fit_prefactor"] = fmtReal(rep.estimate);
    j["fit_ratio"] = fmtReal(rep.fit_v);
    j["fit_residual"] = fmtReal(rep.fit_residual);
  } else {
    j["fit_prefactor"] = nullptr;
  }
  out.summary = j.dump(2);
  out.tables.push_back({"exp_halfline.csv", csv});
  return out;
}

ExperimentResult runVaryingWeight(const ExperimentConfig& cfg) {
  checkKeys(cfg, {"n"});
  long n = cfg.paramInt("n", 80);
  long bits = cfg.precision_bits ? cfg.precision_bits : std::max(384l, 12 * n);
  auto ctx = PrecisionContext::withBits(bits);
  PrecisionScope scope(ctx.bits);

  FieldFn phi = [](const Real& x) { return x * x; };
  auto eq = fieldEquilibrium({{Real(-3l), Real(3l)}}, phi, ctx);

  Measure sigma = Measure::lebesgue(Real(-3l), Real(3l));
  std::pair<Real, Real> hint{eq.support[0].first * Real(1.3), eq.support[0].second * Real(1.3)};
  Poly Q = varyingWeightOrtho(sigma, phi, static_cast<int>(n), ctx, 0, &hint);
  auto cm = countingMeasure(Q, n, ctx);
  auto ref = refFromChebMeasure(eq.lambda);
  auto rep = weakStarDistance(cm, eq.lambda, ref, ctx.bits);

  std::string csv = tableHeader(cfg, bits);
  csv += "x,density,zero_x\n";
  for (int i = 0; i <= 200; ++i) {
    Real x = eq.support[0].first +
             (eq.support[0].second - eq.support[0].first) * Real(i) / Real(200l);
    std::string zx = i < static_cast<int>(cm.zeros.size()) ? fmtReal(cm.zeros[i].re) : "";
    csv += csvLine({fmtReal(x), fmtReal(eq.lambda.cheb[0].density(x)), zx});
  }

  ExperimentResult out;
  out.name = cfg.name;
  json j = configJson(cfg, bits);
  j["support_lo"] = fmtReal(eq.support[0].first);
  j["support_hi"] = fmtReal(eq.support[0].second);
  j["eqm_residual"] = fmtReal(eq.residual_support);
  j["kolmogorov"] = fmtReal(rep.kolmogorov);
  out.summary = j.dump(2);
  out.tables.push_back({"varying_weight.csv", csv});
  return out;
}

}  // namespace

std::vector<std::string> experimentList() {
  return {"rho2-markov", "walsh-bound", "stahl-cuberoots", "stability-le",
          "abs-x",       "exp-halfline", "varying-weight"};
}

bool experimentExists(const std::string& name) {
  auto l = experimentList();
  return std::find(l.begin(), l.end(), name) != l.end();
}

ExperimentResult runExperiment(const ExperimentConfig& cfg) {
  if (cfg.name == "rho2-markov") return runRho2Markov(cfg, false);
  if (cfg.name == "walsh-bound") return runRho2Markov(cfg, true);
  if (cfg.name == "stahl-cuberoots") return runStahlCubeRoots(cfg);
  if (cfg.name == "stability-le") return runStabilityLe(cfg);
  if (cfg.name == "abs-x") return runAbsX(cfg);
  if (cfg.name == "exp-halfline") return runExpHalfline(cfg);
  if (cfg.name == "varying-weight") return runVaryingWeight(cfg);
  throw Error(ErrorClass::Config, "unknown experiment: " + cfg.name);
}

}  // namespace ratlab
