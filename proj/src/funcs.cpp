#include "ratlab/funcs.hpp"

#include "json.hpp"

namespace ratlab {

MarkovFunction MarkovFunction::fromMeasure(Measure sigma, mpfr_prec_t bits) {
  MarkovFunction f;
  auto hull = sigma.realHull();
  f.sigma = std::move(sigma);
  f.f_lo = hull.first;
  f.f_hi = hull.second;
  (void)bits;
  return f;
}

void AlgebraicFunction::validate(const PrecisionContext& ctx) const {
  if (branch_points.size() != exponents.size() || branch_points.size() < 2)
    throw Error(ErrorClass::Config, "algebraic function needs matching branch points and exponents");
  Real tol = Real::exp2i(ctx.tol_eq_log2);
  Real s(0l);
  for (const auto& a : exponents) {
    s += a;
    Real frac = abs(a - floor(a + Real(0.5)));
    if (frac <= tol) throw Error(ErrorClass::Config, "integer exponent: not a branch point");
  }
  if (abs(s) > tol) throw Error(ErrorClass::Config, "exponents must sum to zero");
  for (size_t i = 0; i < branch_points.size(); ++i)
    for (size_t j = i + 1; j < branch_points.size(); ++j)
      if (abs(branch_points[i] - branch_points[j]) <= tol)
        throw Error(ErrorClass::Config, "branch points must be distinct");
}

Cplx AlgebraicFunction::evalOutside(const Cplx& z) const {
  Cplx acc(0l);
  for (size_t k = 0; k < branch_points.size(); ++k) {
    Cplx u = Cplx(1l) - branch_points[k] / z;
    acc += log(u) * exponents[k];  // principal branch; |a_k/z| < 1 required
  }
  return exp(acc);
}

Cplx SeriesAtInfinity::evalTruncated(const Cplx& z) const {
  Cplx acc(0l);
  Cplx zinv = Cplx(1l) / z;
  for (size_t k = coeff.size(); k-- > 0;) {
    acc *= zinv;
    acc += coeff[k];
  }
  return acc;
}

Cplx markovEval(const MarkovFunction& f, const Cplx& z, const PrecisionContext& ctx) {
  Real tol = Real::exp2i(ctx.tol_eq_log2);
  Real dx = max(max(f.f_lo - z.re, z.re - f.f_hi), Real(0l));
  Real dist = hypot(dx, z.im);
  if (dist <= tol)
    throw Error(ErrorClass::Domain, "markovEval: evaluation point too close to the support");
  return -f.sigma.cauchy(z, ctx.bits + 32);
}

SeriesAtInfinity seriesAtInfinity(const MarkovFunction& f, int m, const PrecisionContext& ctx) {
  if (m < 1) throw Error(ErrorClass::Config, "series order must be >= 1");
  if (m > 4096) throw Error(ErrorClass::Config, "series order beyond configured maximum");
  PrecisionScope scope(ctx.bits + 32);
  SeriesAtInfinity s;
  s.source = SeriesAtInfinity::Source::Markov;
  s.coeff.resize(m + 1, Cplx(0l));
  s.coeff[0] = Cplx(0l);
  for (int k = 1; k <= m; ++k)
    s.coeff[k] = -f.sigma.moment(k - 1, ctx.bits + 32);
  return s;
}

SeriesAtInfinity seriesAtInfinity(const AlgebraicFunction& f, int m, const PrecisionContext& ctx) {
  if (m < 1) throw Error(ErrorClass::Config, "series order must be >= 1");
  if (m > 4096) throw Error(ErrorClass::Config, "series order beyond configured maximum");
  f.validate(ctx);
  PrecisionScope scope(ctx.bits + 64);
  const size_t p = f.branch_points.size();

  // f'/f = N/D with D = prod (z - a_k), N = sum alpha_k prod_{j != k} (z - a_j).
  Poly D = Poly::constant(Cplx(1l));
  for (const auto& a : f.branch_points) D = D * Poly({-a, Cplx(1l)});
  Poly N;
  for (size_t k = 0; k < p; ++k) {
    Poly t = Poly::constant(Cplx(f.exponents[k]));
    for (size_t j = 0; j < p; ++j)
      if (j != k) t = t * Poly({-f.branch_points[j], Cplx(1l)});
    N = N + t;
  }

  // Matching coefficients of f' D = f N for f = sum f_s z^-s gives the
  // first-order recurrence below (f_0 = 1 is the normalization f(inf) = 1).
  std::vector<Cplx> fs(m + 1, Cplx(0l));
  fs[0] = Cplx(1l);
  auto dcoef = [&](long j) { return j <= D.degree() ? D[j] : Cplx(0l); };
  auto ncoef = [&](long j) { return j <= N.degree() ? N[j] : Cplx(0l); };
  long pl = static_cast<long>(p);
  Real guard = Real::exp2i(static_cast<double>(ctx.bits));
  for (long s = 1; s <= m; ++s) {
    Cplx acc(0l);
    for (long j = 0; j < pl; ++j) {
      long idx = j - pl + s;
      if (idx >= 0 && idx < s) acc += dcoef(j) * Cplx(Real(idx)) * fs[idx];
      long idn = j - pl + 1 + s;
      if (idn >= 0 && idn < s) acc += ncoef(j) * fs[idn];
    }
    fs[s] = -acc / Cplx(Real(s));
    if (abs(fs[s]) > guard)
      throw Error(ErrorClass::Precision, "series recurrence overflow at order " + std::to_string(s));
  }
  SeriesAtInfinity out;
  out.source = SeriesAtInfinity::Source::Algebraic;
  out.coeff = std::move(fs);
  return out;
}

Cplx monodromyFactor(const AlgebraicFunction& f, const Cplx& center, const Real& radius,
                     const PrecisionContext& ctx) {
  // Transport of log f along the loop: the increment is the contour integral
  // of f'/f = sum alpha_k/(z - a_k), integrated with the exact parametrized
  // derivative; the factor is exp of the increment.
  PrecisionScope scope(ctx.bits + 32);
  CplxFn1 integrand = [&](const Real& theta) {
    Cplx e(cos(theta), sin(theta));
    Cplx z = center + Cplx(radius) * e;
    Cplx dz = Cplx(Real(0l), radius) * e;
    Cplx s(0l);
    for (size_t k = 0; k < f.branch_points.size(); ++k)
      s += Cplx(f.exponents[k]) / (z - f.branch_points[k]);
    return s * dz;
  };
  Cplx inc = integrate(integrand, Real(0l), Real(2l) * Real::pi(), 256, ctx.bits + 32);
  return exp(inc);
}

namespace {

using nlohmann::json;

json realToJson(const Real& x) { return json(x.str()); }
Real realFromJson(const json& j) { return Real(j.get<std::string>()); }
json cplxToJson(const Cplx& z) { return json::array({realToJson(z.re), realToJson(z.im)}); }
Cplx cplxFromJson(const json& j) { return Cplx(realFromJson(j[0]), realFromJson(j[1])); }

}  // namespace

std::string toJson(const MarkovFunction& f) {
  json j;
  j["kind"] = "markov";
  j["support"] = {realToJson(f.f_lo), realToJson(f.f_hi)};
  json density = json::array();
  for (const auto& a : f.sigma.atoms)
    density.push_back({{"type", "atom"}, {"z", cplxToJson(a.z)}, {"w", realToJson(a.w)}});
  for (const auto& p : f.sigma.cheb)
    density.push_back({{"type", "cheb"},
                       {"a", realToJson(p.a)},
                       {"b", realToJson(p.b)},
                       {"coeff", [&] {
                          json c = json::array();
                          for (const auto& x : p.coeff) c.push_back(realToJson(x));
                          return c;
                        }()}});
  for (const auto& p : f.sigma.weights) {
    json g = json::array();
    for (const auto& c : p.g.coeffs()) g.push_back(realToJson(c.re));
    density.push_back({{"type", "weight"},
                       {"a", realToJson(p.a)},
                       {"b", realToJson(p.b)},
                       {"g", g},
                       {"pa", static_cast<int>(p.pa)},
                       {"pb", static_cast<int>(p.pb)}});
  }
  j["density"] = density;
  return j.dump(2);
}

std::string toJson(const AlgebraicFunction& f) {
  json j;
  j["kind"] = "algebraic";
  json bp = json::array(), ex = json::array();
  for (const auto& a : f.branch_points) bp.push_back(cplxToJson(a));
  for (const auto& a : f.exponents) ex.push_back(realToJson(a));
  j["branch_points"] = bp;
  j["exponents"] = ex;
  return j.dump(2);
}

MarkovFunction markovFromJson(const std::string& text) {
  json j = json::parse(text);
  if (j.at("kind") != "markov") throw Error(ErrorClass::Config, "not a markov description");
  Measure sigma;
  for (const auto& d : j.at("density")) {
    std::string type = d.at("type");
    if (type == "atom") {
      sigma.atoms.push_back({cplxFromJson(d.at("z")), realFromJson(d.at("w")), false});
    } else if (type == "cheb") {
      ChebPiece p;
      p.a = realFromJson(d.at("a"));
      p.b = realFromJson(d.at("b"));
      for (const auto& c : d.at("coeff")) p.coeff.push_back(realFromJson(c));
      sigma.cheb.push_back(std::move(p));
    } else if (type == "weight") {
      std::vector<Cplx> g;
      for (const auto& c : d.at("g")) g.emplace_back(realFromJson(c));
      sigma.weights.push_back({realFromJson(d.at("a")), realFromJson(d.at("b")), Poly(g),
                               static_cast<EndPower>(d.at("pa").get<int>()),
                               static_cast<EndPower>(d.at("pb").get<int>())});
    } else {
      throw Error(ErrorClass::Config, "unknown density piece: " + type);
    }
  }
  MarkovFunction f;
  f.sigma = std::move(sigma);
  f.f_lo = realFromJson(j.at("support")[0]);
  f.f_hi = realFromJson(j.at("support")[1]);
  return f;
}

AlgebraicFunction algebraicFromJson(const std::string& text) {
  json j = json::parse(text);
  if (j.at("kind") != "algebraic") throw Error(ErrorClass::Config, "not an algebraic description");
  AlgebraicFunction f;
  for (const auto& a : j.at("branch_points")) f.branch_points.push_back(cplxFromJson(a));
  for (const auto& a : j.at("exponents")) f.exponents.push_back(realFromJson(a));
  return f;
}

}  // namespace ratlab
