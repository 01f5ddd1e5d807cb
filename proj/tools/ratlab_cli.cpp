// ratlab command line: experiments, equilibrium solvers, pade construction,
// S-compact geometry and minimax, with config-hash result caching.

#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ratlab/experiments.hpp"
#include "ratlab/funcs.hpp"
#include "ratlab/io.hpp"
#include "ratlab/minimax.hpp"
#include "ratlab/rates.hpp"
#include "ratlab/scompact.hpp"
#include "ratlab/zerodist.hpp"

using namespace ratlab;
using nlohmann::json;

namespace {

struct Global {
  long precision_bits = 0;
  std::string out_dir = "out";
  std::string config_path;
  bool no_cache = false;
};

Interval parseInterval(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos)
    throw Error(ErrorClass::Config, "interval must be 'lo,hi': " + s);
  return {Real(s.substr(0, comma)), Real(s.substr(comma + 1))};
}

IntervalSet parseIntervalSet(const std::string& s) {
  IntervalSet out;
  size_t pos = 0;
  while (pos < s.size()) {
    auto semi = s.find(';', pos);
    std::string piece = semi == std::string::npos ? s.substr(pos) : s.substr(pos, semi - pos);
    out.push_back(parseInterval(piece));
    if (semi == std::string::npos) break;
    pos = semi + 1;
  }
  return out;
}

std::vector<Cplx> parsePoints(const std::string& s) {
  // "re,im;re,im;..."
  std::vector<Cplx> out;
  for (const auto& iv : parseIntervalSet(s)) out.emplace_back(iv.first, iv.second);
  return out;
}

json equilibriumJson(const FieldEquilibrium& eq) {
  json j;
  j["C"] = fmtReal(eq.C);
  j["capacity"] = fmtReal(eq.capacity);
  j["residual_support"] = fmtReal(eq.residual_support);
  j["residual_slack"] = fmtReal(eq.residual_slack);
  json sup = json::array();
  for (const auto& iv : eq.support) sup.push_back({fmtReal(iv.first), fmtReal(iv.second)});
  j["support"] = sup;
  return j;
}

std::string densityCsv(const Measure& m, int samples) {
  std::string csv = "x,density\n";
  for (const auto& p : m.cheb) {
    for (int i = 1; i < samples; ++i) {
      Real x = p.a + (p.b - p.a) * Real(i) / Real(samples);
      csv += csvLine({fmtReal(x), fmtReal(p.density(x))});
    }
  }
  return csv;
}

int runExperimentCmd(const Global& g, const std::string& name,
                     const std::vector<std::string>& kvs) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.precision_bits = g.precision_bits;
  if (!g.config_path.empty()) {
    json j = json::parse(readFile(g.config_path));
    if (j.contains("precision_bits")) cfg.precision_bits = j["precision_bits"].get<long>();
    if (j.contains("params"))
      for (auto& [k, v] : j["params"].items())
        cfg.params[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  for (const auto& kv : kvs) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorClass::Config, "--param expects key=value: " + kv);
    cfg.params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (!experimentExists(cfg.name))
    throw Error(ErrorClass::Config, "unknown experiment: " + cfg.name);

  std::string dir = g.out_dir + "/" + cfg.name + "-" + cfg.hash();
  std::string stamp = dir + "/summary.json";
  if (!g.no_cache && fileExists(stamp)) {
    std::cout << "cached: " << dir << "\n" << readFile(stamp) << "\n";
    return 0;
  }
  ExperimentResult res = runExperiment(cfg);
  ensureDir(dir);
  writeFile(stamp, res.summary);
  for (const auto& [fname, csv] : res.tables) writeFile(dir + "/" + fname, csv);
  std::cout << "wrote: " << dir << "\n" << res.summary << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"high-precision laboratory for rational approximation with free poles"};
  app.require_subcommand(1);

  Global g;
  app.add_option("--precision-bits", g.precision_bits, "working precision in bits");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--config", g.config_path, "JSON config file");
  app.add_flag("--no-cache", g.no_cache, "recompute even if a cached bundle exists");

  // experiment
  auto* expcmd = app.add_subcommand("experiment", "run or list registry experiments");
  auto* exp_list = expcmd->add_subcommand("list", "list experiments");
  auto* exp_run = expcmd->add_subcommand("run", "run one experiment");
  std::string exp_name;
  std::vector<std::string> exp_params;
  exp_run->add_option("name", exp_name, "experiment name")->required();
  exp_run->add_option("--param", exp_params, "key=value override (repeatable)");

  // equilibrium
  auto* eqc = app.add_subcommand("equilibrium", "potential-theory solvers");
  std::string eq_op = "robin", eq_intervals = "-1,1", eq_field = "none", eq_e = "", eq_atom = "";
  eqc->add_option("--op", eq_op, "robin | field | condenser | balayage");
  eqc->add_option("--intervals", eq_intervals, "F as 'a,b;c,d;...'");
  eqc->add_option("--field", eq_field, "none | quadratic | pointlog:<y>");
  eqc->add_option("--e", eq_e, "E interval 'a,b' (condenser)");
  eqc->add_option("--atom", eq_atom, "source atom 're,im' (balayage)");

  // pade
  auto* pad = app.add_subcommand("pade", "diagonal or multipoint Pade");
  std::string pade_function, pade_mode = "diagonal", pade_E = "0,1";
  int pade_n = 8;
  pad->add_option("--function", pade_function, "function description JSON file")->required();
  pad->add_option("--n", pade_n, "order");
  pad->add_option("--mode", pade_mode, "diagonal | multipoint");
  pad->add_option("--interval", pade_E, "interpolation interval E (multipoint)");

  // scompact
  auto* sc = app.add_subcommand("scompact", "S-compact geometry for a branch set");
  std::string sc_roots = "1,0;-0.5,0.8660254037844386;-0.5,-0.8660254037844386";
  sc->add_option("--roots", sc_roots, "branch points 're,im;...' (3 supported)");

  // minimax
  auto* mm = app.add_subcommand("minimax", "best rational approximation");
  std::string mm_target = "absx";
  int mm_n = 8;
  mm->add_option("--target", mm_target, "absx | expx | sqrtx");
  mm->add_option("--n", mm_n, "order");

  CLI11_PARSE(app, argc, argv);

  try {
    ensureDir(g.out_dir);
    if (*exp_list) {
      for (const auto& name : experimentList()) std::cout << name << "\n";
      return 0;
    }
    if (*exp_run) return runExperimentCmd(g, exp_name, exp_params);

    if (*eqc) {
      long bits = g.precision_bits ? g.precision_bits : 256;
      auto ctx = PrecisionContext::withBits(bits);
      PrecisionScope scope(ctx.bits);
      IntervalSet F = parseIntervalSet(eq_intervals);
      json j;
      Measure density_src;
      if (eq_op == "robin") {
        auto eq = robinEquilibrium(F, ctx);
        j = equilibriumJson(eq);
        density_src = eq.lambda;
      } else if (eq_op == "field") {
        FieldFn phi;
        if (eq_field == "quadratic") phi = [](const Real& x) { return x * x; };
        else if (eq_field.rfind("pointlog:", 0) == 0) {
          Real y(eq_field.substr(9));
          phi = [y](const Real& x) { return log(abs(x - y)); };
        } else if (eq_field != "none") {
          throw Error(ErrorClass::Config, "unknown field: " + eq_field);
        }
        auto eq = phi ? fieldEquilibrium(F, phi, ctx) : robinEquilibrium(F, ctx);
        j = equilibriumJson(eq);
        density_src = eq.lambda;
      } else if (eq_op == "condenser") {
        if (eq_e.empty()) throw Error(ErrorClass::Config, "condenser needs --e");
        auto ce = condenserEquilibrium(parseInterval(eq_e), F, ctx);
        j["C_E"] = fmtReal(ce.C_E);
        j["C_F"] = fmtReal(ce.C_F);
        j["w"] = fmtReal(ce.w);
        j["capacity"] = fmtReal(ce.capacity);
        j["rho"] = fmtReal(ce.rho);
        j["residual"] = fmtReal(ce.residual);
        density_src = ce.lambda_E;
      } else if (eq_op == "balayage") {
        if (eq_atom.empty()) throw Error(ErrorClass::Config, "balayage needs --atom");
        auto pts = parsePoints(eq_atom);
        auto bal = balayageFull(Measure::pointMass(pts.at(0)), F, ctx);
        j["C_F"] = fmtReal(bal.C_F);
        j["mass_error"] = fmtReal(bal.mass_error);
        j["residual"] = fmtReal(bal.residual);
        density_src = bal.lambda;
      } else {
        throw Error(ErrorClass::Config, "unknown equilibrium op: " + eq_op);
      }
      writeFile(g.out_dir + "/equilibrium.json", j.dump(2));
      writeFile(g.out_dir + "/density.csv", densityCsv(density_src, 400));
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*pad) {
      long bits = g.precision_bits ? g.precision_bits : std::max(256, 12 * pade_n);
      auto ctx = PrecisionContext::withBits(bits);
      PrecisionScope scope(ctx.bits);
      std::string text = readFile(pade_function);
      RationalFn r;
      if (pade_mode == "diagonal") {
        json fj = json::parse(text);
        SeriesAtInfinity s;
        if (fj.at("kind") == "markov") {
          s = seriesAtInfinity(markovFromJson(text), 2 * pade_n + 2, ctx);
        } else {
          s = seriesAtInfinity(algebraicFromJson(text), 2 * pade_n + 2, ctx);
        }
        r = diagonalPade(s, pade_n, ctx);
      } else if (pade_mode == "multipoint") {
        MarkovFunction f = markovFromJson(text);
        Interval E = parseInterval(pade_E);
        auto ce = condenserEquilibrium(E, {{f.f_lo, f.f_hi}}, ctx);
        auto scheme = InterpolationScheme::fromLimitMeasure(ce.lambda_E.cheb.at(0), pade_n,
                                                            ctx.bits);
        r = multipointPade(f, scheme, pade_n, ctx);
      } else {
        throw Error(ErrorClass::Config, "unknown pade mode: " + pade_mode);
      }
      json j;
      json pc = json::array(), qc = json::array();
      for (const auto& c : r.P.coeffs()) pc.push_back(c.str());
      for (const auto& c : r.Q.coeffs()) qc.push_back(c.str());
      j["P"] = pc;
      j["Q"] = qc;
      j["order"] = r.order;
      j["degenerate"] = r.degenerate;
      j["rank_gap"] = fmtReal(r.rank_gap);
      json res = json::array();
      for (const auto& v : r.residuals) res.push_back(fmtReal(v));
      j["construction_residuals"] = res;
      json canc = json::array();
      for (const auto& z : r.cancelled) canc.push_back(z.str());
      j["cancelled_roots"] = canc;
      writeFile(g.out_dir + "/rational.json", j.dump(2));
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*sc) {
      long bits = g.precision_bits ? g.precision_bits : 320;
      auto ctx = PrecisionContext::withBits(bits);
      PrecisionScope scope(ctx.bits);
      auto pts = parsePoints(sc_roots);
      if (pts.size() != 3)
        throw Error(ErrorClass::Config, "scompact currently expects exactly 3 branch points");
      Poly A = Poly::fromRoots(pts);
      Cplx v0 = (pts[0] + pts[1] + pts[2]) / Real(3l);
      auto sol = periodSolve(A, CellSignature::star(3), {v0}, ctx);
      auto tr = traceTrajectories(A, sol.V, ctx);
      auto rep = sMeasureFromV(A, sol.V, tr, ctx);
      Poly W = phiMap(A, sol.V, ctx);

      json j;
      j["v"] = sol.v[0].str();
      j["period_residual"] = fmtReal(sol.residual.norm);
      Real fixres(0l);
      for (long k = 0; k <= std::max(W.degree(), sol.V.degree()); ++k) {
        Cplx a = k <= W.degree() ? W[k] : Cplx(0l);
        Cplx b = k <= sol.V.degree() ? sol.V[k] : Cplx(0l);
        fixres = max(fixres, abs(a - b));
      }
      j["phi_fixed_point_residual"] = fmtReal(fixres);
      json masses = json::array();
      for (const auto& m : rep.arc_masses) masses.push_back(fmtReal(m));
      j["arc_masses"] = masses;
      j["mass_error"] = fmtReal(rep.mass_error);
      j["potential_spread"] = fmtReal(rep.potential_spread);
      j["s_mismatch"] = fmtReal(rep.s_mismatch_max);
      std::string csv = "arc,re,im,nu\n";
      for (size_t a = 0; a < tr.arcs.size(); ++a)
        for (const auto& smp : tr.arcs[a].samples)
          csv += csvLine({std::to_string(a), fmtReal(smp.z.re), fmtReal(smp.z.im),
                          fmtReal(smp.nu)});
      writeFile(g.out_dir + "/arcs.csv", csv);
      writeFile(g.out_dir + "/scompact.json", j.dump(2));
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*mm) {
      long bits = g.precision_bits ? g.precision_bits : 512;
      auto ctx = PrecisionContext::withBits(bits);
      PrecisionScope scope(ctx.bits);
      MinimaxOpts opts;
      RealFn f;
      Interval E{Real(0l), Real(1l)};
      if (mm_target == "absx") {
        f = [](const Real& x) { return abs(x); };
        E = {Real(-1l), Real(1l)};
        opts.even_reduction = mm_n % 2 == 0;
      } else if (mm_target == "expx") {
        f = [](const Real& x) { return x.isInf() ? Real(0l) : exp(-x); };
        opts.mobius_semiaxis = true;
      } else if (mm_target == "sqrtx") {
        f = [](const Real& x) { return sqrt(max(x, Real(0l))); };
      } else {
        throw Error(ErrorClass::Config, "unknown minimax target: " + mm_target);
      }
      auto res = rationalMinimax(f, E, mm_n, ctx, opts);
      json j;
      j["error"] = fmtReal(res.error);
      j["lower_bound"] = fmtReal(res.lower_bound);
      j["certified"] = res.certified;
      j["degenerate"] = res.degenerate;
      j["iterations"] = res.iterations;
      json alt = json::array();
      for (const auto& a : res.alternation) alt.push_back(fmtReal(a));
      j["alternation"] = alt;
      writeFile(g.out_dir + "/minimax.json", j.dump(2));
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const Error& e) {
    json err;
    err["error"] = errorClassName(e.cls());
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return errorClassExitCode(e.cls());
  } catch (const std::exception& e) {
    json err;
    err["error"] = "internal";
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return errorClassExitCode(ErrorClass::Internal);
  }
  return 0;
}
