// heisctl: batch driver for the heis library.
//
// Exit status: 0 success, 1 domain error, 2 divergent verdict or failed check,
// 64 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <string>

#include <CLI11.hpp>

#include "heis/heis.hpp"

namespace fs = std::filesystem;
using namespace heis;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitVerdict = 2;
constexpr int kExitUsage = 64;

struct Common {
  bool json = false;
  std::uint64_t seed = 1;
};

std::string default_output(const std::string& name) {
  const char* dir = std::getenv("HEIS_OUT_DIR");
  const fs::path base = (dir && *dir) ? fs::path(dir) : fs::current_path();
  fs::create_directories(base);
  return (base / name).string();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot write " + path);
  return f;
}

SampledPath load_path(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot read " + path);
  return read_path_csv(f);
}

void save_path(const SampledPath& p, const std::string& path) {
  auto f = open_out(path);
  write_path_csv(f, p);
}

void print(const Common& c, const json& j, const std::string& table) {
  if (c.json)
    std::cout << j.dump(2) << '\n';
  else
    std::cout << table;
}

// ------------------------------------------------------------ gen-curve

struct GenCurve {
  std::string kind = "koch";
  int depth = 12;
  double h = 1.0 / 6.0;
  double beta = 1.5;
  double alpha = 0.75;
  int terms = 10;
  double amp = 0.05;
  int k0 = 3;
  std::string out;
};

int run_gen_curve(const Common& c, const GenCurve& o) {
  SampledPath p;
  if (o.kind == "koch") {
    KochSpec s;
    const double h = o.h;
    s.h = [h](int) { return h; };
    s.depth = o.depth;
    p = koch_generate(s);
  } else if (o.kind == "koch-slow") {
    KochSpec s;
    s.h = koch_slow_h;
    s.depth = o.depth;
    p = koch_generate(s);
  } else if (o.kind == "quasi-helix") {
    p = koch_generate(quasi_helix_spec(o.beta, o.depth));
  } else if (o.kind == "holder") {
    p = holder_curve(dyadic_grid(o.depth), o.alpha, o.terms, o.amp);
  } else if (o.kind == "lacunary-infinite") {
    p = lacunary_path(infinite_measure_spec(static_cast<std::size_t>(o.terms)), dyadic_grid(o.depth));
  } else if (o.kind == "lacunary-null") {
    p = lacunary_path(null_measure_spec(static_cast<std::size_t>(o.terms), static_cast<std::size_t>(o.k0)),
                      dyadic_grid(o.depth));
  } else if (o.kind == "circle") {
    for (double t : dyadic_grid(o.depth))
      p.push_back(t, std::cos(2.0 * std::numbers::pi * t), std::sin(2.0 * std::numbers::pi * t));
  } else {
    throw DomainError("unknown curve kind " + o.kind);
  }
  const std::string out = o.out.empty() ? default_output("curve.csv") : o.out;
  save_path(p, out);
  print(c, {{"output", out}, {"points", p.size()}, {"kind", o.kind}},
        "wrote " + std::to_string(p.size()) + " points to " + out + "\n");
  return 0;
}

// ------------------------------------------------------- lift, rough-lift

struct Lift {
  std::string input;
  double z0 = 0.0;
  std::string out;
};

int run_lift(const Common& c, const Lift& o) {
  const SampledPath g = load_path(o.input);
  require(g.planar(), "lift: input must be a planar curve");
  const SampledPath l = vertical_lift(g, o.z0);
  const std::string out = o.out.empty() ? default_output("lift.csv") : o.out;
  save_path(l, out);
  print(c, {{"output", out}, {"points", l.size()}, {"z_end", l.z.back()}},
        "wrote lift to " + out + ", z(T) = " + fmt17(l.z.back()) + "\n");
  return 0;
}

struct RoughLiftOpts {
  std::string input;
  std::string modulus = "constant";
  double eps = 1.0;
  int k0 = 3;
  double cap = std::numeric_limits<double>::infinity();
  std::string out;
};

int run_rough_lift(const Common& c, const RoughLiftOpts& o) {
  const SampledPath g = load_path(o.input);
  require(g.planar(), "rough-lift: input must be a planar curve");
  Modulus m;
  if (o.modulus == "constant")
    m = constant_modulus(o.eps);
  else if (o.modulus == "holder")
    m = holder_modulus(g);
  else if (o.modulus == "null-tail") {
    const auto k0 = static_cast<std::size_t>(o.k0);
    m = tail_modulus(g, [k0](int k) { return null_measure_tail(k, k0); });
  } else
    throw DomainError("unknown modulus " + o.modulus);
  const RoughLift r = rough_lift(g, m, o.cap);
  const std::string out = o.out.empty() ? default_output("rough_lift.csv") : o.out;
  save_path(r.lift, out);
  print(c, {{"output", out}, {"variation", r.variation}, {"finite", r.finite}},
        "wrote rough lift to " + out + ", variation " + fmt17(r.variation) + (r.finite ? "" : " (over cap)") + "\n");
  return r.finite ? 0 : kExitVerdict;
}

// -------------------------------------------------------------- measure

struct Measure {
  std::string input;
  std::string kappa = "dinf2";
  int mesh = 10;
  int min_mesh = 0;
  int random = 32;
  double ceiling = std::numeric_limits<double>::infinity();
  std::string out;
};

int run_measure(const Common& c, const Measure& o) {
  const SampledPath p = load_path(o.input);
  QuasiMetricCurve q;
  if (o.kappa == "dinf2")
    q = kappa_dinf2(p);
  else if (o.kappa == "contact")
    q = kappa_contact(p);
  else if (o.kappa == "param")
    q = kappa_parameter(p.t);
  else
    throw DomainError("unknown kappa " + o.kappa);
  AreaOptions opt;
  opt.min_level = o.min_mesh;
  opt.max_level = o.mesh;
  opt.random_count = o.random;
  opt.seed = c.seed;
  opt.ceiling = o.ceiling;
  const AreaReport r = hausdorff_area(q, opt);
  const json j = to_json(r);
  const std::string out = o.out.empty() ? default_output("measure.json") : o.out;
  open_out(out) << j.dump(2) << '\n';
  std::ostringstream t;
  t << "level  mesh          estimate      spread        argmin\n";
  for (std::size_t i = 0; i < r.level.size(); ++i)
    t << std::setw(5) << r.level[i] << "  " << std::setw(12) << r.mesh[i] << "  " << std::setw(12) << r.estimate[i]
      << "  " << std::setw(12) << r.spread[i] << "  " << r.argmin[i] << '\n';
  t << "verdict " << to_string(r.verdict) << ", extrapolated " << r.extrapolated << ", family " << r.family << '\n';
  print(c, j, t.str());
  return r.verdict == Verdict::Divergent ? kExitVerdict : 0;
}

// ------------------------------------------------------------- flatness

struct Flatness {
  std::string input;
  double from = 0.25;
  double to = 0.75;
  std::size_t max_bases = 512;
  std::string out;
};

int run_flatness(const Common& c, const Flatness& o) {
  const SampledPath p = load_path(o.input);
  require(!p.planar(), "flatness: input must be a Heisenberg curve");
  require(o.from >= 0.0 && o.from < o.to && o.to <= 1.0, "flatness: need 0 <= from < to <= 1");
  const PointCloud cloud = cloud_from_path(p);
  EpsilonOptions eo;
  eo.max_bases = o.max_bases;
  const auto n = static_cast<double>(p.size() - 1);
  for (auto i = static_cast<std::size_t>(o.from * n); i <= static_cast<std::size_t>(o.to * n); ++i) eo.bases.push_back(i);
  const EpsilonProfile eps = reifenberg_epsilon(cloud, eo);
  const WhitneyProfile w = whitney_profile(cloud);
  const json j = profile_json(eps, w);
  const std::string out = o.out.empty() ? default_output("flatness.json") : o.out;
  open_out(out) << j.dump(2) << '\n';
  std::ostringstream t;
  t << "r             epsilon\n";
  for (std::size_t i = 0; i < eps.r.size(); ++i) t << std::setw(12) << eps.r[i] << "  " << eps.epsilon[i] << '\n';
  t << "scale         whitney\n";
  for (std::size_t i = 0; i < w.ratio.size(); ++i)
    t << std::setw(12) << w.ratio.scale_lo[i] << "  " << w.ratio.value[i] << '\n';
  print(c, j, t.str());
  return 0;
}

// ---------------------------------------------------------- parametrize

struct Parametrize {
  std::string input;
  double eps = 0.3;
  int max_levels = 30;
  std::string out;
};

int run_parametrize(const Common& c, const Parametrize& o) {
  const PointCloud cloud = cloud_from_path(load_path(o.input));
  ParametrizeOptions po;
  po.max_levels = o.max_levels;
  const ParametrizeResult r = dyadic_parametrize(cloud, o.eps, po);
  const std::string out = o.out.empty() ? default_output("chain.csv") : o.out;
  auto f = open_out(out);
  write_chain_csv(f, cloud, r);
  const json j = to_json(r);
  std::ostringstream t;
  t << "levels " << r.levels.size() << ", c(eps) " << r.decay << ", d(O,A) " << r.base_distance << '\n';
  for (std::size_t n = 0; n < r.max_chord.size(); ++n)
    t << "  n=" << n << "  max chord " << r.max_chord[n] << "  bound "
      << std::pow(r.decay, static_cast<double>(n)) * r.base_distance << '\n';
  t << "certificate " << (r.certificate ? "ok" : "FAILED") << ", injective " << r.injective << ", ordered " << r.ordered
    << '\n';
  if (!r.ok) t << "failure: " << r.message << '\n';
  print(c, j, t.str());
  return (r.ok && r.certificate && r.injective && r.ordered) ? 0 : kExitVerdict;
}

// -------------------------------------------------------------- surface

struct Surface {
  std::string field = "linear-y";
  std::string field_csv;
  double value = 1.0;
  std::string mode = "curve";
  double y0 = 0.0;
  double z0 = 0.0;
  double step = 1e-3;
  double span = 1.0;
  int seeds = 5;
  double seed_spread = 1.0;
  std::string out;
};

IntrinsicGraph make_graph(const Surface& o) {
  IntrinsicGraph g;
  g.label = o.field;
  const double v = o.value;
  if (o.field == "zero")
    g.phi = [](double, double) { return 0.0; };
  else if (o.field == "const")
    g.phi = [v](double, double) { return v; };
  else if (o.field == "linear-y")
    g.phi = [](double y, double) { return y; };
  else if (o.field == "peano")
    g.phi = [](double, double z) { return -std::sqrt(std::abs(z)); };
  else if (o.field == "holder")
    g.phi = [](double y, double z) { return std::sqrt(std::abs(z - 0.3)) + 0.5 * std::sin(3.0 * y); };
  else if (o.field == "csv") {
    std::ifstream f(o.field_csv);
    if (!f) throw DomainError("cannot read " + o.field_csv);
    const TabulatedField tab = read_field_csv(f);
    g.phi = tab;
    g.domain = {tab.ys.front(), tab.ys.back(), tab.zs.front(), tab.zs.back()};
  } else
    throw DomainError("unknown field " + o.field);
  return g;
}

int run_surface(const Common& c, const Surface& o) {
  const IntrinsicGraph g = make_graph(o);
  const std::string out = o.out.empty() ? default_output("surface.csv") : o.out;
  auto f = open_out(out);
  json j{{"field", o.field}, {"mode", o.mode}, {"output", out}};
  std::ostringstream t;
  bool exited = false;
  if (o.mode == "curve") {
    const IntegralCurve cv = integrate_Wphi(g, o.y0, o.z0, o.step, o.span);
    f << "t,y,z,phi\n";
    for (std::size_t k = 0; k < cv.size(); ++k)
      f << fmt17(cv.t[k]) << ',' << fmt17(cv.y[k]) << ',' << fmt17(cv.z[k]) << ',' << fmt17(cv.phi[k]) << '\n';
    exited = cv.exited;
    j["points"] = cv.size();
    j["richardson"] = cv.richardson;
    j["exited"] = cv.exited;
    t << "curve with " << cv.size() << " points, z(end) " << cv.z.back() << ", Richardson " << cv.richardson
      << (cv.exited ? ", left the domain" : "") << '\n';
  } else if (o.mode == "flow") {
    require(o.seeds >= 1, "surface: need at least one seed");
    std::vector<double> seeds;
    for (int s = 0; s < o.seeds; ++s)
      seeds.push_back(o.z0 + (o.seeds == 1 ? 0.0 : o.seed_spread * (s / static_cast<double>(o.seeds - 1) - 0.5)));
    const ExtremalFlow fl = extremal_flow(g, o.y0, seeds, o.step, o.span);
    f << "curve,t,y,z,phi\n";
    for (std::size_t s = 0; s < fl.curves.size(); ++s) {
      const auto& cv = fl.curves[s];
      exited = exited || cv.exited;
      for (std::size_t k = 0; k < cv.size(); ++k)
        f << s << ',' << fmt17(cv.t[k]) << ',' << fmt17(cv.y[k]) << ',' << fmt17(cv.z[k]) << ',' << fmt17(cv.phi[k])
          << '\n';
    }
    j["curves"] = fl.curves.size();
    j["ordered"] = fl.ordered;
    j["label"] = fl.label;
    t << fl.curves.size() << " curves, ordered, " << fl.label << '\n';
  } else {
    throw DomainError("unknown surface mode " + o.mode);
  }
  print(c, j, t.str());
  return exited ? kExitVerdict : 0;
}

// --------------------------------------------------------------- coarea

struct Coarea {
  std::string map = "identity";
  int grid = 64;
  int a_grid = 192;
  double tol = 0.05;
  std::string out;
};

int run_coarea(const Common& c, const Coarea& o) {
  ScalarMapPair F;
  if (o.map == "identity")
    F = linear_pair(1, 0, 0, 1);
  else if (o.map == "rotation")
    F = linear_pair(1, 1, -1, 1);
  else if (o.map == "z-shear")
    F = numeric_pair([](const HPoint& p) { return p.x; }, [](const HPoint& p) { return p.y + 0.1 * p.z; });
  else
    throw DomainError("unknown map " + o.map);
  F.label = o.map;
  CoareaOptions opt;
  opt.grid = o.grid;
  opt.a_grid = o.a_grid;
  const std::vector<Box3> boxes{{0, 1, 0, 1, 0, 1}, {2, 3, 0, 1, 0, 1}, {0, 1, 2, 3, 1, 2}};
  const CoareaReport r = coarea_check(F, boxes, opt);
  const json j = to_json(r);
  const std::string out = o.out.empty() ? default_output("coarea.json") : o.out;
  open_out(out) << j.dump(2) << '\n';
  std::ostringstream t;
  t << "box  lhs          rhs          ratio        coverage\n";
  for (std::size_t i = 0; i < r.boxes.size(); ++i)
    t << std::setw(3) << i << "  " << std::setw(11) << r.boxes[i].lhs << "  " << std::setw(11) << r.boxes[i].rhs << "  "
      << std::setw(11) << r.boxes[i].ratio << "  " << r.boxes[i].coverage << '\n';
  t << "relative spread " << r.spread << '\n';
  print(c, j, t.str());
  return r.spread <= o.tol ? 0 : kExitVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heisenberg-group curve and surface toolkit"};
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.require_subcommand(1);
  Common common;
  app.add_flag("--json", common.json, "print machine-readable JSON instead of tables");
  app.add_option("--seed", common.seed, "seed for random subdivision families")->capture_default_str();

  GenCurve gen;
  auto* sc = app.add_subcommand("gen-curve", "generate a planar curve as CSV");
  sc->set_help_flag("--help", "print this help message and exit");  // -h would clash with --h
  sc->add_option("--kind", gen.kind, "koch|koch-slow|quasi-helix|holder|lacunary-infinite|lacunary-null|circle")
      ->capture_default_str();
  sc->add_option("--depth", gen.depth, "dyadic depth of the parameter grid")->capture_default_str();
  sc->add_option("--h", gen.h, "Koch exponent h in [0, 1/2)")->capture_default_str();
  sc->add_option("--beta", gen.beta, "quasi-helix dimension in (1, 2]")->capture_default_str();
  sc->add_option("--alpha", gen.alpha, "Holder exponent")->capture_default_str();
  sc->add_option("--terms", gen.terms, "series terms")->capture_default_str();
  sc->add_option("--amp", gen.amp, "Holder curve amplitude")->capture_default_str();
  sc->add_option("--k0", gen.k0, "first frequency of the null-measure recipe")->capture_default_str();
  sc->add_option("--out", gen.out, "output CSV");

  Lift lift;
  auto* sl = app.add_subcommand("lift", "vertical lift of a planar curve");
  sl->add_option("--input", lift.input, "planar CSV")->required();
  sl->add_option("--z0", lift.z0, "initial height")->capture_default_str();
  sl->add_option("--out", lift.out, "output CSV");

  RoughLiftOpts rl;
  auto* sr = app.add_subcommand("rough-lift", "rough lift by extremal variation");
  sr->add_option("--input", rl.input, "planar CSV")->required();
  sr->add_option("--modulus", rl.modulus, "constant|holder|null-tail")->capture_default_str();
  sr->add_option("--eps", rl.eps, "constant modulus value in (0, 1]")->capture_default_str();
  sr->add_option("--k0", rl.k0, "null-tail first frequency")->capture_default_str();
  sr->add_option("--cap", rl.cap, "variation cap (exit 2 above it)");
  sr->add_option("--out", rl.out, "output CSV");

  Measure ms;
  auto* sm = app.add_subcommand("measure", "Hausdorff area estimates by mesh level");
  sm->add_option("--input", ms.input, "path CSV")->required();
  sm->add_option("--kappa", ms.kappa, "dinf2|contact|param")->capture_default_str();
  sm->add_option("--mesh", ms.mesh, "finest level k (mesh 2^-k)")->capture_default_str();
  sm->add_option("--min-mesh", ms.min_mesh, "coarsest level")->capture_default_str();
  sm->add_option("--random", ms.random, "random subdivisions per level")->capture_default_str();
  sm->add_option("--ceiling", ms.ceiling, "divergence ceiling");
  sm->add_option("--out", ms.out, "output JSON");

  Flatness fl;
  auto* sf = app.add_subcommand("flatness", "Reifenberg epsilon and Whitney profiles");
  sf->add_option("--input", fl.input, "Heisenberg path CSV")->required();
  sf->add_option("--from", fl.from, "first base point, as a fraction of the samples")->capture_default_str();
  sf->add_option("--to", fl.to, "last base point, as a fraction of the samples")->capture_default_str();
  sf->add_option("--max-bases", fl.max_bases, "base point cap")->capture_default_str();
  sf->add_option("--out", fl.out, "output JSON");

  Parametrize pa;
  auto* sp = app.add_subcommand("parametrize", "dyadic midpoint parametrization");
  sp->add_option("--input", pa.input, "Heisenberg path CSV")->required();
  sp->add_option("--eps", pa.eps, "flatness bound, at most 0.5")->capture_default_str();
  sp->add_option("--max-levels", pa.max_levels, "refinement cap")->capture_default_str();
  sp->add_option("--out", pa.out, "chain CSV");

  Surface su;
  auto* ss = app.add_subcommand("surface", "integral curves of W^phi");
  ss->add_option("--field", su.field, "zero|const|linear-y|peano|holder|csv")->capture_default_str();
  ss->add_option("--field-csv", su.field_csv, "y,z,phi samples for --field csv");
  ss->add_option("--value", su.value, "constant for --field const")->capture_default_str();
  ss->add_option("--mode", su.mode, "curve|flow")->capture_default_str();
  ss->add_option("--y0", su.y0, "start y")->capture_default_str();
  ss->add_option("--z0", su.z0, "start z (flow: seed centre)")->capture_default_str();
  ss->add_option("--step", su.step, "Euler step")->capture_default_str();
  ss->add_option("--span", su.span, "parameter span")->capture_default_str();
  ss->add_option("--seeds", su.seeds, "flow seeds")->capture_default_str();
  ss->add_option("--seed-spread", su.seed_spread, "flow seed range")->capture_default_str();
  ss->add_option("--out", su.out, "output CSV");

  Coarea co;
  auto* sa = app.add_subcommand("coarea", "coarea proportionality on three unit boxes");
  sa->add_option("--map", co.map, "identity|rotation|z-shear")->capture_default_str();
  sa->add_option("--grid", co.grid, "volume grid per axis")->capture_default_str();
  sa->add_option("--a-grid", co.a_grid, "level-value grid per axis")->capture_default_str();
  sa->add_option("--tol", co.tol, "allowed relative spread")->capture_default_str();
  sa->add_option("--out", co.out, "output JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (sc->parsed()) return run_gen_curve(common, gen);
    if (sl->parsed()) return run_lift(common, lift);
    if (sr->parsed()) return run_rough_lift(common, rl);
    if (sm->parsed()) return run_measure(common, ms);
    if (sf->parsed()) return run_flatness(common, fl);
    if (sp->parsed()) return run_parametrize(common, pa);
    if (ss->parsed()) return run_surface(common, su);
    if (sa->parsed()) return run_coarea(common, co);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}
