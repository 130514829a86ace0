#include "hgt/scenario.hpp"

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

namespace hgt {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw Error(ErrorKind::SchemaError, "unknown key \"" + it.key() + "\" in " + where);
  }
}

Vec to_vec(const json& j) {
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

double suffix_value(const std::string& id, const std::string& prefix, double fallback) {
  if (id.size() <= prefix.size()) return fallback;
  return std::stod(id.substr(prefix.size()));
}

Mat h_scalar(const MatrixGroup& h, double v) {
  if (h.algebra_dim() == 0) return h.identity();
  return group_exp(h, AlgebraElement{Mat(v * h.generators[0])});
}

// number of leading generators that pairwise commute; the gauge family below
// is exact only on a commuting span
int commuting_span(const MatrixGroup& g, int want) {
  int k = std::min<int>(want, g.algebra_dim());
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if ((g.generators[i] * g.generators[j] - g.generators[j] * g.generators[i]).norm() > 1e-12)
        return 1;
  return k;
}

// gauge map W used by the "gauge:<c>" cocycle and "constant:<c>" potential pair:
// W(x) = exp(-c sum_i x_i gen_i) over the commuting generator span
Mat gauge_w(const MatrixGroup& g, double c, const Vec& x) {
  if (g.algebra_dim() == 0) return g.identity();
  int k = commuting_span(g, static_cast<int>(x.size()));
  Mat a = Mat::Zero(g.dim, g.dim);
  for (int i = 0; i < k; ++i) a -= c * x[i] * g.generators[i];
  return group_exp(g, AlgebraElement{a});
}

double coboundary_chi(const Vec& y, const Vec& x) {
  return std::sin(x[0]) * std::cos(y[1]) + 0.3 * x[1] * y[0];
}

double coboundary_psi(const Vec& z) { return 0.7 * z[1] - 0.2 * std::sin(z[0]); }

}  // namespace

std::function<Mat(const Vec&)> build_cocycle(const std::string& id, const CrossedModule& cm,
                                             const GroupoidPresentation& base) {
  if (id == "trivial") return [e = cm.G.identity()](const Vec&) { return e; };
  if (id.rfind("gauge:", 0) == 0) {
    double c = suffix_value(id, "gauge:", 1.0);
    return [g = cm.G, c, base](const Vec& m) {
      return Mat(gauge_w(g, c, base.target(m)) * gauge_w(g, c, base.source(m)).inverse());
    };
  }
  if (id.rfind("rot:", 0) == 0) {
    double lam = suffix_value(id, "rot:", 1.0);
    if (cm.G.name != "SO2" || base.free_dim != 1)
      throw Error(ErrorKind::BuildError, "rot cocycle needs SO2 over an action groupoid");
    return [lam](const Vec& m) { return rot2(lam * m[0]); };
  }
  if (id.rfind("const_tau:", 0) == 0) {
    double v = suffix_value(id, "const_tau:", 0.4);
    return [a = Mat(cm.tau(h_scalar(cm.H, v)))](const Vec&) { return a; };
  }
  if (id == "coboundary") {
    if (cm.G.name != "R^2" || base.name != "pair")
      throw Error(ErrorKind::BuildError, "coboundary cocycle needs CM4 over a pair groupoid");
    return [](const Vec& m) {
      Vec y = m.head(2), x = m.tail(2);
      Mat a = Mat::Identity(3, 3);
      a(0, 2) = coboundary_chi(y, x);
      a(1, 2) = coboundary_psi(y) - coboundary_psi(x);
      return a;
    };
  }
  throw Error(ErrorKind::BuildError, "unknown cocycle: " + id);
}

std::function<Mat(const Vec&, const Vec&)> build_potential(const std::string& id,
                                                           const CrossedModule& cm) {
  const int d = cm.G.dim;
  if (id == "zero")
    return [d](const Vec&, const Vec&) { return Mat(Mat::Zero(d, d)); };
  if (id.rfind("constant:", 0) == 0) {
    double c = suffix_value(id, "constant:", 1.0);
    if (cm.G.algebra_dim() == 0) return [d](const Vec&, const Vec&) { return Mat(Mat::Zero(d, d)); };
    return [c, g = cm.G](const Vec&, const Vec& vx) {
      int k = commuting_span(g, static_cast<int>(vx.size()));
      Mat a = Mat::Zero(g.dim, g.dim);
      for (int i = 0; i < k; ++i) a += c * vx[i] * g.generators[i];
      return a;
    };
  }
  if (id.rfind("curl:", 0) == 0) {
    double c = suffix_value(id, "curl:", 1.0);
    if (cm.G.algebra_dim() == 0) return [d](const Vec&, const Vec&) { return Mat(Mat::Zero(d, d)); };
    return [c, gen = cm.G.generators[0]](const Vec& x, const Vec& vx) {
      return Mat(c * x[1] * vx[0] * gen);
    };
  }
  throw Error(ErrorKind::BuildError, "unknown potential: " + id);
}

PseudoPrincipalBundle build_pseudo(const std::string& id, const CrossedModule& cm,
                                   const GroupoidPresentation& base) {
  PseudoPrincipalBundle pb;
  pb.cm = cm;
  pb.pg.base = base;
  pb.pg.G = cm.G;
  const Mat eh = cm.H.identity();
  if (id.rfind("strict:", 0) == 0) {
    pb.pg.cocycle = build_cocycle(id.substr(7), cm, base);
    pb.Hu = [eh](const E0Point&) { return eh; };
    pb.Hm = [eh](const Vec&, const Vec&) { return eh; };
    return pb;
  }
  if (id.rfind("const_tau:", 0) == 0) {
    double v = suffix_value(id, "const_tau:", 0.4);
    Mat h0 = h_scalar(cm.H, v);
    pb.pg.cocycle = [a = Mat(cm.tau(h0))](const Vec&) { return a; };
    pb.Hu = [h0](const E0Point&) { return h0; };
    pb.Hm = [h0](const Vec&, const Vec&) { return h0; };
    return pb;
  }
  if (id == "coboundary") {
    if (cm.G.name != "R^2" || base.name != "pair")
      throw Error(ErrorKind::BuildError, "coboundary pseudo data needs CM4 over a pair groupoid");
    pb.pg.cocycle = build_cocycle("coboundary", cm, base);
    pb.Hu = [H = cm.H](const E0Point& p) { return h_scalar(H, coboundary_chi(p.x, p.x)); };
    pb.Hm = [H = cm.H](const Vec& m2, const Vec& m1) {
      Vec z = m2.head(2), y = m2.tail(2), x = m1.tail(2);
      return h_scalar(H, coboundary_chi(z, y) + coboundary_chi(y, x) - coboundary_chi(z, x));
    };
    return pb;
  }
  if (id == "coboundary0") {
    // trivial unital deviation with a nontrivial compositional one
    if (cm.G.dim != 1 || base.name != "pair")
      throw Error(ErrorKind::BuildError, "coboundary0 needs CM2 over a pair groupoid");
    pb.pg.cocycle = [e = cm.G.identity()](const Vec&) { return e; };
    pb.Hu = [eh](const E0Point&) { return eh; };
    const int n = base.obj_dim;
    auto chi0 = [](const Vec& y, const Vec& x) {
      return std::sin(y[0] - x[0]) * std::cos(y[1] + x[1]);
    };
    pb.Hm = [H = cm.H, n, chi0](const Vec& m2, const Vec& m1) {
      Vec z = m2.head(n), y = m2.tail(n), x = m1.tail(n);
      return h_scalar(H, chi0(z, y) + chi0(y, x) - chi0(z, x));
    };
    return pb;
  }
  if (id == "assoc_break") {
    if (cm.G.dim != 1 || base.name != "pair")
      throw Error(ErrorKind::BuildError, "assoc_break needs CM2 over a pair groupoid");
    pb.pg.cocycle = [e = cm.G.identity()](const Vec&) { return e; };
    pb.Hu = [eh](const E0Point&) { return eh; };
    const int n = base.obj_dim;
    pb.Hm = [H = cm.H, n](const Vec& m2, const Vec& m1) {
      double z = m2.head(n)[0], y = m2.tail(n)[0], x = m1.tail(n)[0];
      return h_scalar(H, (z - y) * (z - y) * (y - x) * (y - x));
    };
    return pb;
  }
  throw Error(ErrorKind::BuildError, "unknown pseudo data: " + id);
}

namespace {

struct Ctx {
  json spec;
  std::string name;
  std::uint64_t seed = 42;
  int grid = 128;
  double member_tol = 1e-6;

  CrossedModule cm;
  bool has_cm = false;
  GroupoidPresentation base;
  bool has_base = false;
  PseudoPrincipalBundle pseudo;
  bool has_pseudo = false;
  DecoratedBundle dec;
  bool has_bundle = false;
  StrictConnection omega;
  bool has_omega = false;
  std::vector<LazyPath> paths;
  json path_specs;

  const CrossedModule& need_cm() const {
    if (!has_cm) throw Error(ErrorKind::BuildError, "scenario has no crossed_module");
    return cm;
  }
  const GroupoidPresentation& need_base() const {
    if (!has_base) throw Error(ErrorKind::BuildError, "scenario has no base groupoid");
    return base;
  }
  const DecoratedBundle& need_bundle() const {
    if (!has_bundle) throw Error(ErrorKind::BuildError, "scenario has no bundle");
    return dec;
  }
  const StrictConnection& need_omega() const {
    if (!has_omega) throw Error(ErrorKind::BuildError, "scenario has no connection");
    return omega;
  }
  const LazyPath& need_path(size_t i) const {
    if (i >= paths.size())
      throw Error(ErrorKind::BuildError, "scenario path index out of range");
    return paths[i];
  }
};

SampledPath build_segment(const json& j, int default_grid) {
  check_keys(j, {"grid", "plateau", "waypoints", "constant"}, "path segment");
  int grid = j.value("grid", default_grid);
  int plateau = j.value("plateau", std::max(4, grid / 16));
  if (j.contains("constant")) return SampledPath::constant(to_vec(j["constant"]), grid, plateau);
  if (!j.contains("waypoints"))
    throw Error(ErrorKind::SchemaError, "path segment needs waypoints or constant");
  std::vector<Vec> wp;
  for (const auto& w : j["waypoints"]) wp.push_back(to_vec(w));
  return SampledPath::from_waypoints(wp, grid, plateau);
}

LazyPath build_lazy(const json& j, const GroupoidPresentation& base, int default_grid) {
  check_keys(j, {"arrows", "segments"}, "path");
  std::vector<Vec> arrows;
  for (const auto& a : j["arrows"]) arrows.push_back(to_vec(a));
  std::vector<SampledPath> segs;
  if (j.contains("segments"))
    for (const auto& s : j["segments"]) segs.push_back(build_segment(s, default_grid));
  return make_lazy_path(base, arrows, segs, 1e-6);
}

SampledPath zeta_from_recipe(const json& j, const GroupoidPresentation& base,
                             const SampledPath& along) {
  check_keys(j, {"free_waypoints"}, "zeta recipe");
  std::vector<Vec> wp;
  for (const auto& w : j["free_waypoints"]) wp.push_back(to_vec(w));
  SampledPath freep = SampledPath::from_waypoints(wp, along.grid(), along.plateau_len);
  SampledPath zeta;
  zeta.samples.resize(along.grid() + 1, base.mor_dim);
  for (int i = 0; i <= along.grid(); ++i)
    zeta.samples.row(i) = base.mor_from_free(freep.node(i), along.node(i)).transpose();
  zeta.plateau_len = along.plateau_len;
  return zeta;
}

SampledPath zeta_from_factors(const json& j, const GroupoidPresentation& base, int grid,
                              int plateau) {
  check_keys(j, {"free_waypoints", "src_waypoints"}, "thin-deformation zeta");
  std::vector<Vec> fw, sw;
  for (const auto& w : j["free_waypoints"]) fw.push_back(to_vec(w));
  for (const auto& w : j["src_waypoints"]) sw.push_back(to_vec(w));
  SampledPath freep = base.free_dim > 0
                          ? SampledPath::from_waypoints(fw, grid, plateau)
                          : SampledPath::constant(Vec::Zero(0), grid, plateau);
  SampledPath srcp = SampledPath::from_waypoints(sw, grid, plateau);
  SampledPath zeta;
  zeta.samples.resize(grid + 1, base.mor_dim);
  for (int i = 0; i <= grid; ++i)
    zeta.samples.row(i) =
        base.mor_from_free(base.free_dim > 0 ? freep.node(i) : Vec(Vec::Zero(0)), srcp.node(i))
            .transpose();
  zeta.plateau_len = plateau;
  return zeta;
}

LazyPath random_lazy(const GroupoidPresentation& base, const Vec& from, int order, Rng& rng,
                     int grid) {
  std::vector<Vec> arrows;
  std::vector<SampledPath> segs;
  arrows.push_back(base.sample_mor_from(from, rng));
  int plateau = std::max(4, grid / 16);
  for (int i = 0; i < order; ++i) {
    Vec a = base.target(arrows.back());
    Vec mid = base.sample_obj(rng) * 0.5;
    Vec end = base.sample_obj(rng) * 0.5;
    segs.push_back(SampledPath::from_waypoints({a, mid, end}, grid, plateau));
    arrows.push_back(base.sample_mor_from(end, rng));
  }
  return make_lazy_path(base, arrows, segs, 1e-6);
}

Ctx build_context(const json& spec, const RunOptions& opts) {
  if (!spec.is_object()) throw Error(ErrorKind::SchemaError, "scenario must be a JSON object");
  check_keys(spec,
             {"schema", "name", "seed", "grid", "tolerances", "crossed_module", "base", "bundle",
              "connection", "paths", "checks"},
             "scenario");
  if (!spec.contains("schema") || spec["schema"].get<int>() != 1)
    throw Error(ErrorKind::SchemaError, "scenario requires \"schema\": 1");
  Ctx ctx;
  ctx.spec = spec;
  ctx.name = spec.value("name", "scenario");
  ctx.seed = opts.seed.value_or(spec.value("seed", std::uint64_t{42}));
  ctx.grid = opts.grid.value_or(spec.value("grid", 128));
  if (spec.contains("tolerances")) {
    check_keys(spec["tolerances"], {"member_tol"}, "tolerances");
    ctx.member_tol = spec["tolerances"].value("member_tol", 1e-6);
  }

  if (spec.contains("crossed_module")) {
    ctx.cm = crossed_module_by_name(spec["crossed_module"].get<std::string>());
    ctx.has_cm = true;
  }
  if (spec.contains("base")) {
    const json& b = spec["base"];
    check_keys(b, {"kind", "n", "half_width"}, "base");
    int n = b.value("n", 2);
    double hw = b.value("half_width", 2.0);
    ctx.base = groupoid_by_name(b["kind"].get<std::string>(), n, Box::cube(n, hw));
    ctx.has_base = true;
  }
  if (spec.contains("bundle")) {
    const json& b = spec["bundle"];
    check_keys(b, {"construction", "cocycle", "pseudo", "Hmap"}, "bundle");
    std::string cons = b.value("construction", "decorate");
    if (cons == "decorate") {
      PrincipalGroupBundle pg{ctx.need_base(), ctx.need_cm().G,
                              build_cocycle(b.value("cocycle", "trivial"), ctx.cm, ctx.base)};
      ctx.dec = decorate(pg, ctx.cm);
    } else if (cons == "quasi_decorate") {
      ctx.pseudo = build_pseudo(b.value("pseudo", "strict:trivial"), ctx.need_cm(),
                                ctx.need_base());
      ctx.has_pseudo = true;
      ctx.dec = quasi_decorate(ctx.pseudo);
    } else {
      throw Error(ErrorKind::SchemaError, "unknown bundle construction: " + cons);
    }
    if (b.contains("Hmap")) {
      double v = suffix_value(b["Hmap"].get<std::string>(), "constant:", 0.0);
      Mat h0 = h_scalar(ctx.cm.H, v);
      ctx.dec.connection = make_Ch(
          ctx.dec.bundle, ctx.dec.connection,
          [h0](const Vec&, const E0Point&) { return h0; });
    }
    ctx.has_bundle = true;
  }
  if (spec.contains("connection")) {
    const json& c = spec["connection"];
    check_keys(c, {"A0"}, "connection");
    ctx.omega = trivial_connection(ctx.need_bundle().bundle,
                                   build_potential(c.value("A0", "zero"), ctx.need_cm()));
    ctx.has_omega = true;
  }
  if (spec.contains("paths")) {
    ctx.path_specs = spec["paths"];
    for (const auto& p : spec["paths"]) ctx.paths.push_back(build_lazy(p, ctx.need_base(), ctx.grid));
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// suites

using Handler = SuiteResult (*)(const Ctx&, const json&, std::uint64_t);

SuiteResult suite_peiffer(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int n = p.value("n_samples", 500);
  double tol = p.value("tol", 1e-12);
  SuiteResult r;
  r.report = check_peiffer(ctx.need_cm(), n, seed);
  r.pass = r.report.all_below(tol);
  return r;
}

SuiteResult suite_groupoid_axioms(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int n = p.value("n_samples", 500);
  double tol = p.value("tol", 1e-10);
  SuiteResult r;
  r.report = groupoid_axioms(ctx.need_base(), n, seed);
  r.pass = r.report.all_below(tol);
  return r;
}

SuiteResult suite_bundle_axioms(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int n = p.value("n_samples", 200);
  double tol = p.value("tol", 1e-10);
  SuiteResult r;
  r.report = check_bundle_axioms(ctx.need_bundle().bundle, n, seed);
  r.pass = r.report.all_below(tol);
  return r;
}

SuiteResult suite_coherence(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int n = p.value("n_samples", 100);
  double tol = p.value("tol", 1e-9);
  SuiteResult r;
  PseudoPrincipalBundle pb =
      p.contains("pseudo")
          ? build_pseudo(p["pseudo"].get<std::string>(), ctx.need_cm(), ctx.need_base())
          : (ctx.has_pseudo ? ctx.pseudo
                            : extract_pseudo(ctx.need_bundle().bundle, ctx.dec.connection));
  r.report = check_coherence(pb, n, seed);
  r.pass = r.report.all_below(tol);
  if (!r.pass) r.details = "first failing label: " + r.report.worst_label();
  return r;
}

SuiteResult suite_classify(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int n = p.value("n_samples", 100);
  std::string expect = p.value("expect", "categorical");
  SuiteResult r;
  ClassifyResult cr = classify_connection(ctx.need_bundle().bundle, ctx.dec.connection, n, seed);
  r.report = cr.report;
  r.details = connection_class_name(cr.cls);
  r.pass = (r.details == expect);
  return r;
}

SuiteResult suite_grothendieck(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int n = p.value("n_samples", 100);
  double tol = p.value("tol", 1e-9);
  SuiteResult r;
  const auto& dec = ctx.need_bundle();
  GrothendieckRoundtrip rt = grothendieck_roundtrip(dec.bundle, dec.connection, n, seed);
  r.report = rt.report;
  if (ctx.has_pseudo) {
    // recovery of the pseudo data that built the bundle
    Rng rng(seed + 3);
    double hu = 0.0, hm = 0.0, mu = 0.0;
    for (int i = 0; i < std::max(8, n / 4); ++i) {
      E0Point pt = ctx.pseudo.pg.sample_point(rng);
      hu = std::max(hu, (rt.extracted.Hu(pt) - ctx.pseudo.Hu(pt)).norm());
      Vec g1 = ctx.base.sample_mor(rng);
      Vec g2 = ctx.base.sample_mor_from(ctx.base.target(g1), rng);
      hm = std::max(hm, (rt.extracted.Hm(g2, g1) - ctx.pseudo.Hm(g2, g1)).norm());
      mu = std::max(mu, (rt.extracted.pg.cocycle(g1) - ctx.pseudo.pg.cocycle(g1)).norm());
    }
    r.report.add("recover_Hu", hu);
    r.report.add("recover_Hm", hm);
    r.report.add("recover_mu", mu);
  }
  r.pass = r.report.all_below(tol);
  return r;
}

SuiteResult suite_strict_connection(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int n = p.value("n_samples", 100);
  double tol = p.value("tol", 1e-8);
  SuiteResult r;
  r.report = validate_strict(ctx.need_omega(), n, seed);
  const auto& b = ctx.need_bundle().bundle;
  PrincipalGroupBundle pg{b.base, b.cm.G, b.cocycle};
  r.report.add("hypothesis", pullback_hypothesis_residual(pg, ctx.omega.A0, n, seed + 1));
  r.pass = r.report.all_below(tol);
  return r;
}

SuiteResult suite_lemma_identities(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int n = p.value("n_samples", 100);
  double tol = p.value("tol", 1e-7);
  SuiteResult r;
  r.report = lemma_transport_identities(ctx.need_omega(), n, seed, p.value("grid", 64));
  r.pass = r.report.all_below(tol);
  return r;
}

SuiteResult suite_classical_reduction(const Ctx& ctx, const json& p, std::uint64_t seed) {
  (void)seed;
  double tol = p.value("tol", 1e-6);
  double c = p.value("c", 1.5707963267948966);
  SuiteResult r;
  const auto& dec = ctx.need_bundle();
  const auto& omega = ctx.need_omega();
  const LazyPath& gamma = ctx.need_path(p.value("path_index", 0));
  const SampledPath& alpha = gamma.paths.at(0);

  Mat gen = ctx.cm.G.generators.at(0);
  double dx = alpha.end()[0] - alpha.start()[0];
  Mat oracle = Mat(Mat(-c * dx * gen).exp());

  TorsorMap t = lazy_transport(dec.bundle, dec.connection, omega, gamma);
  E0Point z{t.src_x, ctx.cm.G.identity()};
  double rel = (t.obj(z).g - oracle).norm() / oracle.norm();
  r.report.add("rel_error", rel);

  // order check against the closed form over grid refinements
  const json& seg = ctx.path_specs.at(p.value("path_index", 0))["segments"].at(0);
  std::vector<double> errs, hs;
  int k0 = seg.value("grid", ctx.grid);
  int plateau0 = seg.value("plateau", std::max(4, k0 / 16));
  for (int m = 0; m < 4; ++m) {
    int k = k0 << m;
    json seg2 = seg;
    seg2["grid"] = k;
    seg2["plateau"] = plateau0 << m;  // keep the warp fixed across refinements
    SampledPath a2 = build_segment(seg2, ctx.grid);
    E0Point p0{a2.start(), ctx.cm.G.identity()};
    Mat endg = horizontal_lift(omega, a2, p0).endpoint.g;
    errs.push_back((endg - oracle).norm());
    hs.push_back(1.0 / k);
  }
  // least-squares slope of log err vs log h
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < errs.size(); ++i) {
    double lx = std::log(hs[i]), ly = std::log(std::max(errs[i], 1e-300));
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  double nn = static_cast<double>(errs.size());
  double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  r.report.add("order_slope", slope);
  r.report.add("coarse_error", errs[0]);
  r.pass = rel < tol && slope > 3.8 && slope < 4.2;
  char buf[64];
  std::snprintf(buf, sizeof buf, "slope %.3f", slope);
  r.details = buf;
  return r;
}

TransformSpec parse_transform(const Ctx& ctx, const json& p, const LazyPath& gamma) {
  TransformSpec spec;
  spec.kind = p.value("transform", "reparametrize");
  spec.index = p.value("index", 0);
  spec.warp = p.value("warp", 0.05);
  if (spec.kind == "conjugate")
    spec.zeta = zeta_from_recipe(p.at("zeta"), ctx.base, gamma.paths.at(spec.index));
  if (spec.kind == "thin_deform") {
    int grid = gamma.paths.empty() ? ctx.grid : gamma.paths[0].grid();
    int plateau = gamma.paths.empty() ? std::max(4, grid / 16) : gamma.paths[0].plateau_len;
    for (const auto& z : p.at("zetas"))
      spec.zetas.push_back(zeta_from_factors(z, ctx.base, grid, plateau));
  }
  return spec;
}

SuiteResult suite_invariance(const Ctx& ctx, const json& p, std::uint64_t seed) {
  (void)seed;
  double tol = p.value("tol", 1e-6);
  const LazyPath& gamma = ctx.need_path(p.value("path_index", 0));
  TransformSpec spec = parse_transform(ctx, p, gamma);
  SuiteResult r;
  r.report = invariance_suite(ctx.need_bundle().bundle, ctx.dec.connection, ctx.need_omega(),
                              gamma, spec);
  r.pass = r.report.get("quotient_equal") == 0.0 && r.report.get("divider_distance") < tol;
  if (spec.kind == "reparametrize") r.pass = r.pass && r.report.get("obj_agreement") < 1e-7;
  r.details = spec.kind;
  return r;
}

SuiteResult suite_functoriality(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int pairs = p.value("n_pairs", 10);
  int order = p.value("order", 1);
  double tol = p.value("tol", 1e-6);
  Rng rng(seed);
  SuiteResult r;
  r.report.name = "functor";
  for (const char* l : {"composition", "unit", "inverse", "max_divider"}) r.report.add(l, 0.0);
  const auto& dec = ctx.need_bundle();
  for (int i = 0; i < pairs; ++i) {
    Vec x0 = ctx.base.sample_obj(rng) * 0.5;
    LazyPath g1 = random_lazy(ctx.base, x0, order, rng, p.value("grid", 64));
    LazyPath g2 = random_lazy(ctx.base, lazy_target(ctx.base, g1), order, rng, p.value("grid", 64));
    ResidualReport rep = functor_suite(dec.bundle, dec.connection, ctx.need_omega(), g1, g2);
    for (const char* l : {"composition", "unit", "inverse"}) r.report.add_max(l, rep.get(l));
    r.report.add_max("max_divider", rep.get("composition_divider"));
    r.report.add_max("max_divider", rep.get("unit_divider"));
    r.report.add_max("max_divider", rep.get("inverse_divider"));
  }
  r.pass = r.report.get("composition") == 0.0 && r.report.get("unit") == 0.0 &&
           r.report.get("inverse") == 0.0 && r.report.get("max_divider") < tol;
  return r;
}

SuiteResult suite_naturality(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int n = p.value("n_samples", 20);
  double tol = p.value("tol", 1e-7);
  SuiteResult r;
  const auto& dec = ctx.need_bundle();
  GrothendieckRoundtrip rt = grothendieck_roundtrip(dec.bundle, dec.connection, 32, seed);
  const LazyPath& gamma = ctx.need_path(p.value("path_index", 0));
  r.report = naturality_suite(rt.rebuilt.bundle, rt.rebuilt.connection, dec.bundle,
                              dec.connection, rt.theta, ctx.need_omega(), gamma.paths.at(0), n,
                              seed);
  r.pass = r.report.all_below(tol);
  return r;
}

SuiteResult suite_pullback(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int n = p.value("n_samples", 20);
  double tol = p.value("tol", 1e-7);
  SuiteResult r;
  const auto& dec = ctx.need_bundle();
  GroupoidMorphism inc;
  Box sub{Vec(ctx.base.obj_box.lo * 0.5), Vec(ctx.base.obj_box.hi * 0.5)};
  inc.domain = discrete_groupoid(ctx.base.obj_dim, sub);
  inc.F0 = [](const Vec& y) { return y; };
  inc.F1 = [gp = ctx.base](const Vec& y) { return gp.unit(y); };
  const LazyPath& gamma = ctx.need_path(p.value("path_index", 0));
  r.report = pullback_suite(inc, dec.bundle, dec.connection, ctx.need_omega(), gamma.paths.at(0),
                            n, seed);
  r.pass = r.report.all_below(tol);
  return r;
}

SuiteResult suite_quotient_law(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int pairs = p.value("n_pairs", 20);
  SuiteResult r;
  r.report.name = "quotient_law";
  const auto& dec = ctx.need_bundle();
  const auto& b = dec.bundle;
  if (b.cm.G.name != "R^2")
    throw Error(ErrorKind::BuildError, "quotient_law is the CM4 coset test");
  Rng rng(seed);
  int correct = 0;
  for (int i = 0; i < pairs; ++i) {
    Vec x = b.base.sample_obj(rng);
    bool expect_equal = (i % 2 == 0);
    Mat d = Mat::Identity(3, 3);
    d(0, 2) = rng.uniform(-1.0, 1.0);
    d(1, 2) = expect_equal ? 0.0 : rng.uniform(0.1, 1.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    TorsorMap f = identity_torsor(x);
    TorsorMap fd = identity_torsor(x);
    fd.obj = [b, d](const E0Point& q) { return b.act0(q, d); };
    fd.mor = [b, d](const Bundle2Arrow& z) { return b.act1(z, TwoGroupArrow{b.cm.H.identity(), d}); };
    QuotientWitness w = quotient_equal(b, f, fd, ctx.member_tol);
    if (w.equal == expect_equal) ++correct;
  }
  r.report.add("misclassified", static_cast<double>(pairs - correct));
  r.pass = (correct == pairs);
  return r;
}

SuiteResult suite_vb(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int n = p.value("n_samples", 100);
  double tol = p.value("tol", 1e-10);
  SuiteResult r;
  const auto& dec = ctx.need_bundle();
  std::string action = p.value("action", "defining");
  std::string vname = p.value("V", "arrow");
  TwoVectorSpace v = vname == "algebra" ? algebra_2vector(ctx.need_cm())
                     : vname == "line"  ? line_2vector()
                                        : arrow_2vector(ctx.need_cm().G.dim);
  TwoGroupLinearAction act = action == "trivial"     ? trivial_action(v.v0_dim(), v.v1_dim())
                             : action == "adjoint"   ? adjoint_action(ctx.cm)
                             : action == "unipotent" ? unipotent_action(ctx.cm)
                                                     : defining_action(ctx.cm);
  VBGroupoid vb = associate(dec.bundle, act, v, 50, seed);
  r.report = check_vb_groupoid(vb, n, seed + 1);
  ResidualReport cl = check_cleavage(vb, dec.connection, n, seed + 2);
  r.report.add("cleavage_unital", cl.get("unital"));
  r.report.add("cleavage_flat", cl.get("flat"));
  bool pass = r.report.get("interchange") < tol && r.report.get("assoc") < tol;
  if (dec.connection.cls == ConnectionClass::Categorical)
    pass = pass && cl.get("flat") < p.value("flat_tol", 1e-9);

  if (p.value("transport", true) && ctx.has_omega && !ctx.paths.empty()) {
    const LazyPath& gamma = ctx.need_path(p.value("path_index", 0));
    VBTransport vt = vb_transport(vb, dec.connection, ctx.omega, gamma);
    TorsorMap tm = lazy_transport(dec.bundle, dec.connection, ctx.omega, gamma);
    E0Point z{tm.src_x, ctx.cm.G.identity()};
    Mat expected = act.rho0(tm.obj(z).g);
    r.report.add("transport_consistency", (vt.obj_map - expected).norm());
    pass = pass && r.report.get("transport_consistency") < p.value("transport_tol", 1e-9);
  }
  r.pass = pass;
  return r;
}

SuiteResult suite_pseudofunctor(const Ctx& ctx, const json& p, std::uint64_t seed) {
  int n = p.value("n_samples", 40);
  double tol = p.value("tol", 1e-9);
  SuiteResult r;
  const auto& dec = ctx.need_bundle();
  r.report = pseudofunctor_coherence(dec.bundle, dec.connection, n, seed);
  r.pass = r.report.all_below(tol);
  return r;
}

SuiteResult suite_smoothness(const Ctx& ctx, const json& p, std::uint64_t seed) {
  (void)seed;
  double c = p.value("c", 0.7);
  double tol = p.value("tol", 1e-5);
  int nu = p.value("n_u", 9);
  double u0 = p.value("u0", 0.5), u1 = p.value("u1", 1.3);
  int grid = p.value("grid", 256);
  SuiteResult r;
  const auto& dec = ctx.need_bundle();
  const auto& omega = ctx.need_omega();
  const auto& gp = ctx.base;
  if (gp.name != "pair")
    throw Error(ErrorKind::BuildError, "smoothness family needs the pair groupoid");
  Vec x0 = Vec::Zero(gp.obj_dim);
  int plateau = std::max(4, grid / 16);

  auto family = [&](double u) {
    Vec x1 = x0;
    x1[0] += u;
    SampledPath alpha = SampledPath::from_waypoints({x0, x1}, grid, plateau);
    Vec back = gp.mor_from_free(x0, x1);  // pair arrow x1 -> x0
    return make_lazy_path(gp, {gp.unit(x0), back}, {alpha}, 1e-9);
  };
  std::vector<double> us(nu);
  for (int i = 0; i < nu; ++i) us[i] = u0 + (u1 - u0) * i / (nu - 1);
  SmoothnessProbe pr = smoothness_probe(dec.bundle, dec.connection, omega, family, us);
  r.report = pr.report;

  // closed form: endpoint(u) = exp(-u c J) so d2/du2 = (cJ)^2 exp(-u c J)
  Mat gen = ctx.cm.G.generators.at(0);
  double dd2_err = 0.0;
  for (size_t i = 1; i + 1 < us.size(); ++i) {
    Mat analytic = Mat((c * gen) * (c * gen) * Mat(-us[i] * c * gen).exp());
    dd2_err = std::max(dd2_err, (pr.dd2[i - 1] - analytic).norm());
  }
  r.report.add("dd2_error", dd2_err);
  r.pass = dd2_err < tol;
  return r;
}

struct SuiteEntry {
  const char* name;
  Handler handler;
  std::initializer_list<const char*> keys;
};

const SuiteEntry kSuites[] = {
    {"peiffer", suite_peiffer, {"n_samples", "tol"}},
    {"groupoid_axioms", suite_groupoid_axioms, {"n_samples", "tol"}},
    {"bundle_axioms", suite_bundle_axioms, {"n_samples", "tol"}},
    {"coherence", suite_coherence, {"n_samples", "tol", "pseudo"}},
    {"classify", suite_classify, {"n_samples", "expect"}},
    {"grothendieck", suite_grothendieck, {"n_samples", "tol"}},
    {"strict_connection", suite_strict_connection, {"n_samples", "tol"}},
    {"lemma_identities", suite_lemma_identities, {"n_samples", "tol", "grid"}},
    {"classical_reduction", suite_classical_reduction, {"c", "tol", "path_index"}},
    {"invariance", suite_invariance,
     {"transform", "index", "warp", "zeta", "zetas", "path_index", "tol"}},
    {"functoriality", suite_functoriality, {"n_pairs", "order", "tol", "grid"}},
    {"naturality", suite_naturality, {"n_samples", "tol", "path_index"}},
    {"pullback", suite_pullback, {"n_samples", "tol", "path_index"}},
    {"quotient_law", suite_quotient_law, {"n_pairs"}},
    {"pseudofunctor", suite_pseudofunctor, {"n_samples", "tol"}},
    {"vb", suite_vb,
     {"n_samples", "tol", "V", "action", "flat_tol", "transport", "transport_tol", "path_index"}},
    {"smoothness", suite_smoothness, {"c", "tol", "n_u", "u0", "u1", "grid"}},
};

}  // namespace

ScenarioReport run_scenario(const json& spec, const RunOptions& opts) {
  Ctx ctx = build_context(spec, opts);
  ScenarioReport rep;
  rep.scenario = ctx.name;
  rep.seed = ctx.seed;
  rep.grid = ctx.grid;
  rep.pass = true;
  if (!spec.contains("checks")) return rep;

  struct Pending {
    std::string name;
    std::future<SuiteResult> fut;
  };
  std::vector<Pending> pending;
  size_t idx = 0;
  for (const auto& chk : spec["checks"]) {
    std::string name = chk.at("suite").get<std::string>();
    size_t my_idx = idx++;
    if (!opts.suite_filter.empty() && name != opts.suite_filter) continue;
    const SuiteEntry* entry = nullptr;
    for (const auto& e : kSuites)
      if (name == e.name) entry = &e;
    if (!entry) throw Error(ErrorKind::SchemaError, "unknown suite: " + name);
    {
      json params_only = chk;
      params_only.erase("suite");
      check_keys(params_only, entry->keys, "suite " + name);
    }
    std::uint64_t seed = ctx.seed ^ fnv1a(name) ^ (0x9e3779b97f4a7c15ull * (my_idx + 1));
    json params = chk;
    params.erase("suite");
    pending.push_back(
        {name, std::async(std::launch::async, [&ctx, params, seed, h = entry->handler, name]() {
           SuiteResult r = h(ctx, params, seed);
           r.name = name;
           return r;
         })});
  }
  for (auto& p : pending) {
    SuiteResult r = p.fut.get();
    rep.pass = rep.pass && r.pass;
    rep.suites.push_back(std::move(r));
  }
  return rep;
}

ScenarioReport run_scenario_file(const std::string& path, const RunOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::SchemaError, "cannot open scenario file: " + path);
  json spec;
  try {
    in >> spec;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::SchemaError, std::string("scenario is not valid JSON: ") + e.what());
  }
  return run_scenario(spec, opts);
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void json_escape(std::ostringstream& os, const std::string& s) {
  os << '"';
  for (char c : s) {
    if (c == '"' || c == '\\') os << '\\' << c;
    else if (c == '\n') os << "\\n";
    else os << c;
  }
  os << '"';
}

}  // namespace

std::string ScenarioReport::to_json() const {
  std::ostringstream os;
  os << "{\n  \"scenario\": ";
  json_escape(os, scenario);
  os << ",\n  \"seed\": " << seed << ",\n  \"grid\": " << grid << ",\n  \"suites\": [";
  for (size_t i = 0; i < suites.size(); ++i) {
    const auto& s = suites[i];
    os << (i ? ",\n    {" : "\n    {") << "\"name\": ";
    json_escape(os, s.name);
    os << ", \"pass\": " << (s.pass ? "true" : "false") << ", \"residuals\": {";
    for (size_t j = 0; j < s.report.entries.size(); ++j) {
      if (j) os << ", ";
      json_escape(os, s.report.entries[j].first);
      os << ": " << fmt_double(s.report.entries[j].second);
    }
    os << "}";
    if (!s.details.empty()) {
      os << ", \"details\": ";
      json_escape(os, s.details);
    }
    os << "}";
  }
  os << "\n  ],\n  \"pass\": " << (pass ? "true" : "false") << "\n}\n";
  return os.str();
}

std::string list_builtins() {
  std::ostringstream os;
  os << "groups: SO2 SO3 R^n trivial\n"
     << "crossed modules: CM1 CM2 CM3 CM4 conj:<group> discrete:<group> twisted:SO2\n"
     << "groupoids: pair discrete action:SO2\n"
     << "potentials: zero constant:<c> curl:<c>\n"
     << "cocycles: trivial gauge:<c> rot:<lambda> const_tau:<v> coboundary\n"
     << "pseudo data: strict:<cocycle> const_tau:<v> coboundary coboundary0 assoc_break\n"
     << "actions: trivial defining adjoint unipotent\n"
     << "2-vector spaces: arrow algebra line\n"
     << "suites:";
  for (const auto& e : kSuites) os << ' ' << e.name;
  os << '\n';
  return os.str();
}

}  // namespace hgt
