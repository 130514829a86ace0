#include "hgt/transport.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace hgt {

TorsorMap identity_torsor(const Vec& x) {
  return {x, x, [](const E0Point& p) { return p; }, [](const Bundle2Arrow& d) { return d; }};
}

TorsorMap compose_torsor(const TorsorMap& second, const TorsorMap& first, double tol) {
  if ((first.dst_x - second.src_x).norm() > tol)
    throw Error(ErrorKind::FiberMismatch, "torsor maps do not chain");
  TorsorMap r;
  r.src_x = first.src_x;
  r.dst_x = second.dst_x;
  r.obj = [f = first.obj, s = second.obj](const E0Point& p) { return s(f(p)); };
  r.mor = [f = first.mor, s = second.mor](const Bundle2Arrow& d) { return s(f(d)); };
  return r;
}

TorsorMap cartesian_transport(const Principal2Bundle& b, const QuasiConnection& c,
                              const Vec& gamma) {
  Vec gi = b.base.inverse(gamma);
  TorsorMap t;
  t.src_x = b.base.target(gamma);
  t.dst_x = b.base.source(gamma);
  t.obj = [b, c, gi, x = t.src_x](const E0Point& p) {
    if ((p.x - x).norm() > 1e-6)
      throw Error(ErrorKind::FiberMismatch, "point is not over t(gamma)");
    return c.mu_C(b, gi, p);
  };
  t.mor = [b, c, gi, x = t.src_x](const Bundle2Arrow& z) {
    if ((b.base.source(z.gamma) - x).norm() > 1e-6)
      throw Error(ErrorKind::FiberMismatch, "arrow is not in the fiber over t(gamma)");
    E0Point p = b.src(z), q = b.tgt(z);
    Bundle2Arrow lq = c.lift(gi, q), lp = c.lift(gi, p);
    return b.compose(b.compose(lq, z, 1e-6), b.inverse(lp), 1e-6);
  };
  return t;
}

namespace {

// One RK4 pass for g' = -A(t) g; A depends on t only, so the update is a
// right-translation and the lift is exactly G-equivariant.
std::vector<Mat> integrate_frame(const std::function<Mat(double)>& a_of_t, const Mat& g0,
                                 int steps) {
  std::vector<Mat> frames;
  frames.reserve(steps + 1);
  Mat g = g0;
  frames.push_back(g);
  const double dt = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    double t = i * dt;
    Mat a1 = a_of_t(t), a2 = a_of_t(t + 0.5 * dt), a4 = a_of_t(t + dt);
    Mat k1 = -a1 * g;
    Mat k2 = -a2 * (g + 0.5 * dt * k1);
    Mat k3 = -a2 * (g + 0.5 * dt * k2);
    Mat k4 = -a4 * (g + dt * k3);
    g += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!g.allFinite())
      throw Error(ErrorKind::NonFiniteState, "horizontal lift produced a non-finite state");
    frames.push_back(g);
  }
  return frames;
}

}  // namespace

LiftResult horizontal_lift(const StrictConnection& omega, const SampledPath& alpha,
                           const E0Point& p0, int steps) {
  if ((p0.x - alpha.start()).norm() > 1e-6)
    throw Error(ErrorKind::FiberMismatch, "start point is not over alpha(0)");
  const auto& in_chart = omega.owner.base.in_obj_chart;
  if (in_chart)
    for (int i = 0; i <= alpha.grid(); ++i)
      if (!in_chart(alpha.node(i)))
        throw Error(ErrorKind::OutOfChart, "path sample leaves the object chart");
  if (steps <= 0) steps = alpha.grid();
  auto a_of_t = [&](double t) { return omega.A0(alpha.eval(t), alpha.deriv(t)); };
  LiftResult r;
  r.frames = integrate_frame(a_of_t, p0.g, steps);
  r.endpoint = {alpha.end(), omega.owner.cm.G.project(r.frames.back())};
  return r;
}

Bundle2Arrow morphism_lift(const StrictConnection& omega, const SampledPath& zeta,
                           const Bundle2Arrow& delta0, int steps) {
  const Principal2Bundle& b = omega.owner;
  if ((delta0.gamma - zeta.start()).norm() > 1e-6)
    throw Error(ErrorKind::FiberMismatch, "arrow is not over zeta(0)");
  SampledPath base = zeta.mapped(b.base.source);
  LiftResult lift = horizontal_lift(omega, base, delta0.p, steps);
  // omega1 = 0 forces omega0(p') = 0 and h' = 0: the H-decoration rides along.
  return {zeta.end(), lift.endpoint, delta0.h};
}

TorsorMap path_transport(const StrictConnection& omega, const SampledPath& alpha, int steps) {
  const Principal2Bundle b = omega.owner;
  TorsorMap t;
  t.src_x = alpha.start();
  t.dst_x = alpha.end();
  t.obj = [omega, alpha, steps](const E0Point& p) {
    return horizontal_lift(omega, alpha, p, steps).endpoint;
  };
  t.mor = [omega, alpha, steps, b](const Bundle2Arrow& d) {
    SampledPath units = alpha.mapped(b.base.unit);
    return morphism_lift(omega, units, d, steps);
  };
  return t;
}

ResidualReport lemma_transport_identities(const StrictConnection& omega, int n_samples,
                                          std::uint64_t seed, int grid) {
  const Principal2Bundle& b = omega.owner;
  const auto& gp = b.base;
  Rng rng(seed);
  ResidualReport rep;
  rep.name = "lemma_transport_identities";
  for (const char* l : {"source", "target", "unit"}) rep.add(l, 0.0);
  const int plateau = std::max(4, grid / 16);
  for (int i = 0; i < n_samples; ++i) {
    // a path zeta in X1 through random waypoints
    std::vector<Vec> obj_wp(3), free_wp(3);
    for (int j = 0; j < 3; ++j) {
      obj_wp[j] = gp.sample_obj(rng) * 0.8;
      free_wp[j] = gp.sample_free(rng) * 0.8;
    }
    SampledPath base = SampledPath::from_waypoints(obj_wp, grid, plateau);
    SampledPath zeta;
    if (gp.free_dim > 0) {
      SampledPath fp = SampledPath::from_waypoints(free_wp, grid, plateau);
      zeta.samples.resize(grid + 1, gp.mor_dim);
      for (int j = 0; j <= grid; ++j)
        zeta.samples.row(j) = gp.mor_from_free(fp.node(j), base.node(j)).transpose();
      zeta.plateau_len = plateau;
    } else {
      zeta = base.mapped([&gp](const Vec& x) { return gp.mor_from_free(Vec::Zero(0), x); });
    }

    Bundle2Arrow d{zeta.start(),
                   {gp.source(zeta.start()), b.cm.G.random_element(rng)},
                   b.cm.H.random_element(rng)};
    Bundle2Arrow td = morphism_lift(omega, zeta, d);

    // (1) source identity
    E0Point s_lift = horizontal_lift(omega, zeta.mapped(gp.source), b.src(d)).endpoint;
    rep.add_max("source", b.point_distance(s_lift, b.src(td)));
    // (2) target identity
    E0Point t_lift = horizontal_lift(omega, zeta.mapped(gp.target), b.tgt(d)).endpoint;
    rep.add_max("target", b.point_distance(t_lift, b.tgt(td)));
    // (3) unit identity
    E0Point p{base.start(), b.cm.G.random_element(rng)};
    Bundle2Arrow u_lift = morphism_lift(omega, base.mapped(gp.unit), b.unit(p));
    E0Point pt = horizontal_lift(omega, base, p).endpoint;
    rep.add_max("unit", b.arrow_distance(u_lift, b.unit(pt)));
  }
  return rep;
}

TorsorMap lazy_transport(const Principal2Bundle& b, const QuasiConnection& c,
                         const StrictConnection& omega, const LazyPath& gamma, int steps) {
  TorsorMap t = cartesian_transport(b, c, b.base.inverse(gamma.arrows[0]));
  for (int i = 0; i < gamma.order(); ++i) {
    TorsorMap stage = path_transport(omega, gamma.paths[i], steps);
    if ((t.dst_x - stage.src_x).norm() > 1e-6)
      throw Error(ErrorKind::FiberMismatch,
                  "transport stage " + std::to_string(2 * i + 1) + " does not chain");
    t = compose_torsor(stage, t);
    TorsorMap cart = cartesian_transport(b, c, b.base.inverse(gamma.arrows[i + 1]));
    if ((t.dst_x - cart.src_x).norm() > 1e-6)
      throw Error(ErrorKind::FiberMismatch,
                  "transport stage " + std::to_string(2 * i + 2) + " does not chain");
    t = compose_torsor(cart, t);
  }
  return t;
}

QuotientWitness quotient_equal(const Principal2Bundle& b, const TorsorMap& f,
                               const TorsorMap& fprime, double member_tol) {
  if ((f.src_x - fprime.src_x).norm() > 1e-6 || (f.dst_x - fprime.dst_x).norm() > 1e-6)
    throw Error(ErrorKind::FiberMismatch, "maps do not share source/target fibers");
  const int k = b.cm.G.algebra_dim();
  std::vector<Mat> probes = {b.cm.G.identity()};
  if (k > 0) {
    Vec c1 = Vec::Constant(k, 0.3), c2(k);
    for (int j = 0; j < k; ++j) c2[j] = -0.17 + 0.07 * j;
    probes.push_back(group_exp(b.cm.G, AlgebraElement{b.cm.G.from_coords(c1)}));
    probes.push_back(group_exp(b.cm.G, AlgebraElement{b.cm.G.from_coords(c2)}));
  } else {
    probes.push_back(b.cm.G.identity());
    probes.push_back(b.cm.G.identity());
  }
  QuotientWitness w;
  bool first = true;
  for (const Mat& g : probes) {
    E0Point z{f.src_x, g};
    E0Point a = f.obj(z), bb = fprime.obj(z);
    if ((a.x - bb.x).norm() > 1e-6)
      throw Error(ErrorKind::FiberMismatch, "images lie over different base objects");
    Mat divider = a.g.inverse() * bb.g;
    double dist = b.cm.tauH_distance(divider);
    bool eq = dist < member_tol;
    if (first) {
      w.equal = eq;
      w.divider = divider;
      w.distance = dist;
      first = false;
    } else {
      if (eq != w.equal)
        throw Error(ErrorKind::ProbeDisagreement, "probes disagree on quotient membership");
      w.distance = std::max(w.distance, dist);
    }
  }
  return w;
}

Bundle2Arrow unitor_component(const Principal2Bundle& b, const QuasiConnection& c, const Vec& x,
                              const E0Point& p) {
  return b.inverse(c.lift(b.base.unit(x), p));
}

Bundle2Arrow compositor_component(const Principal2Bundle& b, const QuasiConnection& c,
                                  const Vec& gamma1, const Vec& gamma2, const E0Point& p) {
  Vec g1i = b.base.inverse(gamma1), g2i = b.base.inverse(gamma2);
  Bundle2Arrow l2 = c.lift(g2i, p);
  Bundle2Arrow l1 = c.lift(g1i, b.tgt(l2));
  Bundle2Arrow lc = c.lift(b.base.compose(g1i, g2i), p);
  return b.compose(lc, b.compose(b.inverse(l2), b.inverse(l1), 1e-6), 1e-6);
}

ResidualReport pseudofunctor_coherence(const Principal2Bundle& b, const QuasiConnection& c,
                                       int n_samples, std::uint64_t seed) {
  Rng rng(seed);
  ResidualReport rep;
  rep.name = "pseudofunctor_coherence";
  for (const char* l : {"unitor_naturality", "compositor_naturality", "triangle", "pentagon",
                        "equivariance"})
    rep.add(l, 0.0);
  for (int i = 0; i < n_samples; ++i) {
    Vec x = b.base.sample_obj(rng);
    Vec g3 = b.base.sample_mor_from(x, rng);
    Vec g2 = b.base.sample_mor_from(b.base.target(g3), rng);
    Vec g1 = b.base.sample_mor_from(b.base.target(g2), rng);
    Vec w = b.base.target(g1);
    E0Point p{w, b.cm.G.random_element(rng)};
    Mat h = b.cm.H.random_element(rng);

    auto tc = [&](const Vec& gamma) { return cartesian_transport(b, c, gamma); };

    // unitor naturality: I(q) o T_C(1)(z) = z o I(p) for fiber arrows z : p -> q
    {
      Bundle2Arrow z{b.base.unit(w), p, h};
      E0Point q = b.tgt(z);
      TorsorMap t1 = tc(b.base.unit(w));
      Bundle2Arrow lhs = b.compose(unitor_component(b, c, w, q), t1.mor(z), 1e-6);
      Bundle2Arrow rhs = b.compose(z, unitor_component(b, c, w, p), 1e-6);
      rep.add_max("unitor_naturality", b.arrow_distance(lhs, rhs));
    }

    // compositor naturality on gamma1, gamma2 (composable x ->g2 y ->g1 w... here
    // we use the chain g2 o g3 with object p over t(g2))
    {
      Vec y = b.base.target(g2);
      E0Point pz{y, b.cm.G.random_element(rng)};
      Bundle2Arrow z{b.base.unit(y), pz, h};
      E0Point qz = b.tgt(z);
      Bundle2Arrow lhs = b.compose(compositor_component(b, c, g3, g2, qz),
                                   tc(g3).mor(tc(g2).mor(z)), 1e-6);
      Bundle2Arrow rhs = b.compose(tc(b.base.compose(g2, g3)).mor(z),
                                   compositor_component(b, c, g3, g2, pz), 1e-6);
      rep.add_max("compositor_naturality", b.arrow_distance(lhs, rhs));
    }

    // triangle: alpha_{1_x, gamma} = I_x(gamma*(p)) and alpha_{gamma, 1_y} = gamma*(I_y(p))
    {
      Vec y = b.base.target(g3);
      E0Point py{y, b.cm.G.random_element(rng)};
      Bundle2Arrow lhs1 = compositor_component(b, c, b.base.unit(x), g3, py);
      Bundle2Arrow rhs1 = unitor_component(b, c, x, tc(g3).obj(py));
      rep.add_max("triangle", b.arrow_distance(lhs1, rhs1));
      Bundle2Arrow lhs2 = compositor_component(b, c, g3, b.base.unit(y), py);
      Bundle2Arrow rhs2 = tc(g3).mor(unitor_component(b, c, y, py));
      rep.add_max("triangle", b.arrow_distance(lhs2, rhs2));
    }

    // pentagon on the chain x ->g3 . ->g2 . ->g1 w at p over w
    {
      Bundle2Arrow route1 = b.compose(compositor_component(b, c, b.base.compose(g2, g3), g1, p),
                                      compositor_component(b, c, g3, g2, tc(g1).obj(p)), 1e-6);
      Bundle2Arrow route2 = b.compose(compositor_component(b, c, g3, b.base.compose(g1, g2), p),
                                      tc(g3).mor(compositor_component(b, c, g2, g1, p)), 1e-6);
      rep.add_max("pentagon", b.arrow_distance(route1, route2));
    }

    // G0-equivariance of the component maps
    {
      Mat g = b.cm.G.random_element(rng);
      E0Point pe{b.base.target(g2), b.cm.G.random_element(rng)};
      Bundle2Arrow lhs = compositor_component(b, c, g3, g2, b.act0(pe, g));
      Bundle2Arrow rhs =
          b.act1(compositor_component(b, c, g3, g2, pe), arrow_unit(b.cm, g));
      rep.add_max("equivariance", b.arrow_distance(lhs, rhs));
    }
  }
  return rep;
}

LazyPath apply_transform(const GroupoidPresentation& gp, const LazyPath& g,
                         const TransformSpec& spec) {
  if (spec.kind == "remove_constant") return move_remove_constant(gp, g, spec.index);
  if (spec.kind == "add_constant") return move_add_constant(gp, g, spec.index);
  if (spec.kind == "remove_identity") return move_remove_identity(gp, g, spec.index);
  if (spec.kind == "add_identity") return move_add_identity(gp, g, spec.index);
  if (spec.kind == "conjugate") return move_conjugate(gp, g, spec.index, spec.zeta);
  if (spec.kind == "thin_deform") return thin_deform(gp, g, spec.zetas);
  if (spec.kind == "reparametrize") {
    LazyPath r = g;
    for (auto& p : r.paths) {
      int k = p.grid();
      p = p.reparametrized([a = spec.warp](double t) { return plateau_warp(t, a); }, k);
    }
    return make_lazy_path(gp, r.arrows, r.paths, 1e-6);
  }
  throw Error(ErrorKind::BuildError, "unknown transform: " + spec.kind);
}

ResidualReport invariance_suite(const Principal2Bundle& b, const QuasiConnection& c,
                                const StrictConnection& omega, const LazyPath& gamma,
                                const TransformSpec& spec, int steps) {
  LazyPath gamma2 = apply_transform(b.base, gamma, spec);
  TorsorMap t1 = lazy_transport(b, c, omega, gamma, steps);
  TorsorMap t2 = lazy_transport(b, c, omega, gamma2, steps);
  QuotientWitness w = quotient_equal(b, t1, t2);
  ResidualReport rep;
  rep.name = "invariance:" + spec.kind;
  rep.add("quotient_equal", w.equal ? 0.0 : 1.0);
  rep.add("divider_distance", w.distance);
  if (spec.kind == "reparametrize") {
    E0Point z{t1.src_x, b.cm.G.identity()};
    rep.add("obj_agreement", b.point_distance(t1.obj(z), t2.obj(z)));
  }
  return rep;
}

ResidualReport functor_suite(const Principal2Bundle& b, const QuasiConnection& c,
                             const StrictConnection& omega, const LazyPath& gamma,
                             const LazyPath& gamma2, int steps) {
  ResidualReport rep;
  rep.name = "functor";
  TorsorMap t1 = lazy_transport(b, c, omega, gamma, steps);
  TorsorMap t2 = lazy_transport(b, c, omega, gamma2, steps);
  {
    LazyPath comp = lazy_compose(b.base, gamma2, gamma);
    TorsorMap tc = lazy_transport(b, c, omega, comp, steps);
    QuotientWitness w = quotient_equal(b, tc, compose_torsor(t2, t1));
    rep.add("composition", w.equal ? 0.0 : 1.0);
    rep.add("composition_divider", w.distance);
  }
  {
    Vec x = lazy_source(b.base, gamma);
    int k = gamma.paths.empty() ? 128 : gamma.paths[0].grid();
    int pl = gamma.paths.empty() ? 8 : gamma.paths[0].plateau_len;
    TorsorMap tu = lazy_transport(b, c, omega, lazy_unit(b.base, x, k, pl), steps);
    QuotientWitness w = quotient_equal(b, tu, identity_torsor(x));
    rep.add("unit", w.equal ? 0.0 : 1.0);
    rep.add("unit_divider", w.distance);
  }
  {
    LazyPath inv = lazy_invert(b.base, gamma);
    TorsorMap ti = lazy_transport(b, c, omega, inv, steps);
    TorsorMap round = compose_torsor(ti, t1);
    QuotientWitness w = quotient_equal(b, round, identity_torsor(lazy_source(b.base, gamma)));
    rep.add("inverse", w.equal ? 0.0 : 1.0);
    rep.add("inverse_divider", w.distance);
  }
  return rep;
}

ResidualReport naturality_suite(const Principal2Bundle& b_src, const QuasiConnection& c_src,
                                const Principal2Bundle& b_dst, const QuasiConnection& c_dst,
                                const BundleMorphism& f, const StrictConnection& omega_dst,
                                const SampledPath& alpha, int n_samples, std::uint64_t seed) {
  Rng rng(seed);
  StrictConnection omega_src = pullback_connection(f, omega_dst, b_src);
  ResidualReport rep;
  rep.name = "naturality";
  rep.add("cartesian_square", 0.0);
  rep.add("transport_square", 0.0);
  for (int i = 0; i < n_samples; ++i) {
    Vec gamma = b_src.base.sample_mor(rng);
    Vec y = b_src.base.target(gamma);
    E0Point p{y, b_src.cm.G.random_element(rng)};
    Bundle2Arrow d{b_src.base.unit(y), p, b_src.cm.H.random_element(rng)};
    TorsorMap ts = cartesian_transport(b_src, c_src, gamma);
    TorsorMap td = cartesian_transport(b_dst, c_dst, gamma);
    double res = b_dst.point_distance(f.F0(ts.obj(p)), td.obj(f.F0(p)));
    res = std::max(res, b_dst.arrow_distance(f.F1(ts.mor(d)), td.mor(f.F1(d))));
    rep.add_max("cartesian_square", res);

    E0Point q{alpha.start(), b_src.cm.G.random_element(rng)};
    Bundle2Arrow dq{b_src.base.unit(alpha.start()), q, b_src.cm.H.random_element(rng)};
    TorsorMap us = path_transport(omega_src, alpha);
    TorsorMap ud = path_transport(omega_dst, alpha);
    double res2 = b_dst.point_distance(f.F0(us.obj(q)), ud.obj(f.F0(q)));
    res2 = std::max(res2, b_dst.arrow_distance(f.F1(us.mor(dq)), ud.mor(f.F1(dq))));
    rep.add_max("transport_square", res2);
  }
  return rep;
}

PullbackBundle pullback_bundle(const GroupoidMorphism& fbase, const Principal2Bundle& b,
                               const QuasiConnection& c, const StrictConnection& omega) {
  PullbackBundle r;
  r.bundle.cm = b.cm;
  r.bundle.base = fbase.domain;
  r.bundle.cocycle = [f1 = fbase.F1, a = b.cocycle](const Vec& eta) { return a(f1(eta)); };
  r.bundle.Hu = [f0 = fbase.F0, hu = b.Hu](const E0Point& p) {
    return hu(E0Point{f0(p.x), p.g});
  };
  r.bundle.Hm = [f1 = fbase.F1, hm = b.Hm](const Vec& e2, const Vec& e1) {
    return hm(f1(e2), f1(e1));
  };
  r.connection.c = [f0 = fbase.F0, f1 = fbase.F1, cc = c.c](const Vec& eta, const E0Point& p) {
    return cc(f1(eta), E0Point{f0(p.x), p.g});
  };
  r.connection.cls = c.cls;
  r.omega.owner = r.bundle;
  r.omega.fd_step = omega.fd_step;
  r.omega.A0 = [f0 = fbase.F0, a0 = omega.A0, eps = omega.fd_step](const Vec& y, const Vec& vy) {
    Vec mid = f0(y);
    Vec push = (f0(Vec(y + eps * vy)) - f0(Vec(y - eps * vy))) / (2 * eps);
    return a0(mid, push);
  };
  return r;
}

ResidualReport pullback_suite(const GroupoidMorphism& fbase, const Principal2Bundle& b,
                              const QuasiConnection& c, const StrictConnection& omega,
                              const SampledPath& alpha_y, int n_samples, std::uint64_t seed) {
  Rng rng(seed);
  PullbackBundle pb = pullback_bundle(fbase, b, c, omega);
  ResidualReport rep;
  rep.name = "pullback";
  rep.add("cartesian_square", 0.0);
  rep.add("transport_square", 0.0);
  auto eta_obj = [&](const E0Point& p) { return E0Point{fbase.F0(p.x), p.g}; };
  auto eta_mor = [&](const Bundle2Arrow& d) {
    return Bundle2Arrow{fbase.F1(d.gamma), eta_obj(d.p), d.h};
  };
  for (int i = 0; i < n_samples; ++i) {
    // (i) cartesian squares over morphisms of Y
    Vec gamma = pb.bundle.base.sample_mor(rng);
    Vec ty = pb.bundle.base.target(gamma);
    TorsorMap down = compose_torsor(
        cartesian_transport(b, c, fbase.F1(gamma)),
        TorsorMap{ty, fbase.F0(ty), eta_obj, eta_mor});
    TorsorMap across = compose_torsor(
        TorsorMap{pb.bundle.base.source(gamma), fbase.F0(pb.bundle.base.source(gamma)), eta_obj,
                  eta_mor},
        cartesian_transport(pb.bundle, pb.connection, gamma));
    QuotientWitness w = quotient_equal(b, down, across);
    rep.add_max("cartesian_square", w.equal ? w.distance : 1.0);

    // (ii) path-transport squares along alpha^-1
    SampledPath rev = alpha_y.reversed();
    SampledPath rev_x = rev.mapped(fbase.F0);
    TorsorMap down2 = compose_torsor(path_transport(omega, rev_x),
                                     TorsorMap{rev.start(), fbase.F0(rev.start()), eta_obj,
                                               eta_mor});
    TorsorMap across2 = compose_torsor(
        TorsorMap{rev.end(), fbase.F0(rev.end()), eta_obj, eta_mor},
        path_transport(pb.omega, rev));
    QuotientWitness w2 = quotient_equal(b, down2, across2);
    rep.add_max("transport_square", w2.equal ? w2.distance : 1.0);
  }
  return rep;
}

SmoothnessProbe smoothness_probe(const Principal2Bundle& b, const QuasiConnection& c,
                                 const StrictConnection& omega,
                                 const std::function<LazyPath(double)>& family,
                                 const std::vector<double>& ugrid, int steps) {
  SmoothnessProbe pr;
  pr.us = ugrid;
  for (double u : ugrid) {
    LazyPath g = family(u);
    TorsorMap t = lazy_transport(b, c, omega, g, steps);
    E0Point z{t.src_x, b.cm.G.identity()};
    pr.endpoint_frames.push_back(t.obj(z).g);
  }
  pr.report.name = "smoothness";
  double dd1max = 0.0, dd2max = 0.0;
  const int n = static_cast<int>(ugrid.size());
  for (int i = 0; i + 1 < n; ++i) {
    double du = ugrid[i + 1] - ugrid[i];
    pr.dd1.push_back(Mat((pr.endpoint_frames[i + 1] - pr.endpoint_frames[i]) / du));
    dd1max = std::max(dd1max, pr.dd1.back().norm());
  }
  for (int i = 1; i + 1 < n; ++i) {
    double du = ugrid[i + 1] - ugrid[i];
    pr.dd2.push_back(Mat((pr.endpoint_frames[i + 1] - 2.0 * pr.endpoint_frames[i] +
                          pr.endpoint_frames[i - 1]) /
                         (du * du)));
    dd2max = std::max(dd2max, pr.dd2.back().norm());
  }
  pr.report.add("dd1_max", dd1max);
  pr.report.add("dd2_max", dd2max);
  return pr;
}

ResidualReport check_torsor_map(const Principal2Bundle& b, const TorsorMap& f, int n_samples,
                                std::uint64_t seed) {
  Rng rng(seed);
  ResidualReport rep;
  rep.name = "torsor_map";
  for (const char* l : {"equivariance", "functoriality"}) rep.add(l, 0.0);
  for (int i = 0; i < n_samples; ++i) {
    E0Point p{f.src_x, b.cm.G.random_element(rng)};
    Mat g = b.cm.G.random_element(rng);
    Mat h = b.cm.H.random_element(rng);
    rep.add_max("equivariance", b.point_distance(f.obj(b.act0(p, g)), b.act0(f.obj(p), g)));

    Bundle2Arrow d1{b.base.unit(f.src_x), p, h};
    TwoGroupArrow k{b.cm.H.random_element(rng), g};
    rep.add_max("equivariance", b.arrow_distance(f.mor(b.act1(d1, k)), b.act1(f.mor(d1), k)));

    Bundle2Arrow d2{b.base.unit(f.src_x), b.tgt(d1), b.cm.H.random_element(rng)};
    rep.add_max("functoriality",
                b.arrow_distance(f.mor(b.compose(d2, d1)), b.compose(f.mor(d2), f.mor(d1))));
    rep.add_max("functoriality", b.point_distance(f.obj(b.src(d1)), b.src(f.mor(d1))));
    rep.add_max("functoriality", b.point_distance(f.obj(b.tgt(d1)), b.tgt(f.mor(d1))));
  }
  return rep;
}

}  // namespace hgt
