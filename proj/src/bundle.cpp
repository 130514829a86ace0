#include "hgt/bundle.hpp"

#include <cmath>

namespace hgt {

const char* connection_class_name(ConnectionClass c) {
  switch (c) {
    case ConnectionClass::Quasi: return "quasi";
    case ConnectionClass::Unital: return "unital";
    case ConnectionClass::Categorical: return "categorical";
  }
  return "?";
}

ResidualReport check_group_bundle(const PrincipalGroupBundle& pg, int n_samples,
                                  std::uint64_t seed) {
  Rng rng(seed);
  ResidualReport rep;
  rep.name = "group_bundle";
  for (const char* l : {"unit_cocycle", "multiplicative", "equivariance"}) rep.add(l, 0.0);
  const Mat e = pg.G.identity();
  for (int i = 0; i < n_samples; ++i) {
    Vec x = pg.base.sample_obj(rng);
    rep.add_max("unit_cocycle", (pg.cocycle(pg.base.unit(x)) - e).norm());
    Vec m1 = pg.base.sample_mor_from(x, rng);
    Vec m2 = pg.base.sample_mor_from(pg.base.target(m1), rng);
    rep.add_max("multiplicative",
                (pg.cocycle(pg.base.compose(m2, m1)) - pg.cocycle(m2) * pg.cocycle(m1)).norm());
    // (iv) holds structurally in the trivialization; spot-check anyway
    E0Point p = pg.sample_point_over(x, rng);
    Mat g = pg.G.random_element(rng);
    E0Point lhs = pg.act(pg.mu(m1, p), g);
    E0Point rhs = pg.mu(m1, pg.act(p, g));
    rep.add_max("equivariance", (lhs.g - rhs.g).norm() + (lhs.x - rhs.x).norm());
  }
  return rep;
}

E0Point Principal2Bundle::tgt(const Bundle2Arrow& d) const {
  E0Point q = mu(d.gamma, d.p);
  q.g = q.g * cm.tau(Mat(d.h.inverse()));
  return q;
}

Bundle2Arrow Principal2Bundle::unit(const E0Point& p) const {
  return {base.unit(p.x), p, Hu(p)};
}

Bundle2Arrow Principal2Bundle::compose(const Bundle2Arrow& d2, const Bundle2Arrow& d1,
                                       double tol) const {
  if ((base.source(d2.gamma) - base.target(d1.gamma)).norm() > tol)
    throw Error(ErrorKind::NotComposable, "base morphisms do not chain");
  E0Point t1 = tgt(d1);
  if (point_distance(d2.p, t1) > std::max(tol, 1e-6))
    throw Error(ErrorKind::NotComposable, "total-space arrows do not chain");
  return {base.compose(d2.gamma, d1.gamma), d1.p,
          d2.h * d1.h * Mat(Hm(d2.gamma, d1.gamma).inverse())};
}

Bundle2Arrow Principal2Bundle::inverse(const Bundle2Arrow& d) const {
  return {base.inverse(d.gamma), tgt(d),
          Hu(d.p) * Hm(base.inverse(d.gamma), d.gamma) * Mat(d.h.inverse())};
}

Bundle2Arrow Principal2Bundle::act1(const Bundle2Arrow& d, const TwoGroupArrow& a) const {
  Mat gi = a.g.inverse();
  return {d.gamma, act0(d.p, a.g), cm.alpha(gi, Mat(a.h.inverse() * d.h))};
}

Mat Principal2Bundle::divide0(const E0Point& p, const E0Point& q, double tol) const {
  if ((p.x - q.x).norm() > tol)
    throw Error(ErrorKind::DivisionFailure, "points lie over different base objects");
  return Mat(p.g.inverse() * q.g);
}

TwoGroupArrow Principal2Bundle::divide1(const Bundle2Arrow& d, const Bundle2Arrow& e,
                                        double tol) const {
  if ((d.gamma - e.gamma).norm() > tol || (d.p.x - e.p.x).norm() > tol)
    throw Error(ErrorKind::DivisionFailure, "arrows lie over different base morphisms");
  Mat g = Mat(d.p.g.inverse() * e.p.g);
  Mat h = d.h * Mat(cm.alpha(g, e.h).inverse());
  return {h, g};
}

Bundle2Arrow Principal2Bundle::sample_arrow(Rng& rng) const {
  Vec gamma = base.sample_mor(rng);
  return {gamma, {base.source(gamma), cm.G.random_element(rng)}, cm.H.random_element(rng)};
}

DecoratedBundle decorate(const PrincipalGroupBundle& pg, const CrossedModule& cm) {
  if (cm.G.name != pg.G.name || cm.G.dim != pg.G.dim)
    throw Error(ErrorKind::GroupMismatch,
                "crossed module group " + cm.G.name + " != bundle group " + pg.G.name);
  Principal2Bundle b;
  b.cm = cm;
  b.base = pg.base;
  b.cocycle = pg.cocycle;
  b.Hu = [e = cm.H.identity()](const E0Point&) { return e; };
  b.Hm = [e = cm.H.identity()](const Vec&, const Vec&) { return e; };
  QuasiConnection c;
  c.c = [e = cm.H.identity()](const Vec&, const E0Point&) { return e; };
  c.cls = ConnectionClass::Categorical;
  return {b, c};
}

ResidualReport check_coherence(const PseudoPrincipalBundle& pb, int n_samples,
                               std::uint64_t seed) {
  Rng rng(seed);
  ResidualReport rep;
  rep.name = "coherence";
  for (const char* l : {"(a)", "(b)", "(c)", "(d)", "(e)", "(f)", "(g)", "(h)", "(i)", "(j)", "(k)"})
    rep.add(l, 0.0);
  const auto& gp = pb.pg.base;
  auto pt_dist = [](const E0Point& p, const E0Point& q) {
    return std::sqrt((p.x - q.x).squaredNorm() + (p.g - q.g).squaredNorm());
  };
  for (int i = 0; i < n_samples; ++i) {
    Vec x = gp.sample_obj(rng);
    E0Point p = pb.pg.sample_point_over(x, rng);
    Mat g = pb.pg.G.random_element(rng);
    Mat h = pb.cm.H.random_element(rng);

    Vec g1 = gp.sample_mor_from(x, rng);
    Vec g2 = gp.sample_mor_from(gp.target(g1), rng);
    Vec g3 = gp.sample_mor_from(gp.target(g2), rng);
    Mat hm21 = pb.Hm(g2, g1);

    // (a) mu(1_x, p) = p tau(Hu(p))
    rep.add_max("(a)", pt_dist(pb.pg.mu(gp.unit(x), p), pb.pg.act(p, pb.cm.tau(pb.Hu(p)))));
    // (b) mu(g2, mu(g1, p)) = mu(g2 o g1, p) tau(Hm(g2, g1))
    rep.add_max("(b)", pt_dist(pb.pg.mu(g2, pb.pg.mu(g1, p)),
                               pb.pg.act(pb.pg.mu(gp.compose(g2, g1), p), pb.cm.tau(hm21))));
    // (c) right unitor: Hm(gamma, 1_{s(gamma)}) = Hu(p)
    rep.add_max("(c)", (pb.Hm(g1, gp.unit(x)) - pb.Hu(p)).norm());
    // (d) left unitor: Hm(1_{t(gamma)}, gamma) = Hu(mu(gamma, p))
    rep.add_max("(d)", (pb.Hm(gp.unit(gp.target(g1)), g1) - pb.Hu(pb.pg.mu(g1, p))).norm());
    // (e) Hu is G-invariant
    rep.add_max("(e)", (pb.Hu(pb.pg.act(p, g)) - pb.Hu(p)).norm());
    // (f) alpha_{g^-1}(Hu(p)) = Hu(p)
    rep.add_max("(f)", (pb.cm.alpha(Mat(g.inverse()), pb.Hu(p)) - pb.Hu(p)).norm());
    // (g) Hu(p) central in H
    rep.add_max("(g)", (pb.Hu(p) * h - h * pb.Hu(p)).norm());
    // (h) alpha_{g^-1}(Hm^-1) = Hm^-1
    rep.add_max("(h)", (pb.cm.alpha(Mat(g.inverse()), Mat(hm21.inverse())) - Mat(hm21.inverse())).norm());
    // (i) Hm central in H
    rep.add_max("(i)", (hm21 * h - h * hm21).norm());
    // (j) associator
    {
      Mat lhs = Mat(pb.Hm(g3, g2).inverse()) * Mat(pb.Hm(gp.compose(g3, g2), g1).inverse());
      Mat rhs = Mat(hm21.inverse()) * Mat(pb.Hm(g3, gp.compose(g2, g1)).inverse());
      rep.add_max("(j)", (lhs - rhs).norm());
    }
    // (k) invertor
    {
      Vec g1i = gp.inverse(g1);
      Mat lhs = pb.Hm(g1i, g1) * Mat(pb.Hm(g1, g1i).inverse());
      Mat rhs = Mat(pb.Hu(p).inverse()) * pb.Hu(pb.pg.mu(g1, p));
      rep.add_max("(k)", (lhs - rhs).norm());
    }
  }
  return rep;
}

DecoratedBundle quasi_decorate(const PseudoPrincipalBundle& pb, double tol, int n_samples,
                               std::uint64_t seed) {
  ResidualReport rep = check_coherence(pb, n_samples, seed);
  for (const auto& [label, value] : rep.entries)
    if (value >= tol)
      throw Error(ErrorKind::IncoherentData,
                  "coherence " + label + " fails with residual " + std::to_string(value));
  Principal2Bundle b;
  b.cm = pb.cm;
  b.base = pb.pg.base;
  b.cocycle = pb.pg.cocycle;
  b.Hu = pb.Hu;
  b.Hm = pb.Hm;
  QuasiConnection c;
  c.c = [e = pb.cm.H.identity()](const Vec&, const E0Point&) { return e; };
  // categorical iff Hu = e and Hm = e; unital iff Hu = e
  Rng rng(seed + 1);
  double hu_dev = 0.0, hm_dev = 0.0;
  const Mat e = pb.cm.H.identity();
  for (int i = 0; i < 32; ++i) {
    E0Point p = pb.pg.sample_point(rng);
    hu_dev = std::max(hu_dev, (pb.Hu(p) - e).norm());
    Vec g1 = pb.pg.base.sample_mor(rng);
    Vec g2 = pb.pg.base.sample_mor_from(pb.pg.base.target(g1), rng);
    hm_dev = std::max(hm_dev, (pb.Hm(g2, g1) - e).norm());
  }
  c.cls = hu_dev < tol ? (hm_dev < tol ? ConnectionClass::Categorical : ConnectionClass::Unital)
                       : ConnectionClass::Quasi;
  return {b, c};
}

PseudoPrincipalBundle extract_pseudo(const Principal2Bundle& b, const QuasiConnection& c,
                                     double tol) {
  PseudoPrincipalBundle pb;
  pb.cm = b.cm;
  pb.pg.base = b.base;
  pb.pg.G = b.cm.G;
  pb.pg.cocycle = [b, c](const Vec& gamma) {
    E0Point p{b.base.source(gamma), b.cm.G.identity()};
    return Mat(c.mu_C(b, gamma, p).g);
  };
  pb.Hu = [b, c, tol](const E0Point& p) {
    TwoGroupArrow k = b.divide1(b.unit(p), c.lift(b.base.unit(p.x), p), tol);
    if ((k.g - b.cm.G.identity()).norm() > tol)
      throw Error(ErrorKind::DivisionFailure, "no (h, e) factor for the unital deviation");
    return k.h;
  };
  pb.Hm = [b, c, tol](const Vec& g2, const Vec& g1) {
    E0Point p{b.base.source(g1), b.cm.G.identity()};
    Bundle2Arrow l1 = c.lift(g1, p);
    Bundle2Arrow l2 = c.lift(g2, b.tgt(l1));
    TwoGroupArrow k =
        b.divide1(c.lift(b.base.compose(g2, g1), p), b.compose(l2, l1, tol), tol);
    if ((k.g - b.cm.G.identity()).norm() > tol)
      throw Error(ErrorKind::DivisionFailure, "no (h, e) factor for the compositional deviation");
    return k.h;
  };
  return pb;
}

ClassifyResult classify_connection(const Principal2Bundle& b, const QuasiConnection& c,
                                   int n_samples, std::uint64_t seed, double tol) {
  Rng rng(seed);
  ResidualReport rep;
  rep.name = "classify";
  for (const char* l : {"section", "unital", "categorical"}) rep.add(l, 0.0);
  for (int i = 0; i < n_samples; ++i) {
    Vec x = b.base.sample_obj(rng);
    E0Point p{x, b.cm.G.random_element(rng)};
    Vec g1 = b.base.sample_mor_from(x, rng);
    Mat g = b.cm.G.random_element(rng);

    // section: P(C(gamma, p)) = (gamma, p) plus equivariance along the unit embedding
    Bundle2Arrow l = c.lift(g1, p);
    double sec = (b.proj1(l) - g1).norm() + b.point_distance(b.src(l), p);
    Bundle2Arrow lg = c.lift(g1, b.act0(p, g));
    sec = std::max(sec, b.arrow_distance(lg, b.act1(l, arrow_unit(b.cm, g))));
    rep.add_max("section", sec);

    rep.add_max("unital", b.arrow_distance(c.lift(b.base.unit(x), p), b.unit(p)));

    Vec g2 = b.base.sample_mor_from(b.base.target(g1), rng);
    Bundle2Arrow l1 = c.lift(g1, p);
    Bundle2Arrow l2 = c.lift(g2, b.tgt(l1));
    rep.add_max("categorical",
                b.arrow_distance(c.lift(b.base.compose(g2, g1), p), b.compose(l2, l1)));
  }
  if (rep.get("section") > tol)
    throw Error(ErrorKind::NotASection, "connection fails the section property");
  ClassifyResult res;
  res.report = rep;
  res.cls = rep.get("unital") < tol
                ? (rep.get("categorical") < tol ? ConnectionClass::Categorical
                                                : ConnectionClass::Unital)
                : ConnectionClass::Quasi;
  return res;
}

QuasiConnection make_Ch(const Principal2Bundle& b, const QuasiConnection& c,
                        const std::function<Mat(const Vec&, const E0Point&)>& hmap,
                        int n_samples, std::uint64_t seed, double tol) {
  Rng rng(seed);
  for (int i = 0; i < n_samples; ++i) {
    Vec gamma = b.base.sample_mor(rng);
    E0Point p{b.base.source(gamma), b.cm.G.random_element(rng)};
    Mat g = b.cm.G.random_element(rng);
    double res = (b.cm.alpha(g, hmap(gamma, b.act0(p, g))) - hmap(gamma, p)).norm();
    if (res > tol)
      throw Error(ErrorKind::EquivarianceFailure,
                  "alpha_g(H(gamma, p g)) != H(gamma, p), residual " + std::to_string(res));
  }
  QuasiConnection ch;
  ch.c = [c, hmap](const Vec& gamma, const E0Point& p) {
    // C(gamma, p) (H(gamma, p), e) in decorated coordinates
    return Mat(hmap(gamma, p).inverse() * c.c(gamma, p));
  };
  ch.cls = classify_connection(b, ch, std::max(8, n_samples / 4), seed + 1).cls;
  return ch;
}

BundleMorphism identity_morphism() {
  return {[](const E0Point& p) { return p; }, [](const Bundle2Arrow& d) { return d; }};
}

ResidualReport bundle_morphism_check(const BundleMorphism& f, const Principal2Bundle& b,
                                     const Principal2Bundle& bprime, const QuasiConnection& c,
                                     const QuasiConnection& cprime, int n_samples,
                                     std::uint64_t seed) {
  Rng rng(seed);
  ResidualReport rep;
  rep.name = "bundle_morphism";
  for (const char* l : {"functoriality", "equivariance", "projection", "connection"})
    rep.add(l, 0.0);
  for (int i = 0; i < n_samples; ++i) {
    Vec x = b.base.sample_obj(rng);
    E0Point p{x, b.cm.G.random_element(rng)};
    Vec g1 = b.base.sample_mor_from(x, rng);
    Bundle2Arrow d1{g1, p, b.cm.H.random_element(rng)};
    Vec g2 = b.base.sample_mor_from(b.base.target(g1), rng);
    Bundle2Arrow d2{g2, b.tgt(d1), b.cm.H.random_element(rng)};

    double fres = 0.0;
    try {
      fres = bprime.arrow_distance(f.F1(b.compose(d2, d1)),
                                   bprime.compose(f.F1(d2), f.F1(d1)));
    } catch (const Error&) {
      // the images do not even chain; charge the chain mismatch itself
      fres = bprime.point_distance(bprime.tgt(f.F1(d1)), f.F1(d2).p);
    }
    fres = std::max(fres, bprime.arrow_distance(f.F1(b.unit(p)), bprime.unit(f.F0(p))));
    fres = std::max(fres, bprime.point_distance(f.F0(b.src(d1)), bprime.src(f.F1(d1))));
    fres = std::max(fres, bprime.point_distance(f.F0(b.tgt(d1)), bprime.tgt(f.F1(d1))));
    rep.add_max("functoriality", fres);

    Mat g = b.cm.G.random_element(rng);
    Mat h = b.cm.H.random_element(rng);
    TwoGroupArrow a{h, g};
    double eres = bprime.point_distance(f.F0(b.act0(p, g)), bprime.act0(f.F0(p), g));
    eres = std::max(eres, bprime.arrow_distance(f.F1(b.act1(d1, a)), bprime.act1(f.F1(d1), a)));
    rep.add_max("equivariance", eres);

    double pres = (bprime.proj0(f.F0(p)) - b.proj0(p)).norm();
    pres = std::max(pres, (bprime.proj1(f.F1(d1)) - b.proj1(d1)).norm());
    rep.add_max("projection", pres);

    rep.add_max("connection",
                bprime.arrow_distance(f.F1(c.lift(g1, p)), cprime.lift(g1, f.F0(p))));
  }
  return rep;
}

GrothendieckRoundtrip grothendieck_roundtrip(const Principal2Bundle& b, const QuasiConnection& c,
                                             int n_samples, std::uint64_t seed) {
  GrothendieckRoundtrip rt;
  rt.extracted = extract_pseudo(b, c);
  rt.rebuilt = quasi_decorate(rt.extracted, 1e-7, std::max(16, n_samples / 4), seed);
  rt.theta.F0 = [](const E0Point& p) { return p; };
  rt.theta.F1 = [b, c](const Bundle2Arrow& d) {
    // theta_E(gamma, p, h) = C(gamma, p) (h^-1, e)
    Bundle2Arrow l = c.lift(d.gamma, d.p);
    return b.act1(l, TwoGroupArrow{Mat(d.h.inverse()), b.cm.G.identity()});
  };
  rt.report = bundle_morphism_check(rt.theta, rt.rebuilt.bundle, b, rt.rebuilt.connection, c,
                                    n_samples, seed);
  rt.report.name = "grothendieck_roundtrip";
  // object level is the identity on the nose
  Rng rng(seed + 2);
  double obj = 0.0;
  for (int i = 0; i < 8; ++i) {
    E0Point p = b.sample_point(rng);
    obj = std::max(obj, b.point_distance(rt.theta.F0(p), p));
  }
  rt.report.add("object_identity", obj);
  return rt;
}

ResidualReport check_bundle_axioms(const Principal2Bundle& b, int n_samples, std::uint64_t seed) {
  Rng rng(seed);
  ResidualReport rep;
  rep.name = "bundle_axioms";
  for (const char* l : {"assoc", "left_unit", "right_unit", "inverse", "proj_functor",
                        "action_functor", "torsor_division"})
    rep.add(l, 0.0);
  for (int i = 0; i < n_samples; ++i) {
    Vec x = b.base.sample_obj(rng);
    E0Point p{x, b.cm.G.random_element(rng)};
    Vec g1 = b.base.sample_mor_from(x, rng);
    Bundle2Arrow d1{g1, p, b.cm.H.random_element(rng)};
    Vec g2 = b.base.sample_mor_from(b.base.target(g1), rng);
    Bundle2Arrow d2{g2, b.tgt(d1), b.cm.H.random_element(rng)};
    Vec g3 = b.base.sample_mor_from(b.base.target(g2), rng);
    Bundle2Arrow d3{g3, b.tgt(d2), b.cm.H.random_element(rng)};

    rep.add_max("assoc", b.arrow_distance(b.compose(b.compose(d3, d2), d1),
                                          b.compose(d3, b.compose(d2, d1))));
    rep.add_max("left_unit", b.arrow_distance(b.compose(b.unit(b.tgt(d1)), d1), d1));
    rep.add_max("right_unit", b.arrow_distance(b.compose(d1, b.unit(b.src(d1))), d1));
    Bundle2Arrow inv = b.inverse(d1);
    rep.add_max("inverse",
                std::max(b.arrow_distance(b.compose(inv, d1), b.unit(b.src(d1))),
                         b.arrow_distance(b.compose(d1, inv), b.unit(b.tgt(d1)))));
    rep.add_max("proj_functor", (b.proj1(b.compose(d2, d1)) -
                                 b.base.compose(b.proj1(d2), b.proj1(d1))).norm());

    Mat gA = b.cm.G.random_element(rng);
    Mat h1 = b.cm.H.random_element(rng);
    Mat h2 = b.cm.H.random_element(rng);
    TwoGroupArrow a1{h1, gA};
    TwoGroupArrow a2{h2, arrow_target(b.cm, a1)};
    rep.add_max("action_functor",
                b.arrow_distance(b.act1(b.compose(d2, d1), arrow_compose(b.cm, a2, a1)),
                                 b.compose(b.act1(d2, a2), b.act1(d1, a1))));

    E0Point q = b.act0(p, b.cm.G.random_element(rng));
    rep.add_max("torsor_division", b.point_distance(b.act0(p, b.divide0(p, q)), q));
    Bundle2Arrow e1 = b.act1(d1, TwoGroupArrow{h2, gA});
    TwoGroupArrow k = b.divide1(d1, e1);
    rep.add_max("torsor_division", b.arrow_distance(b.act1(d1, k), e1));
  }
  return rep;
}

}  // namespace hgt
