#include "hgt/vb.hpp"

namespace hgt {

void TwoVectorSpace::validate(double tol) const {
  const int n0 = v0_dim(), n1 = v1_dim();
  Mat i0 = Mat::Identity(n0, n0);
  double res = (S * U - i0).norm() + (T * U - i0).norm();
  // s(z o z') chains and units behave (exact matrix identities)
  Rng rng(1);
  for (int i = 0; i < 8; ++i) {
    Vec z(n1);
    for (int j = 0; j < n1; ++j) z[j] = rng.uniform(-1, 1);
    Vec w = U * (T * z);  // arrow with s(w) = t(z)
    Vec m = compose(w, z);
    res += (S * m - S * z).norm() + (T * m - T * w).norm();
    res += (compose(unit(T * z), z) - z).norm() + (compose(z, unit(S * z)) - z).norm();
    res += (compose(inverse(z), z) - unit(S * z)).norm();
  }
  if (res > tol * 100)
    throw Error(ErrorKind::BuildError, "2-vector space structure maps are inconsistent");
}

TwoVectorSpace arrow_2vector(int n) {
  TwoVectorSpace v;
  v.S.setZero(n, 2 * n);
  v.S.leftCols(n).setIdentity();
  v.T.setZero(n, 2 * n);
  v.T.rightCols(n).setIdentity();
  v.U.setZero(2 * n, n);
  v.U.topRows(n).setIdentity();
  v.U.bottomRows(n).setIdentity();
  v.validate();
  return v;
}

TwoVectorSpace algebra_2vector(const CrossedModule& cm) {
  const int kh = cm.H.algebra_dim(), kg = cm.G.algebra_dim();
  TwoVectorSpace v;
  v.S.setZero(kg, kh + kg);
  v.S.rightCols(kg).setIdentity();
  v.T.setZero(kg, kh + kg);
  v.T.rightCols(kg).setIdentity();
  for (int j = 0; j < kh; ++j) {
    Mat dt = tau_differential(cm, cm.H.generators[j]);
    v.T.col(j) = cm.G.span_coords(dt).first;
  }
  v.U.setZero(kh + kg, kg);
  v.U.bottomRows(kg).setIdentity();
  v.validate(1e-9);
  return v;
}

TwoVectorSpace line_2vector() {
  TwoVectorSpace v;
  v.S.setZero(1, 2);
  v.S(0, 1) = 1.0;
  v.T = v.S;
  v.U.setZero(2, 1);
  v.U(1, 0) = 1.0;
  v.validate();
  return v;
}

TwoGroupLinearAction trivial_action(int v0, int v1) {
  return {[v0](const Mat&) { return Mat(Mat::Identity(v0, v0)); },
          [v1](const Mat&, const Mat&) { return Mat(Mat::Identity(v1, v1)); }};
}

TwoGroupLinearAction defining_action(const CrossedModule& cm) {
  const int n = cm.G.dim;
  TwoGroupLinearAction a;
  a.rho0 = [](const Mat& g) { return g; };
  a.rho1 = [n, cm](const Mat& h, const Mat& g) {
    Mat m = Mat::Zero(2 * n, 2 * n);
    m.topLeftCorner(n, n) = g;
    m.bottomRightCorner(n, n) = cm.tau(h) * g;
    return m;
  };
  return a;
}

TwoGroupLinearAction adjoint_action(const CrossedModule& cm) {
  const int kh = cm.H.algebra_dim(), kg = cm.G.algebra_dim();
  TwoGroupLinearAction a;
  a.rho0 = [cm, kg](const Mat& g) {
    Mat m(kg, kg);
    for (int j = 0; j < kg; ++j)
      m.col(j) = cm.G.span_coords(Mat(g * cm.G.generators[j] * g.inverse())).first;
    return m;
  };
  a.rho1 = [cm, kh, kg](const Mat& h, const Mat& g) {
    Mat m = Mat::Zero(kh + kg, kh + kg);
    for (int j = 0; j < kh; ++j) {
      AlgArrow img = ad_2group(cm, h, g, {cm.H.generators[j], Mat::Zero(cm.G.dim, cm.G.dim)});
      m.col(j).head(kh) = cm.H.span_coords(img.xH).first;
      m.col(j).tail(kg) = cm.G.span_coords(img.xG).first;
    }
    for (int j = 0; j < kg; ++j) {
      AlgArrow img = ad_2group(cm, h, g, {Mat::Zero(cm.H.dim, cm.H.dim), cm.G.generators[j]});
      m.col(kh + j).head(kh) = cm.H.span_coords(img.xH).first;
      m.col(kh + j).tail(kg) = cm.G.span_coords(img.xG).first;
    }
    return m;
  };
  return a;
}

TwoGroupLinearAction unipotent_action(const CrossedModule& cm) {
  if (cm.H.algebra_dim() != 1)
    throw Error(ErrorKind::BuildError, "unipotent action needs a one-parameter H");
  TwoGroupLinearAction a;
  a.rho0 = [](const Mat&) { return Mat(Mat::Identity(1, 1)); };
  a.rho1 = [](const Mat& h, const Mat&) {
    Mat m = Mat::Identity(2, 2);
    m(0, 1) = h(0, 1);
    return m;
  };
  return a;
}

ResidualReport check_linear_action(const CrossedModule& cm, const TwoGroupLinearAction& act,
                                   const TwoVectorSpace& v, int n_samples, std::uint64_t seed) {
  Rng rng(seed);
  ResidualReport rep;
  rep.name = "linear_action";
  for (const char* l : {"rho0_hom", "rho1_hom", "structure", "functor"}) rep.add(l, 0.0);
  for (int i = 0; i < n_samples; ++i) {
    Mat g1 = cm.G.random_element(rng), g2 = cm.G.random_element(rng);
    Mat h1 = cm.H.random_element(rng), h2 = cm.H.random_element(rng);
    rep.add_max("rho0_hom", (act.rho0(Mat(g1 * g2)) - act.rho0(g1) * act.rho0(g2)).norm());

    TwoGroupArrow prod = arrow_tensor(cm, {h2, g2}, {h1, g1});
    rep.add_max("rho1_hom",
                (act.rho1(prod.h, prod.g) - act.rho1(h2, g2) * act.rho1(h1, g1)).norm());

    Mat r1 = act.rho1(h1, g1);
    rep.add_max("structure", (v.S * r1 - act.rho0(g1) * v.S).norm());
    rep.add_max("structure", (v.T * r1 - act.rho0(Mat(cm.tau(h1) * g1)) * v.T).norm());
    rep.add_max("structure", (v.U * act.rho0(g1) - act.rho1(cm.H.identity(), g1) * v.U).norm());

    // composition functoriality for a composable 2-group pair
    TwoGroupArrow a1{h1, g1};
    TwoGroupArrow a2{h2, arrow_target(cm, a1)};
    TwoGroupArrow comp = arrow_compose(cm, a2, a1);
    Vec z1(v.v1_dim());
    for (int j = 0; j < v.v1_dim(); ++j) z1[j] = rng.uniform(-1, 1);
    Vec z2 = v.U * (v.T * z1);
    Vec lhs = act.rho1(comp.h, comp.g) * v.compose(z2, z1);
    Vec rhs = v.compose(Vec(act.rho1(a2.h, a2.g) * z2), Vec(act.rho1(a1.h, a1.g) * z1));
    rep.add_max("functor", (lhs - rhs).norm());
  }
  return rep;
}

Bundle2Arrow VBGroupoid::rep(const Vec& gamma) const {
  return {gamma, {b.base.source(gamma), b.cm.G.identity()}, b.cm.H.identity()};
}

VBGroupoid::Arrow VBGroupoid::normalize(const Bundle2Arrow& delta, const Vec& z) const {
  TwoGroupArrow k = b.divide1(rep(delta.gamma), delta, 1e-6);
  return {delta.gamma, act.rho1(k.h, k.g) * z};
}

VBGroupoid::Obj VBGroupoid::normalize_obj(const E0Point& p, const Vec& vv) const {
  return {p.x, act.rho0(p.g) * vv};
}

VBGroupoid::Obj VBGroupoid::src(const Arrow& a) const {
  return {b.base.source(a.first), v.S * a.second};
}

VBGroupoid::Obj VBGroupoid::tgt(const Arrow& a) const {
  return normalize_obj(b.tgt(rep(a.first)), Vec(v.T * a.second));
}

VBGroupoid::Arrow VBGroupoid::unit(const Obj& o) const {
  return normalize(b.unit({o.first, b.cm.G.identity()}), v.unit(o.second));
}

VBGroupoid::Arrow VBGroupoid::compose(const Arrow& a2, const Arrow& a1, double tol) const {
  Bundle2Arrow d1 = rep(a1.first);
  E0Point t1 = b.tgt(d1);
  // align the second representative over tgt(d1)
  TwoGroupArrow k{b.cm.H.identity(), t1.g};
  Bundle2Arrow d2 = b.act1(rep(a2.first), k);
  TwoGroupArrow ki = tensor_inverse(b.cm, k);
  Vec z2 = act.rho1(ki.h, ki.g) * a2.second;
  Bundle2Arrow m = b.compose(d2, d1, tol);
  return normalize(m, v.compose(z2, a1.second));
}

VBGroupoid::Arrow VBGroupoid::inverse(const Arrow& a) const {
  return normalize(b.inverse(rep(a.first)), v.inverse(a.second));
}

VBGroupoid associate(const Principal2Bundle& b, const TwoGroupLinearAction& act,
                     const TwoVectorSpace& v, int n_samples, std::uint64_t seed) {
  ResidualReport rep = check_linear_action(b.cm, act, v, n_samples, seed);
  if (!rep.all_below(1e-8))
    throw Error(ErrorKind::NotAnAction,
                "2-group action on the 2-vector space fails at " + rep.worst_label());
  VBGroupoid vb{b, act, v};
  ResidualReport ax = check_vb_groupoid(vb, std::max(8, n_samples / 4), seed + 1);
  if (!ax.all_below(1e-8))
    throw Error(ErrorKind::NotAnAction,
                "associated VB-groupoid fails at " + ax.worst_label());
  return vb;
}

namespace {

Vec random_vec(Rng& rng, int n) {
  Vec z(n);
  for (int j = 0; j < n; ++j) z[j] = rng.uniform(-1, 1);
  return z;
}

}  // namespace

ResidualReport check_vb_groupoid(const VBGroupoid& vb, int n_samples, std::uint64_t seed) {
  Rng rng(seed);
  ResidualReport rep;
  rep.name = "vb_groupoid";
  for (const char* l : {"src_tgt", "assoc", "unit_law", "inverse_law", "interchange"})
    rep.add(l, 0.0);
  const auto& gp = vb.b.base;
  const int n1 = vb.v.v1_dim();
  auto arrow_dist = [](const VBGroupoid::Arrow& a, const VBGroupoid::Arrow& b2) {
    return std::sqrt((a.first - b2.first).squaredNorm() + (a.second - b2.second).squaredNorm());
  };
  auto with_src = [&](const Vec& gamma, const VBGroupoid::Obj& o, Rng& r) {
    // arrow over gamma whose VB source is o
    Vec z = vb.v.U * o.second + (Mat::Identity(n1, n1) - vb.v.U * vb.v.S) * random_vec(r, n1);
    return VBGroupoid::Arrow{gamma, z};
  };
  for (int i = 0; i < n_samples; ++i) {
    Vec x = gp.sample_obj(rng);
    Vec g1 = gp.sample_mor_from(x, rng);
    Vec g2 = gp.sample_mor_from(gp.target(g1), rng);
    Vec g3 = gp.sample_mor_from(gp.target(g2), rng);
    VBGroupoid::Arrow a1{g1, random_vec(rng, n1)};
    VBGroupoid::Arrow a2 = with_src(g2, vb.tgt(a1), rng);
    VBGroupoid::Arrow a3 = with_src(g3, vb.tgt(a2), rng);

    VBGroupoid::Arrow c21 = vb.compose(a2, a1);
    rep.add_max("src_tgt", (vb.src(c21).second - vb.src(a1).second).norm() +
                               (vb.tgt(c21).second - vb.tgt(a2).second).norm());
    rep.add_max("assoc", arrow_dist(vb.compose(vb.compose(a3, a2), a1),
                                    vb.compose(a3, vb.compose(a2, a1))));
    rep.add_max("unit_law", arrow_dist(vb.compose(vb.unit(vb.tgt(a1)), a1), a1));
    rep.add_max("unit_law", arrow_dist(vb.compose(a1, vb.unit(vb.src(a1))), a1));
    VBGroupoid::Arrow inv = vb.inverse(a1);
    rep.add_max("inverse_law", arrow_dist(vb.compose(inv, a1), vb.unit(vb.src(a1))));

    // interchange: (b1 o a1) + (b2 o a2') = (b1 + b2) o (a1 + a2')
    VBGroupoid::Arrow a1b{g1, random_vec(rng, n1)};
    VBGroupoid::Arrow b1 = with_src(g2, vb.tgt(a1), rng);
    VBGroupoid::Arrow b2 = with_src(g2, vb.tgt(a1b), rng);
    Vec lhs = vb.compose(b1, a1).second + vb.compose(b2, a1b).second;
    Vec rhs = vb.compose({g2, Vec(b1.second + b2.second)}, {g1, Vec(a1.second + a1b.second)})
                  .second;
    rep.add_max("interchange", (lhs - rhs).norm());
  }
  return rep;
}

std::function<VBGroupoid::Arrow(const Vec&, const VBGroupoid::Obj&)> linear_cleavage(
    const VBGroupoid& vb, const QuasiConnection& c) {
  return [vb, c](const Vec& gamma, const VBGroupoid::Obj& o) {
    E0Point p{vb.b.base.source(gamma), vb.b.cm.G.identity()};
    return vb.normalize(c.lift(gamma, p), vb.v.unit(o.second));
  };
}

ResidualReport check_cleavage(const VBGroupoid& vb, const QuasiConnection& c, int n_samples,
                              std::uint64_t seed) {
  Rng rng(seed);
  auto cv = linear_cleavage(vb, c);
  ResidualReport rep;
  rep.name = "cleavage";
  rep.add("unital", 0.0);
  rep.add("flat", 0.0);
  auto arrow_dist = [](const VBGroupoid::Arrow& a, const VBGroupoid::Arrow& b2) {
    return std::sqrt((a.first - b2.first).squaredNorm() + (a.second - b2.second).squaredNorm());
  };
  for (int i = 0; i < n_samples; ++i) {
    Vec x = vb.b.base.sample_obj(rng);
    VBGroupoid::Obj o{x, random_vec(rng, vb.v.v0_dim())};
    rep.add_max("unital", arrow_dist(cv(vb.b.base.unit(x), o), vb.unit(o)));

    Vec g1 = vb.b.base.sample_mor_from(x, rng);
    Vec g2 = vb.b.base.sample_mor_from(vb.b.base.target(g1), rng);
    VBGroupoid::Arrow l1 = cv(g1, o);
    VBGroupoid::Arrow l2 = cv(g2, vb.tgt(l1));
    rep.add_max("flat", arrow_dist(cv(vb.b.base.compose(g2, g1), o), vb.compose(l2, l1)));
  }
  return rep;
}

VBTransport vb_transport(const VBGroupoid& vb, const QuasiConnection& c,
                         const StrictConnection& omega, const LazyPath& gamma, int steps) {
  const auto& gp = vb.b.base;
  auto cv = linear_cleavage(vb, c);

  const int n0 = vb.v.v0_dim(), n1 = vb.v.v1_dim();
  VBTransport t;
  t.src_x = lazy_source(gp, gamma);
  t.dst_x = lazy_target(gp, gamma);
  t.obj_map = Mat::Identity(n0, n0);
  t.mor_map = Mat::Identity(n1, n1);
  Vec fiber = t.src_x;

  // stage for arrow gamma is T_{C^V}(gamma^-1): fiber(s(gamma)) -> fiber(t(gamma)),
  // v -> tgt(C^V(gamma, v))
  auto cart_stage = [&](const Vec& g) {
    Mat m0(n0, n0);
    for (int j = 0; j < n0; ++j)
      m0.col(j) = vb.tgt(cv(g, {fiber, Vec(Vec::Unit(n0, j))})).second;
    Mat m1(n1, n1);
    for (int j = 0; j < n1; ++j) {
      VBGroupoid::Arrow z{gp.unit(fiber), Vec(Vec::Unit(n1, j))};
      VBGroupoid::Arrow lq = cv(g, vb.tgt(z));
      VBGroupoid::Arrow lp = cv(g, vb.src(z));
      m1.col(j) = vb.compose(lq, vb.compose(z, vb.inverse(lp))).second;
    }
    t.obj_map = m0 * t.obj_map;
    t.mor_map = m1 * t.mor_map;
    fiber = gp.target(g);
  };

  auto path_stage = [&](const SampledPath& alpha) {
    E0Point p0{alpha.start(), vb.b.cm.G.identity()};
    Mat gt = horizontal_lift(omega, alpha, p0, steps).endpoint.g;
    t.obj_map = vb.act.rho0(gt) * t.obj_map;
    SampledPath units = alpha.mapped(gp.unit);
    Bundle2Arrow d0 = vb.rep(gp.unit(alpha.start()));
    Bundle2Arrow d1 = morphism_lift(omega, units, d0, steps);
    Mat m1(n1, n1);
    for (int j = 0; j < n1; ++j) m1.col(j) = vb.normalize(d1, Vec(Vec::Unit(n1, j))).second;
    t.mor_map = m1 * t.mor_map;
    fiber = alpha.end();
  };

  cart_stage(gamma.arrows[0]);
  for (int i = 0; i < gamma.order(); ++i) {
    path_stage(gamma.paths[i]);
    cart_stage(gamma.arrows[i + 1]);
  }
  return t;
}

}  // namespace hgt
