#include "hgt/groupoid.hpp"

namespace hgt {

Vec GroupoidPresentation::sample_free(Rng& rng) const {
  Vec lo = mor_box.lo.head(free_dim);
  Vec hi = mor_box.hi.head(free_dim);
  return rng.uniform_vec(lo, hi);
}

GroupoidPresentation pair_groupoid(int n, const Box& chart) {
  GroupoidPresentation gp;
  gp.name = "pair";
  gp.obj_dim = n;
  gp.mor_dim = 2 * n;
  gp.free_dim = n;  // the target point
  gp.obj_box = chart;
  gp.mor_box = {(Vec(2 * n) << chart.lo, chart.lo).finished(),
                (Vec(2 * n) << chart.hi, chart.hi).finished()};
  // morphism (y, x): target y first, source x last
  gp.source = [n](const Vec& m) { return Vec(m.tail(n)); };
  gp.target = [n](const Vec& m) { return Vec(m.head(n)); };
  gp.unit = [n](const Vec& x) { return Vec((Vec(2 * n) << x, x).finished()); };
  gp.inverse = [n](const Vec& m) { return Vec((Vec(2 * n) << m.tail(n), m.head(n)).finished()); };
  gp.compose = [n](const Vec& m2, const Vec& m1) {
    return Vec((Vec(2 * n) << m2.head(n), m1.tail(n)).finished());
  };
  gp.mor_from_free = [n](const Vec& y, const Vec& x) {
    return Vec((Vec(2 * n) << y, x).finished());
  };
  gp.in_obj_chart = [b = gp.obj_box](const Vec& v) { return b.contains(v, 1e-9); };
  gp.in_mor_chart = [b = gp.mor_box](const Vec& v) { return b.contains(v, 1e-9); };
  return gp;
}

GroupoidPresentation discrete_groupoid(int n, const Box& chart) {
  GroupoidPresentation gp;
  gp.name = "discrete";
  gp.obj_dim = n;
  gp.mor_dim = n;
  gp.free_dim = 0;
  gp.obj_box = chart;
  gp.mor_box = chart;
  auto id = [](const Vec& v) { return v; };
  gp.source = id;
  gp.target = id;
  gp.unit = id;
  gp.inverse = id;
  gp.compose = [](const Vec&, const Vec& m1) { return m1; };
  gp.mor_from_free = [](const Vec&, const Vec& x) { return x; };
  gp.in_obj_chart = [b = gp.obj_box](const Vec& v) { return b.contains(v, 1e-9); };
  gp.in_mor_chart = [b = gp.mor_box](const Vec& v) { return b.contains(v, 1e-9); };
  return gp;
}

GroupoidPresentation action_groupoid(const MatrixGroup& g, int n,
                                     const std::function<Vec(const Mat&, const Vec&)>& act,
                                     const Box& obj_chart, const Box& coord_chart) {
  const int k = g.algebra_dim();
  // sampled action axioms: act(e, x) = x, act(ab, x) = act(a, act(b, x)),
  // plus coordinate additivity of exp (composition adds algebra coordinates)
  {
    Rng rng(20240u);
    for (int i = 0; i < 32; ++i) {
      Vec x = rng.uniform_vec(obj_chart.lo, obj_chart.hi);
      Vec ca = rng.uniform_vec(coord_chart.lo, coord_chart.hi) * 0.5;
      Vec cb = rng.uniform_vec(coord_chart.lo, coord_chart.hi) * 0.5;
      Mat a = group_exp(g, AlgebraElement{g.from_coords(ca)});
      Mat b = group_exp(g, AlgebraElement{g.from_coords(cb)});
      if ((act(g.identity(), x) - x).norm() > 1e-9)
        throw Error(ErrorKind::NotAnAction, "act(e, x) != x");
      if ((act(a * b, x) - act(a, act(b, x))).norm() > 1e-8)
        throw Error(ErrorKind::NotAnAction, "act(ab, x) != act(a, act(b, x))");
      Mat ab = group_exp(g, AlgebraElement{g.from_coords(ca + cb)});
      if ((ab - a * b).norm() > 1e-9)
        throw Error(ErrorKind::NotAnAction,
                    "group is not coordinate-additive; action groupoid chart unsupported");
    }
  }

  GroupoidPresentation gp;
  gp.name = "action:" + g.name;
  gp.obj_dim = n;
  gp.mor_dim = k + n;
  gp.free_dim = k;
  gp.obj_box = obj_chart;
  gp.mor_box = {(Vec(k + n) << coord_chart.lo, obj_chart.lo).finished(),
                (Vec(k + n) << coord_chart.hi, obj_chart.hi).finished()};
  auto elem = [g, k](const Vec& m) {
    return group_exp(g, AlgebraElement{g.from_coords(m.head(k))});
  };
  gp.source = [n, k](const Vec& m) { return Vec(m.tail(n)); };
  gp.target = [act, elem, n, k](const Vec& m) { return act(elem(m), Vec(m.tail(n))); };
  gp.unit = [n, k](const Vec& x) { return Vec((Vec(k + n) << Vec::Zero(k), x).finished()); };
  gp.inverse = [act, elem, n, k](const Vec& m) {
    Vec y = act(elem(m), Vec(m.tail(n)));
    return Vec((Vec(k + n) << -m.head(k), y).finished());
  };
  gp.compose = [n, k](const Vec& m2, const Vec& m1) {
    return Vec((Vec(k + n) << m1.head(k) + m2.head(k), m1.tail(n)).finished());
  };
  gp.mor_from_free = [n, k](const Vec& c, const Vec& x) {
    return Vec((Vec(k + n) << c, x).finished());
  };
  gp.in_obj_chart = [b = gp.obj_box](const Vec& v) { return b.contains(v, 1e-9); };
  gp.in_mor_chart = [b = gp.mor_box](const Vec& v) { return b.contains(v, 1e-9); };
  return gp;
}

GroupoidPresentation action_groupoid_so2(const Box& obj_chart, double theta_max) {
  MatrixGroup so2 = make_so2();
  auto act = [](const Mat& a, const Vec& x) { return Vec(a * x); };
  return action_groupoid(so2, 2, act, obj_chart, Box::cube(1, theta_max));
}

Vec tangent_eval(const std::function<Vec(const Vec&)>& f, const Vec& at, const Vec& dir,
                 double h, const std::function<bool(const Vec&)>& in_chart) {
  Vec fwd = at + h * dir, bwd = at - h * dir;
  if (in_chart && (!in_chart(fwd) || !in_chart(bwd) || !in_chart(at)))
    throw Error(ErrorKind::OutOfChart, "central difference stencil leaves the chart");
  return (f(fwd) - f(bwd)) / (2.0 * h);
}

ResidualReport groupoid_axioms(const GroupoidPresentation& gp, int n_samples, std::uint64_t seed) {
  Rng rng(seed);
  ResidualReport rep;
  rep.name = "groupoid_axioms:" + gp.name;
  for (const char* l : {"unit_st", "compose_st", "assoc", "left_unit", "right_unit", "inverse"})
    rep.add(l, 0.0);
  for (int i = 0; i < n_samples; ++i) {
    Vec x = gp.sample_obj(rng);
    Vec u = gp.unit(x);
    rep.add_max("unit_st", std::max((gp.source(u) - x).norm(), (gp.target(u) - x).norm()));

    Vec m1 = gp.sample_mor_from(x, rng);
    Vec m2 = gp.sample_mor_from(gp.target(m1), rng);
    Vec m3 = gp.sample_mor_from(gp.target(m2), rng);
    Vec c21 = gp.compose(m2, m1);
    rep.add_max("compose_st", std::max((gp.source(c21) - gp.source(m1)).norm(),
                                       (gp.target(c21) - gp.target(m2)).norm()));
    rep.add_max("assoc",
                (gp.compose(m3, c21) - gp.compose(gp.compose(m3, m2), m1)).norm());
    rep.add_max("left_unit", (gp.compose(gp.unit(gp.target(m1)), m1) - m1).norm());
    rep.add_max("right_unit", (gp.compose(m1, gp.unit(gp.source(m1))) - m1).norm());
    Vec inv = gp.inverse(m1);
    rep.add_max("inverse", std::max((gp.compose(inv, m1) - gp.unit(gp.source(m1))).norm(),
                                    (gp.compose(m1, inv) - gp.unit(gp.target(m1))).norm()));
  }
  return rep;
}

GroupoidPresentation groupoid_by_name(const std::string& id, int n, const Box& chart) {
  if (id == "pair") return pair_groupoid(n, chart);
  if (id == "discrete") return discrete_groupoid(n, chart);
  if (id == "action:SO2") {
    if (n != 2) throw Error(ErrorKind::BuildError, "action:SO2 requires n = 2");
    return action_groupoid_so2(chart);
  }
  throw Error(ErrorKind::BuildError, "unknown groupoid: " + id);
}

}  // namespace hgt
