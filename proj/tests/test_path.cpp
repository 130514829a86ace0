#include <doctest.h>

#include <cmath>

#include "hgt/path.hpp"

using namespace hgt;

namespace {

GroupoidPresentation pair2() { return pair_groupoid(2, Box::cube(2, 2.0)); }

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

LazyPath simple_path(const GroupoidPresentation& gp, int k = 64) {
  Vec x = v2(-1, 0), y = v2(0.5, 0.5), z = v2(1, -0.5);
  Vec g0 = gp.mor_from_free(v2(-0.5, 0.2), x);  // x -> (-0.5, 0.2)
  SampledPath a1 = SampledPath::from_waypoints({gp.target(g0), y}, k, 4);
  Vec g1 = gp.mor_from_free(z, y);
  return make_lazy_path(gp, {g0, g1}, {a1});
}

}  // namespace

TEST_CASE("sampled paths sit and interpolate") {
  SampledPath p = SampledPath::from_waypoints({v2(0, 0), v2(1, 0.5), v2(2, 0)}, 128, 8);
  CHECK(p.sits());
  CHECK((p.start() - v2(0, 0)).norm() == 0.0);
  CHECK((p.end() - v2(2, 0)).norm() == 0.0);
  CHECK((p.eval(0.5) - p.node(64)).norm() < 1e-12);
  CHECK(p.deriv(0.0).norm() < 1e-12);  // sitting instant

  SampledPath c = SampledPath::constant(v2(3, 1), 32, 4);
  CHECK(c.is_constant());
  CHECK(c.deriv(0.37).norm() < 1e-12);
}

TEST_CASE("interpolation reproduces straight lines exactly") {
  SampledPath line;
  line.samples.resize(65, 2);
  for (int i = 0; i <= 64; ++i) line.samples.row(i) = v2(i / 64.0, -2.0 * i / 64.0).transpose();
  line.plateau_len = 1;
  CHECK((line.eval(0.333) - v2(0.333, -0.666)).norm() < 1e-13);
  CHECK((line.deriv(0.71) - v2(1.0, -2.0)).norm() < 1e-10);
}

TEST_CASE("lazy path validation") {
  GroupoidPresentation gp = pair2();
  // order 0: a single arrow is a lazy path
  Rng rng(1);
  Vec m = gp.sample_mor(rng);
  LazyPath single = make_lazy_path(gp, {m}, {});
  CHECK(single.order() == 0);
  CHECK((lazy_source(gp, single) - gp.source(m)).norm() == 0.0);

  // a point x as (1_x, c_x, 1_x)
  Vec x = v2(0.3, -0.7);
  LazyPath unit = lazy_unit(gp, x, 32, 4);
  CHECK(unit.order() == 1);
  CHECK((lazy_target(gp, unit) - x).norm() == 0.0);

  // perturbed endpoint is rejected with the right index
  LazyPath good = simple_path(gp);
  std::vector<SampledPath> paths = good.paths;
  paths[0].samples.row(paths[0].grid()) += v2(1e-3, 0).transpose();
  CHECK_THROWS_WITH_AS((void)make_lazy_path(gp, good.arrows, paths),
                       doctest::Contains("gamma_1"), Error);
}

TEST_CASE("alternation count is validated") {
  GroupoidPresentation gp = pair2();
  Rng rng(2);
  Vec m = gp.sample_mor(rng);
  CHECK_THROWS_AS((void)make_lazy_path(gp, {m, m}, {}), Error);  // two arrows, no path
}

TEST_CASE("remove/add constant path") {
  GroupoidPresentation gp = pair2();
  Vec x = v2(-1, 0);
  Vec g0 = gp.mor_from_free(v2(0, 0.5), x);
  Vec y = gp.target(g0);
  Vec g1 = gp.mor_from_free(v2(1, -1), y);
  LazyPath g = make_lazy_path(gp, {g0, g1}, {SampledPath::constant(y, 32, 4)});

  LazyPath r = move_remove_constant(gp, g, 0);
  CHECK(r.order() == 0);
  CHECK((r.arrows[0] - gp.compose(g1, g0)).norm() == 0.0);

  // add then remove is the identity sample-wise
  LazyPath base = simple_path(gp);
  LazyPath plus = move_add_constant(gp, base, 0);
  CHECK(plus.order() == base.order() + 1);
  LazyPath back = move_remove_constant(gp, plus, 0);
  REQUIRE(back.order() == base.order());
  for (int i = 0; i <= base.order(); ++i) CHECK((back.arrows[i] - base.arrows[i]).norm() < 1e-14);
  for (int i = 0; i < base.order(); ++i)
    CHECK((back.paths[i].samples - base.paths[i].samples).norm() == 0.0);

  CHECK_THROWS_AS((void)move_remove_constant(gp, base, 0), Error);  // not constant
}

TEST_CASE("remove/add identity morphism") {
  GroupoidPresentation gp = pair2();
  Vec x = v2(-1, -1);
  Vec g0 = gp.mor_from_free(v2(-0.5, 0), x);
  Vec a = gp.target(g0);
  Vec mid = v2(0.2, 0.4);
  SampledPath a1 = SampledPath::from_waypoints({a, mid}, 32, 4);
  SampledPath a2 = SampledPath::from_waypoints({mid, v2(1, 0)}, 32, 4);
  Vec g2 = gp.mor_from_free(v2(1.5, 0), v2(1, 0));
  LazyPath g = make_lazy_path(gp, {g0, gp.unit(mid), g2}, {a1, a2});

  LazyPath r = move_remove_identity(gp, g, 1);
  CHECK(r.order() == 1);
  // concatenation endpoints
  CHECK((r.paths[0].start() - a1.start()).norm() == 0.0);
  CHECK((r.paths[0].end() - a2.end()).norm() == 0.0);
  CHECK(r.paths[0].grid() == 64);

  // splitting back recovers the factors sample-wise
  LazyPath back = move_add_identity(gp, r, 0);
  CHECK(back.order() == 2);
  CHECK((back.paths[0].samples - a1.samples).norm() == 0.0);
  CHECK((back.paths[1].samples - a2.samples).norm() == 0.0);

  CHECK_THROWS_AS((void)move_remove_identity(gp, g, 0), Error);       // boundary arrow
  LazyPath bad = g;
  bad.arrows[1] = gp.mor_from_free(v2(0.3, 0.4), mid);
  CHECK_THROWS_AS((void)move_remove_identity(gp, bad, 1), Error);     // not an identity
}

TEST_CASE("conjugation move") {
  GroupoidPresentation gp = action_groupoid_so2(Box::cube(2, 2.5));
  Vec x = v2(0.8, 0.0);
  Vec g0 = gp.unit(x);
  SampledPath alpha = SampledPath::from_waypoints({x, v2(0.5, 0.5)}, 64, 4);
  Vec g1 = gp.mor_from_free(Vec::Constant(1, 0.4), alpha.end());
  LazyPath g = make_lazy_path(gp, {g0, g1}, {alpha});

  // identity lift: zeta = unit o alpha leaves the path unchanged
  SampledPath unit_zeta = alpha.mapped(gp.unit);
  LazyPath same = move_conjugate(gp, g, 0, unit_zeta);
  CHECK((same.paths[0].samples - alpha.samples).norm() < 1e-14);
  CHECK((same.arrows[0] - g0).norm() == 0.0);
  CHECK((same.arrows[1] - g1).norm() < 1e-14);

  // rotate the middle path: zeta(r) = (theta(r), alpha(r))
  SampledPath theta = SampledPath::from_waypoints({Vec::Zero(1), Vec::Constant(1, 0.9)}, 64, 4);
  SampledPath zeta;
  zeta.samples.resize(65, gp.mor_dim);
  for (int i = 0; i <= 64; ++i)
    zeta.samples.row(i) = gp.mor_from_free(theta.node(i), alpha.node(i)).transpose();
  zeta.plateau_len = 4;
  LazyPath rotated = move_conjugate(gp, g, 0, zeta);
  for (int i = 0; i <= 64; ++i) {
    Vec expect = rot2(theta.node(i)[0]) * alpha.node(i);
    CHECK((rotated.paths[0].node(i) - expect).norm() < 1e-12);
  }

  // s o zeta != alpha is rejected
  SampledPath off = zeta;
  off.samples.col(1).array() += 0.05;
  CHECK_THROWS_AS((void)move_conjugate(gp, g, 0, off), Error);
}

TEST_CASE("thin deformation") {
  GroupoidPresentation gp = pair2();
  LazyPath g = simple_path(gp);
  const int k = g.paths[0].grid();
  const int pl = g.paths[0].plateau_len;

  // constant zetas: identity on all fields
  std::vector<SampledPath> czetas;
  for (const Vec& a : g.arrows) czetas.push_back(SampledPath::constant(a, k, pl));
  LazyPath same = thin_deform(gp, g, czetas);
  for (size_t i = 0; i < g.arrows.size(); ++i) CHECK((same.arrows[i] - g.arrows[i]).norm() == 0.0);
  for (int i = 0; i < g.order(); ++i)
    CHECK((same.paths[i].samples - g.paths[i].samples).norm() == 0.0);

  // a genuine deformation; its reversal recovers the original arrows
  std::vector<SampledPath> zetas;
  {
    // zeta_0 moves the free (target) part of gamma_0, keeps the source fixed
    Vec f0 = gp.free_of(g.arrows[0]);
    SampledPath fp = SampledPath::from_waypoints({f0, f0 + v2(0.3, -0.2)}, k, pl);
    SampledPath z0;
    z0.samples.resize(k + 1, gp.mor_dim);
    for (int i = 0; i <= k; ++i)
      z0.samples.row(i) = gp.mor_from_free(fp.node(i), gp.source(g.arrows[0])).transpose();
    z0.plateau_len = pl;
    zetas.push_back(z0);
    // zeta_1 moves the source part of gamma_1, keeps the target fixed
    Vec s1 = gp.source(g.arrows[1]);
    SampledPath sp = SampledPath::from_waypoints({s1, s1 + v2(-0.2, 0.25)}, k, pl);
    SampledPath z1;
    z1.samples.resize(k + 1, gp.mor_dim);
    for (int i = 0; i <= k; ++i)
      z1.samples.row(i) = gp.mor_from_free(gp.free_of(g.arrows[1]), sp.node(i)).transpose();
    z1.plateau_len = pl;
    zetas.push_back(z1);
  }
  LazyPath moved = thin_deform(gp, g, zetas);
  CHECK((moved.arrows[0] - zetas[0].node(k)).norm() == 0.0);
  CHECK((moved.arrows[1] - zetas[1].node(k)).norm() == 0.0);
  CHECK(moved.paths[0].grid() > g.paths[0].grid());  // spliced legs

  std::vector<SampledPath> rev = {zetas[0].reversed(), zetas[1].reversed()};
  LazyPath back = thin_deform(gp, moved, rev);
  for (size_t i = 0; i < g.arrows.size(); ++i) CHECK((back.arrows[i] - g.arrows[i]).norm() == 0.0);

  // zeta that does not start at gamma_i is rejected
  std::vector<SampledPath> bad = zetas;
  bad[0].samples.row(0) += v2(0.01, 0).transpose().replicate(1, 2);
  CHECK_THROWS_AS((void)thin_deform(gp, g, bad), Error);
}

TEST_CASE("rank-1 certificate") {
  const int m = 128, k = 128;
  auto alpha = [](double t) { return v2(std::sin(t), t * t); };

  // s-independent homotopy
  std::vector<std::vector<Vec>> h1(m + 1, std::vector<Vec>(k + 1));
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= k; ++j) h1[i][j] = alpha(static_cast<double>(j) / k);
  CHECK(rank1_certificate(h1) < 1e-10);

  // reparametrization homotopy H(s, t) = alpha(phi_s(t))
  std::vector<std::vector<Vec>> h2(m + 1, std::vector<Vec>(k + 1));
  for (int i = 0; i <= m; ++i) {
    double s = static_cast<double>(i) / m;
    for (int j = 0; j <= k; ++j) {
      double t = static_cast<double>(j) / k;
      double phi = (1 - s) * t + s * t * t;
      h2[i][j] = alpha(phi);
    }
  }
  CHECK(rank1_certificate(h2) < 1e-8);

  // a genuinely 2-dimensional sweep
  std::vector<std::vector<Vec>> h3(m + 1, std::vector<Vec>(k + 1));
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= k; ++j)
      h3[i][j] = v2(static_cast<double>(j) / k, static_cast<double>(i) / m);
  CHECK(rank1_certificate(h3) > 0.1);
}

TEST_CASE("thin groupoid structure maps") {
  GroupoidPresentation gp = pair2();
  LazyPath g = simple_path(gp);

  // compose with the unit and normalize by moves: recovers g sample-wise
  LazyPath u = lazy_unit(gp, lazy_source(gp, g), g.paths[0].grid(), g.paths[0].plateau_len);
  LazyPath comp = lazy_compose(gp, g, u);
  CHECK(comp.order() == g.order() + 1);
  LazyPath step = move_remove_constant(gp, comp, 0);   // drop the constant path
  REQUIRE(step.order() == g.order());
  for (size_t i = 0; i < g.arrows.size(); ++i) CHECK((step.arrows[i] - g.arrows[i]).norm() < 1e-14);
  for (int i = 0; i < g.order(); ++i)
    CHECK((step.paths[i].samples - g.paths[i].samples).norm() == 0.0);

  // double inversion is the identity
  LazyPath dbl = lazy_invert(gp, lazy_invert(gp, g));
  for (size_t i = 0; i < g.arrows.size(); ++i) CHECK((dbl.arrows[i] - g.arrows[i]).norm() == 0.0);
  for (int i = 0; i < g.order(); ++i)
    CHECK((dbl.paths[i].samples - g.paths[i].samples).norm() == 0.0);

  // order bookkeeping
  LazyPath g2 = simple_path(gp);
  // restart g2 at the target of g
  LazyPath tail = make_lazy_path(
      gp, {gp.mor_from_free(v2(0.1, 0.1), lazy_target(gp, g))},
      {});
  LazyPath whole = lazy_compose(gp, tail, g);
  CHECK(whole.order() == g.order() + tail.order());
}
