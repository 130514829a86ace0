#include <doctest.h>

#include <cmath>

#include "hgt/groupoid.hpp"

using namespace hgt;

TEST_CASE("pair groupoid") {
  GroupoidPresentation gp = pair_groupoid(2, Box::cube(2, 2.0));
  Rng rng(1);
  Vec x = gp.sample_obj(rng);
  Vec u = gp.unit(x);
  CHECK((gp.source(u) - x).norm() == 0.0);
  CHECK((gp.target(u) - x).norm() == 0.0);

  Vec m = gp.sample_mor(rng);
  Vec inv = gp.inverse(m);
  CHECK((gp.source(inv) - gp.target(m)).norm() == 0.0);
  CHECK((gp.target(inv) - gp.source(m)).norm() == 0.0);

  CHECK(groupoid_axioms(gp, 200, 2).max() < 1e-14);
}

TEST_CASE("discrete groupoid") {
  GroupoidPresentation gp = discrete_groupoid(3, Box::cube(3, 1.0));
  Rng rng(3);
  Vec x = gp.sample_obj(rng);
  CHECK((gp.compose(x, x) - x).norm() == 0.0);
  CHECK((gp.unit(x) - x).norm() == 0.0);
  Vec m = gp.sample_mor(rng);
  CHECK((gp.unit(gp.source(m)) - m).norm() == 0.0);  // every morphism is a unit
  CHECK(groupoid_axioms(gp, 200, 4).max() == 0.0);
}

TEST_CASE("SO(2) action groupoid") {
  GroupoidPresentation gp = action_groupoid_so2(Box::cube(2, 2.5));
  Rng rng(5);
  Vec x(2);
  x << 0.7, -0.4;
  Vec m = gp.mor_from_free(Vec::Constant(1, 0.9), x);
  CHECK((gp.source(m) - x).norm() == 0.0);
  CHECK((gp.target(m) - rot2(0.9) * x).norm() < 1e-15);
  CHECK((gp.unit(x) - gp.mor_from_free(Vec::Zero(1), x)).norm() == 0.0);

  // compose((theta2, R(theta1) x), (theta1, x)) = (theta1 + theta2, x)
  Vec m1 = gp.mor_from_free(Vec::Constant(1, 0.4), x);
  Vec m2 = gp.mor_from_free(Vec::Constant(1, 0.3), gp.target(m1));
  Vec c = gp.compose(m2, m1);
  CHECK(c[0] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK((gp.source(c) - x).norm() == 0.0);

  CHECK(groupoid_axioms(gp, 500, 6).max() < 1e-10);
}

TEST_CASE("a broken action is rejected") {
  MatrixGroup so2 = make_so2();
  auto bad = [](const Mat& a, const Vec& x) { return Vec(a * x + Vec::Constant(2, 0.1)); };
  CHECK_THROWS_AS((void)action_groupoid(so2, 2, bad, Box::cube(2, 2.0), Box::cube(1, 1.0)),
                  Error);
}

TEST_CASE("tangent_eval") {
  // linear functions are differentiated exactly
  Mat a(2, 3);
  a << 1, 2, 3, -4, 0.5, 2;
  auto f = [&a](const Vec& x) { return Vec(a * x); };
  Vec at(3), dir(3);
  at << 0.1, 0.2, 0.3;
  dir << 1, -1, 2;
  CHECK((tangent_eval(f, at, dir, 1e-4) - a * dir).norm() < 1e-12);

  // sin oracle
  auto g = [](const Vec& x) { return Vec(Vec::Constant(1, std::sin(x[0]))); };
  Vec e1 = Vec::Unit(2, 0);
  Vec at2(2);
  at2 << 0.6, 0.0;
  double d = tangent_eval(g, at2, e1, 1e-4)[0];
  CHECK(std::abs(d - std::cos(0.6)) < 1e-8);

  // halving h divides the error by about 4
  double e1h = std::abs(tangent_eval(g, at2, e1, 2e-3)[0] - std::cos(0.6));
  double e2h = std::abs(tangent_eval(g, at2, e1, 1e-3)[0] - std::cos(0.6));
  CHECK(e1h / e2h == doctest::Approx(4.0).epsilon(0.1));

  // chart enforcement
  auto inside = [](const Vec& x) { return x.norm() < 0.5; };
  CHECK_THROWS_AS((void)tangent_eval(g, at2, e1, 1e-4, inside), Error);
}
