#include <doctest.h>

#include <cmath>

#include "hgt/matrix_group.hpp"

using namespace hgt;

namespace {

// truncated-series oracle, independent of the exp implementation
Mat taylor_exp(const Mat& x, int terms) {
  Mat sum = Mat::Identity(x.rows(), x.cols());
  Mat pow = sum;
  double fact = 1.0;
  for (int k = 1; k <= terms; ++k) {
    pow = pow * x;
    fact *= k;
    sum += pow / fact;
  }
  return sum;
}

Mat so3_hat(const Vec& v) {
  Mat m = Mat::Zero(3, 3);
  m(0, 1) = -v[2]; m(1, 0) = v[2];
  m(0, 2) = v[1];  m(2, 0) = -v[1];
  m(1, 2) = -v[0]; m(2, 1) = v[0];
  return m;
}

}  // namespace

TEST_CASE("exp on SO(2)") {
  MatrixGroup so2 = make_so2();
  CHECK((group_exp(so2, {Mat::Zero(2, 2)}) - Mat::Identity(2, 2)).norm() == 0.0);

  const double half_pi = 1.5707963267948966;
  Mat q = group_exp(so2, {Mat(half_pi * so2.generators[0])});
  Mat expected(2, 2);
  expected << 0, -1, 1, 0;  // rotation by 90 degrees
  CHECK((q - expected).norm() < 1e-14);
}

TEST_CASE("exp on SO(3) matches the Taylor oracle") {
  MatrixGroup so3 = make_so3();
  Rng rng(7);
  for (int i = 0; i < 32; ++i) {
    AlgebraElement x = so3.random_algebra(rng, 0.05);
    CHECK((group_exp(so3, x) - taylor_exp(x.m, 10)).norm() < 1e-12);
  }
}

TEST_CASE("log on SO(2)") {
  MatrixGroup so2 = make_so2();
  CHECK(group_log(so2, so2.identity()).m.norm() == 0.0);
  AlgebraElement l = group_log(so2, rot2(0.3));
  CHECK((l.m - Mat(0.3 * so2.generators[0])).norm() < 1e-14);

  CHECK_THROWS_AS((void)group_log(so2, rot2(2.5)), Error);  // outside the chart
  try {
    (void)group_log(so2, rot2(2.5));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfChart);
  }
}

TEST_CASE("exp/log round trips near the identity") {
  for (const MatrixGroup& g : {make_so2(), make_so3(), make_translation(3)}) {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
      Mat m = g.random_element(rng, 0.25);
      CHECK((group_exp(g, group_log(g, m)) - m).norm() < 1e-9);
      AlgebraElement x = g.random_algebra(rng, 0.5 / std::max(1, g.algebra_dim()));
      CHECK((group_log(g, group_exp(g, x)).m - x.m).norm() < 1e-9);
    }
  }
}

TEST_CASE("adjoint") {
  MatrixGroup so2 = make_so2(), so3 = make_so3();
  Rng rng(3);
  AlgebraElement x = so2.random_algebra(rng);
  CHECK((adjoint(so2, so2.identity(), x).m - x.m).norm() < 1e-14);
  // abelian group: adjoint is trivial
  CHECK((adjoint(so2, rot2(0.8), x).m - x.m).norm() < 1e-13);

  // SO(3): Ad_R hat(v) = hat(R v)
  for (int i = 0; i < 25; ++i) {
    Mat r = so3.random_element(rng, 0.6);
    Vec v(3);
    for (int j = 0; j < 3; ++j) v[j] = rng.uniform(-1, 1);
    CHECK((adjoint(so3, r, {so3_hat(v)}).m - so3_hat(Vec(r * v))).norm() < 1e-12);
  }
}

TEST_CASE("adjoint is an algebra automorphism") {
  MatrixGroup so3 = make_so3();
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    Mat a = so3.random_element(rng);
    AlgebraElement x = so3.random_algebra(rng), y = so3.random_algebra(rng);
    Mat lhs = adjoint(so3, a, bracket(x, y)).m;
    Mat rhs = bracket(adjoint(so3, a, x), adjoint(so3, a, y)).m;
    CHECK((lhs - rhs).norm() < 1e-9);
  }
}

TEST_CASE("maurer-cartan form") {
  MatrixGroup so3 = make_so3();
  Rng rng(9);
  AlgebraElement x = so3.random_algebra(rng);
  CHECK((maurer_cartan(so3, so3.identity(), x.m).m - x.m).norm() < 1e-14);

  // along c(t) = exp(t x), Theta(c'(t)) = x; derivative by central differences
  const double h = 1e-6;
  for (double t : {0.0, 0.4, 0.9}) {
    Mat at = group_exp(so3, {Mat(t * x.m)});
    Mat vel = (group_exp(so3, {Mat((t + h) * x.m)}) - group_exp(so3, {Mat((t - h) * x.m)})) /
              (2 * h);
    CHECK((maurer_cartan(so3, at, vel).m - x.m).norm() < 1e-9);
    // left invariance: the left-translated curve gives the same value
    Mat g0 = so3.random_element(rng);
    CHECK((maurer_cartan(so3, Mat(g0 * at), Mat(g0 * vel)).m - x.m).norm() < 1e-9);
  }

  // SpanViolation for a non-tangent direction
  Mat bad = Mat::Identity(3, 3);
  CHECK_THROWS_AS((void)maurer_cartan(so3, so3.identity(), bad), Error);
}

TEST_CASE("group membership and closure") {
  for (const MatrixGroup& g : {make_so2(), make_so3(), make_translation(2), make_trivial()}) {
    CHECK(g.is_member(g.identity()));
    Rng rng(13);
    for (int i = 0; i < 40; ++i) {
      Mat a = g.random_element(rng), b = g.random_element(rng);
      CHECK(g.is_member(Mat(a * b)));
      CHECK(g.is_member(Mat(a.inverse())));
      CHECK((g.project(Mat(a * b)) - a * b).norm() < g.membership_tol);
    }
    // generators are linearly independent
    if (g.algebra_dim() > 0) {
      Mat basis(g.dim * g.dim, g.algebra_dim());
      for (int j = 0; j < g.algebra_dim(); ++j)
        basis.col(j) = Eigen::Map<const Vec>(g.generators[j].data(), g.dim * g.dim);
      Eigen::ColPivHouseholderQR<Mat> qr(basis);
      CHECK(qr.rank() == g.algebra_dim());
    }
  }
}

TEST_CASE("translation group is exact and globally charted") {
  MatrixGroup r2 = make_translation(2);
  Mat big = Mat::Identity(3, 3);
  big(0, 2) = 5.0;
  big(1, 2) = -3.0;
  AlgebraElement l = group_log(r2, big);  // log radius is global here
  CHECK((group_exp(r2, l) - big).norm() < 1e-12);
}
