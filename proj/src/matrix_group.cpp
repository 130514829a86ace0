#include "hgt/matrix_group.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace hgt {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::OutOfChart: return "OutOfChart";
    case ErrorKind::SpanViolation: return "SpanViolation";
    case ErrorKind::NotComposable: return "NotComposable";
    case ErrorKind::NotAnAction: return "NotAnAction";
    case ErrorKind::GroupMismatch: return "GroupMismatch";
    case ErrorKind::IncoherentData: return "IncoherentData";
    case ErrorKind::DivisionFailure: return "DivisionFailure";
    case ErrorKind::NotASection: return "NotASection";
    case ErrorKind::EquivarianceFailure: return "EquivarianceFailure";
    case ErrorKind::HypothesisFailure: return "HypothesisFailure";
    case ErrorKind::EndpointMismatch: return "EndpointMismatch";
    case ErrorKind::NotConstant: return "NotConstant";
    case ErrorKind::NotIdentity: return "NotIdentity";
    case ErrorKind::SourceMismatch: return "SourceMismatch";
    case ErrorKind::BoundaryMismatch: return "BoundaryMismatch";
    case ErrorKind::FiberMismatch: return "FiberMismatch";
    case ErrorKind::ProbeDisagreement: return "ProbeDisagreement";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::BuildError: return "BuildError";
  }
  return "Unknown";
}

bool MatrixGroup::is_member(const Mat& m) const {
  return member_distance(m) < membership_tol * std::max(1.0, m.norm());
}

double MatrixGroup::member_distance(const Mat& m) const {
  if (m.rows() != dim || m.cols() != dim) return 1e300;
  return (project(m) - m).norm();
}

std::pair<Vec, double> MatrixGroup::span_coords(const Mat& x) const {
  const int k = algebra_dim();
  if (k == 0) return {Vec::Zero(0), x.norm()};
  Mat basis(dim * dim, k);
  for (int j = 0; j < k; ++j) basis.col(j) = Eigen::Map<const Vec>(generators[j].data(), dim * dim);
  Vec rhs = Eigen::Map<const Vec>(x.data(), dim * dim);
  Vec c = basis.colPivHouseholderQr().solve(rhs);
  double res = (basis * c - rhs).norm();
  return {c, res};
}

Mat MatrixGroup::from_coords(const Vec& c) const {
  Mat x = Mat::Zero(dim, dim);
  for (int j = 0; j < algebra_dim(); ++j) x += c[j] * generators[j];
  return x;
}

AlgebraElement MatrixGroup::random_algebra(Rng& rng, double scale) const {
  Vec c(algebra_dim());
  for (int j = 0; j < algebra_dim(); ++j) c[j] = rng.uniform(-scale, scale);
  return AlgebraElement{from_coords(c)};
}

Mat MatrixGroup::random_element(Rng& rng, double scale) const {
  return group_exp(*this, random_algebra(rng, scale));
}

Mat group_exp(const MatrixGroup& g, const AlgebraElement& x) {
  auto [c, res] = g.span_coords(x.m);
  (void)c;
  if (res > 1e-6 * std::max(1.0, x.m.norm()))
    throw Error(ErrorKind::SpanViolation, "exp argument not in algebra span of " + g.name);
  if (x.m.norm() == 0.0) return g.identity();
  Mat e = x.m.exp();
  if (!e.allFinite()) throw Error(ErrorKind::NonConvergent, "matrix exponential diverged");
  Mat p = g.project(e);
  if ((p - e).norm() > 1e-6 * std::max(1.0, e.norm()))
    throw Error(ErrorKind::NonConvergent, "exponential left the group beyond tolerance");
  return p;
}

AlgebraElement group_log(const MatrixGroup& g, const Mat& m) {
  if ((m - g.identity()).norm() >= g.log_radius)
    throw Error(ErrorKind::OutOfChart, "log argument outside injectivity chart of " + g.name);
  if ((m - g.identity()).norm() == 0.0) return AlgebraElement{Mat::Zero(g.dim, g.dim)};
  Mat l = m.log();
  if (!l.allFinite()) throw Error(ErrorKind::NonConvergent, "matrix logarithm diverged");
  auto [c, res] = g.span_coords(l);
  if (res > 1e-7 * std::max(1.0, l.norm()))
    throw Error(ErrorKind::SpanViolation, "log left the algebra span of " + g.name);
  return AlgebraElement{g.from_coords(c)};
}

AlgebraElement adjoint(const MatrixGroup& g, const Mat& a, const AlgebraElement& x) {
  Mat r = a * x.m * a.inverse();
  auto [c, res] = g.span_coords(r);
  if (res > 1e-7 * std::max(1.0, r.norm()))
    throw Error(ErrorKind::SpanViolation, "adjoint left the algebra span of " + g.name);
  return AlgebraElement{g.from_coords(c)};
}

AlgebraElement maurer_cartan(const MatrixGroup& g, const Mat& a, const Mat& v) {
  Mat r = a.inverse() * v;
  auto [c, res] = g.span_coords(r);
  if (res > 1e-6 * std::max(1.0, r.norm()))
    throw Error(ErrorKind::SpanViolation, "tangent is not tangent to " + g.name + " at the base point");
  return AlgebraElement{g.from_coords(c)};
}

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  return AlgebraElement{x.m * y.m - y.m * x.m};
}

Mat rot2(double theta) {
  Mat r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

namespace {

// Nearest (special) orthogonal matrix via SVD polar factor.
Mat project_special_orthogonal(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Mat u = svd.matrixU();
    u.col(m.cols() - 1) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

}  // namespace

MatrixGroup make_so2() {
  MatrixGroup g;
  g.name = "SO2";
  g.dim = 2;
  Mat j(2, 2);
  j << 0, -1, 1, 0;
  g.generators = {j};
  g.project = project_special_orthogonal;
  return g;
}

MatrixGroup make_so3() {
  MatrixGroup g;
  g.name = "SO3";
  g.dim = 3;
  Mat l1 = Mat::Zero(3, 3), l2 = Mat::Zero(3, 3), l3 = Mat::Zero(3, 3);
  l1(1, 2) = -1; l1(2, 1) = 1;
  l2(0, 2) = 1;  l2(2, 0) = -1;
  l3(0, 1) = -1; l3(1, 0) = 1;
  g.generators = {l1, l2, l3};
  g.project = project_special_orthogonal;
  return g;
}

MatrixGroup make_translation(int n) {
  MatrixGroup g;
  g.name = "R^" + std::to_string(n);
  g.dim = n + 1;
  for (int i = 0; i < n; ++i) {
    Mat e = Mat::Zero(n + 1, n + 1);
    e(i, n) = 1.0;
    g.generators.push_back(e);
  }
  // log of a unipotent translation is global and exact
  g.log_radius = 1e12;
  g.project = [n](const Mat& m) {
    Mat p = Mat::Identity(n + 1, n + 1);
    p.block(0, n, n, 1) = m.block(0, n, n, 1);
    return p;
  };
  return g;
}

MatrixGroup make_trivial() {
  MatrixGroup g;
  g.name = "trivial";
  g.dim = 1;
  g.generators = {};
  g.project = [](const Mat& m) {
    (void)m;
    return Mat::Identity(1, 1);
  };
  return g;
}

MatrixGroup group_by_name(const std::string& id) {
  if (id == "SO2") return make_so2();
  if (id == "SO3") return make_so3();
  if (id == "trivial") return make_trivial();
  if (id.rfind("R^", 0) == 0) {
    int n = std::stoi(id.substr(2));
    if (n < 1) throw Error(ErrorKind::BuildError, "translation group needs n >= 1");
    return make_translation(n);
  }
  throw Error(ErrorKind::BuildError, "unknown group identifier: " + id);
}

}  // namespace hgt
