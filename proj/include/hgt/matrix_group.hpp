#ifndef HGT_MATRIX_GROUP_HPP
#define HGT_MATRIX_GROUP_HPP

#include <functional>
#include <string>
#include <vector>

#include "hgt/common.hpp"

namespace hgt {

/// Element of a matrix Lie algebra, kept in the span of its group's generators.
struct AlgebraElement {
  Mat m;
};

/// A Lie group realized concretely as a set of dim x dim real matrices.
///
/// Membership is enforced by `project` (snap a near-member onto the group)
/// plus `membership_tol`; `generators` span the Lie algebra.
struct MatrixGroup {
  std::string name;
  int dim = 1;
  double membership_tol = 1e-9;
  double log_radius = 0.9;  // injectivity chart: log defined for ||m - I|| < log_radius
  std::vector<Mat> generators;
  std::function<Mat(const Mat&)> project;

  Mat identity() const { return Mat::Identity(dim, dim); }
  int algebra_dim() const { return static_cast<int>(generators.size()); }

  bool is_member(const Mat& m) const;
  double member_distance(const Mat& m) const;

  /// Coordinates of x in the generator basis (least squares) and the residual.
  std::pair<Vec, double> span_coords(const Mat& x) const;

  Mat from_coords(const Vec& c) const;

  AlgebraElement random_algebra(Rng& rng, double scale = 0.4) const;
  Mat random_element(Rng& rng, double scale = 0.4) const;
};

Mat group_exp(const MatrixGroup& g, const AlgebraElement& x);
AlgebraElement group_log(const MatrixGroup& g, const Mat& m);
AlgebraElement adjoint(const MatrixGroup& g, const Mat& a, const AlgebraElement& x);
AlgebraElement maurer_cartan(const MatrixGroup& g, const Mat& a, const Mat& v);

/// Lie bracket [x, y] = xy - yx.
AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);

// Builtin groups. Translation groups are (n+1)x(n+1) affine matrices.
MatrixGroup make_so2();
MatrixGroup make_so3();
MatrixGroup make_translation(int n);
MatrixGroup make_trivial();

/// Lookup by scenario identifier: "SO2", "SO3", "R^n" (e.g. "R^2"), "trivial".
MatrixGroup group_by_name(const std::string& id);

Mat rot2(double theta);

}  // namespace hgt

#endif
