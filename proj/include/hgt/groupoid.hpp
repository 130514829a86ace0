#ifndef HGT_GROUPOID_HPP
#define HGT_GROUPOID_HPP

#include <functional>
#include <string>

#include "hgt/matrix_group.hpp"

namespace hgt {

struct Box {
  Vec lo, hi;
  bool contains(const Vec& v, double pad = 0.0) const {
    if (v.size() != lo.size()) return false;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (v[i] < lo[i] - pad || v[i] > hi[i] + pad) return false;
    return true;
  }
  static Box cube(int n, double half) {
    return {Vec::Constant(n, -half), Vec::Constant(n, half)};
  }
};

/// A Lie groupoid presented by single open-box charts for objects and
/// morphisms plus callable structure maps. Every callable must be pure.
///
/// `mor_from_free` reconstructs a morphism from its source point and the
/// remaining "free" coordinates; it is what lets samplers and tangent
/// constructions build composable chains instead of rejection sampling.
struct GroupoidPresentation {
  std::string name;
  int obj_dim = 0;
  int mor_dim = 0;
  int free_dim = 0;

  std::function<Vec(const Vec&)> source, target, unit, inverse;
  std::function<Vec(const Vec&, const Vec&)> compose;  // (m2, m1) with s(m2) = t(m1)
  std::function<Vec(const Vec&, const Vec&)> mor_from_free;  // (free, src) -> morphism

  Box obj_box, mor_box;
  std::function<bool(const Vec&)> in_obj_chart, in_mor_chart;

  Vec sample_obj(Rng& rng) const { return rng.uniform_vec(obj_box.lo, obj_box.hi); }
  Vec sample_free(Rng& rng) const;
  Vec free_of(const Vec& m) const { return m.head(free_dim); }
  Vec sample_mor_from(const Vec& x, Rng& rng) const { return mor_from_free(sample_free(rng), x); }
  Vec sample_mor(Rng& rng) const { return sample_mor_from(sample_obj(rng), rng); }

  bool composable(const Vec& m2, const Vec& m1, double tol = kTolMatch) const {
    return (source(m2) - target(m1)).norm() < tol;
  }
};

GroupoidPresentation pair_groupoid(int n, const Box& chart);
GroupoidPresentation discrete_groupoid(int n, const Box& chart);

/// Action groupoid G |x R^n for a one-parameter-coordinate matrix group whose
/// exponential is additive in coordinates (true for the builtin abelian
/// groups). Morphism coordinates are (algebra coords, source point).
GroupoidPresentation action_groupoid(const MatrixGroup& g, int n,
                                     const std::function<Vec(const Mat&, const Vec&)>& act,
                                     const Box& obj_chart, const Box& coord_chart);

GroupoidPresentation action_groupoid_so2(const Box& obj_chart, double theta_max = 1.5);

/// Central difference (f(at + h dir) - f(at - h dir)) / (2h).
Vec tangent_eval(const std::function<Vec(const Vec&)>& f, const Vec& at, const Vec& dir,
                 double h, const std::function<bool(const Vec&)>& in_chart = {});

/// Structure-axiom residuals over seeded samples: labels "unit_st", "compose_st",
/// "assoc", "left_unit", "right_unit", "inverse".
ResidualReport groupoid_axioms(const GroupoidPresentation& gp, int n_samples, std::uint64_t seed);

GroupoidPresentation groupoid_by_name(const std::string& id, int n, const Box& chart);

}  // namespace hgt

#endif
