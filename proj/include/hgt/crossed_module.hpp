#ifndef HGT_CROSSED_MODULE_HPP
#define HGT_CROSSED_MODULE_HPP

#include <functional>
#include <string>

#include "hgt/matrix_group.hpp"

namespace hgt {

/// Lie crossed module (G, H, tau, alpha). Generates the 2-group [H x| G => G]
/// whose arrows are pairs (h, g) with source g and target tau(h) g.
///
/// `tauH_distance` is an analytic distance from a G element to the image
/// subgroup tau(H); membership in an immersed subgroup is ill-posed
/// numerically, so each builtin supplies its own exact test.
struct CrossedModule {
  std::string name;
  MatrixGroup G;
  MatrixGroup H;
  std::function<Mat(const Mat&)> tau;
  std::function<Mat(const Mat&, const Mat&)> alpha;  // (g, h) -> h'
  std::function<double(const Mat&)> tauH_distance;

  bool tauH_member(const Mat& g, double tol = 1e-6) const { return tauH_distance(g) < tol; }

  Mat alpha_of(const Mat& g, const Mat& h) const { return alpha(g, h); }
};

/// Arrow (h, g) of the 2-group [H x| G => G].
struct TwoGroupArrow {
  Mat h;
  Mat g;
};

Mat arrow_source(const CrossedModule& cm, const TwoGroupArrow& a);
Mat arrow_target(const CrossedModule& cm, const TwoGroupArrow& a);
TwoGroupArrow arrow_unit(const CrossedModule& cm, const Mat& g);

/// (h2, g2) o (h1, g1) = (h2 h1, g1); requires g2 = tau(h1) g1 within tol.
TwoGroupArrow arrow_compose(const CrossedModule& cm, const TwoGroupArrow& a2,
                            const TwoGroupArrow& a1, double tol = kTolMatch);

/// Groupoid inverse i(h, g) = (h^-1, tau(h) g).
TwoGroupArrow arrow_inverse(const CrossedModule& cm, const TwoGroupArrow& a);

/// Monoidal product (h2, g2) (x) (h1, g1) = (h2 alpha(g2, h1), g2 g1).
TwoGroupArrow arrow_tensor(const CrossedModule& cm, const TwoGroupArrow& a2,
                           const TwoGroupArrow& a1);

/// Group inverse (h, g)^-1 = (alpha(g^-1, h^-1), g^-1).
TwoGroupArrow tensor_inverse(const CrossedModule& cm, const TwoGroupArrow& a);

/// Max Frobenius residual of each crossed-module axiom over seeded samples:
/// labels "tau_hom", "peiffer1", "peiffer2", "alpha_hom", "tauH_image".
ResidualReport check_peiffer(const CrossedModule& cm, int n_samples, std::uint64_t seed);

// Builtin modules.
CrossedModule make_cm_conjugation(const MatrixGroup& g, const std::string& name = "");
CrossedModule make_cm1();  // (SO2, SO2, id, conj)
CrossedModule make_cm2();  // ({e}, R, tau = e, alpha = id)
CrossedModule make_cm3();  // (SO2, R, tau(x) = R(x), alpha trivial)
CrossedModule make_cm4();  // (R^2, R, tau(x) = (x, 0), alpha trivial)
CrossedModule make_cm_discrete(const MatrixGroup& g);  // (G, {e}): the discrete 2-group [G => G]

/// Lookup by scenario identifier: "CM1".."CM4", "discrete:SO2", "conj:SO3", ...
CrossedModule crossed_module_by_name(const std::string& id);

}  // namespace hgt

#endif
