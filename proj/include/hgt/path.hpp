#ifndef HGT_PATH_HPP
#define HGT_PATH_HPP

#include <vector>

#include "hgt/groupoid.hpp"

namespace hgt {

/// A path with sitting instants sampled on the uniform grid t_i = i/K.
/// The first and last plateau_len+1 samples are equal (the sitting instants),
/// which makes midpoint concatenation smooth.
struct SampledPath {
  Eigen::MatrixXd samples;  // (K+1) x d, one chart point per row
  int plateau_len = 8;

  int grid() const { return static_cast<int>(samples.rows()) - 1; }
  int dim() const { return static_cast<int>(samples.cols()); }
  Vec node(int i) const { return samples.row(i).transpose(); }
  Vec start() const { return node(0); }
  Vec end() const { return node(grid()); }

  /// Local degree-4 Lagrange interpolation on the sample grid.
  Vec eval(double t) const;
  /// Derivative (d/dt) of the same interpolant.
  Vec deriv(double t) const;

  bool is_constant(double tol = 1e-8) const;
  bool sits(double tol = 1e-12) const;

  SampledPath reversed() const;
  /// Pointwise image under f (e.g. s or t applied to a path in X1).
  SampledPath mapped(const std::function<Vec(const Vec&)>& f) const;
  /// Resample as t -> eval(phi(t)) on a K2-grid.
  SampledPath reparametrized(const std::function<double(double)>& phi, int k2) const;

  static SampledPath constant(const Vec& x, int k = 128, int plateau = 8);
  /// Cubic-spline fill through waypoints, composed with a smooth time warp
  /// that enforces the sitting instants exactly.
  static SampledPath from_waypoints(const std::vector<Vec>& waypoints, int k = 128,
                                    int plateau = 8);
  /// Run a on [0, 1/2] then b; grids add, so density doubles for equal grids.
  static SampledPath concat(const SampledPath& a, const SampledPath& b,
                            double tol = kTolMatch);
};

/// Smooth monotone warp [0,1] -> [0,1] that is exactly 0 on [0, a] and exactly
/// 1 on [1-a, 1], C^6 at the junctions.
double plateau_warp(double t, double a);
double smoothstep6(double x);

/// Lazy Haefliger path (gamma_0, alpha_1, gamma_1, ..., alpha_n, gamma_n):
/// arrows[i] in X1, paths[j] the sitting-instant path between arrows[j] and
/// arrows[j+1].
struct LazyPath {
  std::vector<Vec> arrows;
  std::vector<SampledPath> paths;

  int order() const { return static_cast<int>(paths.size()); }
};

LazyPath make_lazy_path(const GroupoidPresentation& gp, std::vector<Vec> arrows,
                        std::vector<SampledPath> paths, double tol = kTolMatch);

Vec lazy_source(const GroupoidPresentation& gp, const LazyPath& path);
Vec lazy_target(const GroupoidPresentation& gp, const LazyPath& path);

// Equivalence moves. Path indices are 0-based positions into `paths`.
LazyPath move_remove_constant(const GroupoidPresentation& gp, const LazyPath& g, int i,
                              double tol = 1e-8);
LazyPath move_add_constant(const GroupoidPresentation& gp, const LazyPath& g, int i);
LazyPath move_remove_identity(const GroupoidPresentation& gp, const LazyPath& g, int i,
                              double tol = 1e-8);
LazyPath move_add_identity(const GroupoidPresentation& gp, const LazyPath& g, int i,
                           double tol = 1e-8);
LazyPath move_conjugate(const GroupoidPresentation& gp, const LazyPath& g, int i,
                        const SampledPath& zeta, double tol = 1e-6);

/// Thin deformation along zetas[i] : gamma_i ~> gamma_i'; the replaced paths
/// are spliced so the boundary square closes sample-wise. Constant legs are
/// dropped, so all-constant zetas return the path unchanged.
LazyPath thin_deform(const GroupoidPresentation& gp, const LazyPath& g,
                     const std::vector<SampledPath>& zetas, double tol = 1e-6);

/// Max second singular value of the central-difference Jacobian of a sampled
/// homotopy H[i][j] = H(i/M, j/K) over interior grid nodes.
double rank1_certificate(const std::vector<std::vector<Vec>>& grid,
                         const std::function<bool(const Vec&)>& in_chart = {});

// Thin fundamental groupoid structure maps.
LazyPath lazy_compose(const GroupoidPresentation& gp, const LazyPath& second,
                      const LazyPath& first, double tol = kTolMatch);
LazyPath lazy_invert(const GroupoidPresentation& gp, const LazyPath& g);
LazyPath lazy_unit(const GroupoidPresentation& gp, const Vec& x, int k = 128, int plateau = 8);

}  // namespace hgt

#endif
