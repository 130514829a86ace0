#ifndef HGT_CONNECTION_HPP
#define HGT_CONNECTION_HPP

#include "hgt/bundle.hpp"

namespace hgt {

/// Tangent to E0 = X0 x G at p: base direction vx, fiber direction vg (a
/// matrix tangent to G at p.g, i.e. vg = p.g * xi for algebra xi).
struct E0Tangent {
  E0Point p;
  Vec vx;
  Mat vg;
};

/// Tangent to E1 = s*E0 x H at d, components along (gamma, x, g, h).
struct E1Tangent {
  Bundle2Arrow d;
  Vec vgamma;
  Vec vx;
  Mat vg;
  Mat vh;
};

/// Element of L(H x| G) in (L(H), L(G)) components. Structure maps of the
/// algebra groupoid: source xG, target dtau(xH) + xG, composition
/// (xH2, xG2) o (xH1, xG1) = (xH2 + xH1, xG1).
struct AlgArrow {
  Mat xH, xG;
};

/// dalpha/dg at e in direction xi applied to h: d/ds alpha(exp(s xi), h).
Mat alpha_velocity(const CrossedModule& cm, const Mat& xi, const Mat& h, double step = 1e-5);
/// Differential of alpha(g, .) at e in direction xiH.
Mat alpha_differential(const CrossedModule& cm, const Mat& g, const Mat& xiH, double step = 1e-5);
/// Differential of tau at e.
Mat tau_differential(const CrossedModule& cm, const Mat& xiH, double step = 1e-5);
/// Adjoint action of the 2-group element (h, g) on L(H x| G).
AlgArrow ad_2group(const CrossedModule& cm, const Mat& h, const Mat& g, const AlgArrow& xi,
                   double step = 1e-5);

/// Strict connection stored as a base potential A0 in the global
/// trivialization; omega0 and omega1 are derived so that equivariance and
/// vertical normalization hold by construction:
///   omega0(x, g; vx, vg) = Ad_{g^-1} A0(x, vx) + g^-1 vg
///   omega1 = ad_{(h,e)}(s*omega0) - Theta_h  (decorated-coordinate form)
struct StrictConnection {
  Principal2Bundle owner;
  std::function<Mat(const Vec&, const Vec&)> A0;  // (x, vx) -> L(G)
  double fd_step = 1e-5;

  Mat omega0(const E0Tangent& v) const;
  AlgArrow omega1(const E1Tangent& v) const;
};

StrictConnection trivial_connection(const Principal2Bundle& b,
                                    const std::function<Mat(const Vec&, const Vec&)>& a0);

/// Decorated connection from a classical connection on E_G; verifies the
/// hypothesis s*omega = t*omega on sampled tangents of s*E_G.
StrictConnection decorated_connection(const PrincipalGroupBundle& pg, const CrossedModule& cm,
                                      const std::function<Mat(const Vec&, const Vec&)>& a0,
                                      double tol = 1e-6, int n_samples = 50,
                                      std::uint64_t seed = 5);

/// Pullback F*omega along a bundle morphism; the potential is reconstructed
/// from finite-difference pushforwards at the identity slice.
StrictConnection pullback_connection(const BundleMorphism& f, const StrictConnection& omega,
                                     const Principal2Bundle& source_bundle);

/// Residuals: vertical normalization, equivariance, and the functoriality of
/// (omega1, omega0) against the structure maps of the total groupoid.
ResidualReport validate_strict(const StrictConnection& omega, int n_samples, std::uint64_t seed);

/// Residual of s*omega = t*omega on sampled tangents of s*E_G.
double pullback_hypothesis_residual(const PrincipalGroupBundle& pg,
                                    const std::function<Mat(const Vec&, const Vec&)>& a0,
                                    int n_samples, std::uint64_t seed);

}  // namespace hgt

#endif
