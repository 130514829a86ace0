#ifndef HGT_VB_HPP
#define HGT_VB_HPP

#include "hgt/transport.hpp"

namespace hgt {

/// Category internal to Vect: linear structure maps S, T : V1 -> V0, unit
/// U : V0 -> V1. Composition is forced by the interchange law:
/// m(v2, v1) = v2 + v1 - U S v2.
struct TwoVectorSpace {
  Mat S, T, U;

  int v0_dim() const { return static_cast<int>(S.rows()); }
  int v1_dim() const { return static_cast<int>(S.cols()); }
  Vec compose(const Vec& v2, const Vec& v1) const { return v2 + v1 - U * S * v2; }
  Vec unit(const Vec& v) const { return U * v; }
  Vec inverse(const Vec& z) const { return U * S * z + U * T * z - z; }

  /// Groupoid axioms as exact matrix identities; throws BuildError on failure.
  void validate(double tol = 1e-12) const;
};

TwoVectorSpace arrow_2vector(int n);  // V0 = R^n, V1 = R^n + R^n (source, target)
TwoVectorSpace algebra_2vector(const CrossedModule& cm);  // L(G) => L(H) + L(G)
TwoVectorSpace line_2vector();        // V0 = R, V1 = R^2 with s = t (bundle of groups)

/// Linear 2-group action: rho0 on V0, rho1 on V1, functorial for the 2-group
/// and 2-vector-space structure maps.
struct TwoGroupLinearAction {
  std::function<Mat(const Mat&)> rho0;                // G -> GL(V0)
  std::function<Mat(const Mat&, const Mat&)> rho1;    // (h, g) -> GL(V1)
};

TwoGroupLinearAction trivial_action(int v0, int v1);
/// rho0 = the matrix itself on R^dim, rho1 = blockdiag(rho0(s), rho0(t)) on the
/// arrow 2-vector space.
TwoGroupLinearAction defining_action(const CrossedModule& cm);
/// Adjoint action on the algebra 2-vector space in generator coordinates.
TwoGroupLinearAction adjoint_action(const CrossedModule& cm);
/// Faithful action of an R-decorated 2-group on the line 2-vector space:
/// rho1(h, g) is the unipotent matrix [[1, h], [0, 1]].
TwoGroupLinearAction unipotent_action(const CrossedModule& cm);

ResidualReport check_linear_action(const CrossedModule& cm, const TwoGroupLinearAction& act,
                                   const TwoVectorSpace& v, int n_samples, std::uint64_t seed);

/// Associated VB-groupoid (E x V)/G in canonical trivialized coordinates:
/// objects (x, v), morphisms (gamma, z). Structure maps are derived from the
/// bundle's through representatives and torsor division.
struct VBGroupoid {
  Principal2Bundle b;
  TwoGroupLinearAction act;
  TwoVectorSpace v;

  using Obj = std::pair<Vec, Vec>;   // (x, v)
  using Arrow = std::pair<Vec, Vec>; // (gamma, z)

  Bundle2Arrow rep(const Vec& gamma) const;  // (gamma, (s(gamma), e), e)
  /// Canonical coordinates of the class [(delta, z)].
  Arrow normalize(const Bundle2Arrow& delta, const Vec& z) const;
  Obj normalize_obj(const E0Point& p, const Vec& vv) const;

  Obj src(const Arrow& a) const;
  Obj tgt(const Arrow& a) const;
  Arrow unit(const Obj& o) const;
  Arrow compose(const Arrow& a2, const Arrow& a1, double tol = 1e-6) const;
  Arrow inverse(const Arrow& a) const;
};

/// Builds the associated VB-groupoid after validating the action; verifies the
/// interchange law on samples (throws ActionInvalid -> NotAnAction on failure).
VBGroupoid associate(const Principal2Bundle& b, const TwoGroupLinearAction& act,
                     const TwoVectorSpace& v, int n_samples = 50, std::uint64_t seed = 13);

/// Groupoid-axiom and interchange residuals of the associated VB-groupoid.
ResidualReport check_vb_groupoid(const VBGroupoid& vb, int n_samples, std::uint64_t seed);

/// Linear cleavage C^V(gamma, (x, v)) = [C(gamma, p), 1_v].
std::function<VBGroupoid::Arrow(const Vec&, const VBGroupoid::Obj&)> linear_cleavage(
    const VBGroupoid& vb, const QuasiConnection& c);

/// Flatness and unitality residuals of the cleavage induced by c.
ResidualReport check_cleavage(const VBGroupoid& vb, const QuasiConnection& c, int n_samples,
                              std::uint64_t seed);

struct VBTransport {
  Vec src_x, dst_x;
  Mat obj_map;  // V0 -> V0 fiber isomorphism
  Mat mor_map;  // V1 -> V1
};

/// Induced transport on the associated VB-groupoid along a lazy path:
/// [p, v] -> [T(p), v] in trivialized fiber coordinates.
VBTransport vb_transport(const VBGroupoid& vb, const QuasiConnection& c,
                         const StrictConnection& omega, const LazyPath& gamma, int steps = 0);

}  // namespace hgt

#endif
