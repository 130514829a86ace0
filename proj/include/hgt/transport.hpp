#ifndef HGT_TRANSPORT_HPP
#define HGT_TRANSPORT_HPP

#include "hgt/connection.hpp"
#include "hgt/path.hpp"

namespace hgt {

/// 2-group-equivariant map between fiber torsors of a principal 2-bundle.
struct TorsorMap {
  Vec src_x, dst_x;
  std::function<E0Point(const E0Point&)> obj;
  std::function<Bundle2Arrow(const Bundle2Arrow&)> mor;
};

TorsorMap identity_torsor(const Vec& x);
TorsorMap compose_torsor(const TorsorMap& second, const TorsorMap& first,
                         double tol = 1e-6);

/// Cartesian-lift transport T_C(gamma): fiber over t(gamma) -> fiber over s(gamma),
/// p |-> mu_C(gamma^-1, p), zeta |-> C(gamma^-1, q) o zeta o C(gamma^-1, p)^-1.
TorsorMap cartesian_transport(const Principal2Bundle& b, const QuasiConnection& c,
                              const Vec& gamma);

struct LiftResult {
  E0Point endpoint;
  std::vector<Mat> frames;  // group factor at each integration node
};

/// Horizontal lift of alpha from p0: classic RK4 for g' = -A0(alpha, alpha') g
/// on the sample grid, endpoint projected onto the group.
LiftResult horizontal_lift(const StrictConnection& omega, const SampledPath& alpha,
                           const E0Point& p0, int steps = 0);

/// Horizontal lift in E1 along a path zeta in X1 starting from delta0 over zeta(0).
Bundle2Arrow morphism_lift(const StrictConnection& omega, const SampledPath& zeta,
                           const Bundle2Arrow& delta0, int steps = 0);

/// T_omega^alpha as a torsor map; mor level lifts along u o alpha.
TorsorMap path_transport(const StrictConnection& omega, const SampledPath& alpha, int steps = 0);

/// Residuals of the source/target/unit transport identities
///   (1) Tr^{s o zeta}(s(delta)) = s(Tr^{zeta}(delta))
///   (2) Tr^{t o zeta}(t(delta)) = t(Tr^{zeta}(delta))
///   (3) Tr^{u o alpha}(u(p))    = u(Tr^{alpha}(p))
ResidualReport lemma_transport_identities(const StrictConnection& omega, int n_samples,
                                          std::uint64_t seed, int grid = 64);

/// T_(Gamma, C, omega) = T_C(gamma_n^-1) o T^alpha_n o ... o T^alpha_1 o T_C(gamma_0^-1).
TorsorMap lazy_transport(const Principal2Bundle& b, const QuasiConnection& c,
                         const StrictConnection& omega, const LazyPath& gamma, int steps = 0);

struct QuotientWitness {
  bool equal = false;
  Mat divider;      // delta with F(z) delta = F'(z)
  double distance;  // distance of the divider to tau(H)
};

/// Equality in the quotient of G-Tor: the divider of F, F' at a probe must lie
/// in tau(H); checked at three probes.
QuotientWitness quotient_equal(const Principal2Bundle& b, const TorsorMap& f,
                               const TorsorMap& fprime, double member_tol = 1e-6);

/// Pseudofunctor data of T_C: unitor component I_x(p) and compositor component
/// alpha_{gamma1, gamma2}(p).
Bundle2Arrow unitor_component(const Principal2Bundle& b, const QuasiConnection& c, const Vec& x,
                              const E0Point& p);
Bundle2Arrow compositor_component(const Principal2Bundle& b, const QuasiConnection& c,
                                  const Vec& gamma1, const Vec& gamma2, const E0Point& p);

/// Naturality squares of I and alpha plus the triangle and pentagon coherence laws.
ResidualReport pseudofunctor_coherence(const Principal2Bundle& b, const QuasiConnection& c,
                                       int n_samples, std::uint64_t seed);

/// One path-transform for the invariance suite.
struct TransformSpec {
  std::string kind;  // remove_constant | add_constant | remove_identity | add_identity |
                     // conjugate | thin_deform | reparametrize
  int index = 0;
  SampledPath zeta;
  std::vector<SampledPath> zetas;
  double warp = 0.05;  // plateau fraction of the reparametrization warp
};

LazyPath apply_transform(const GroupoidPresentation& gp, const LazyPath& g,
                         const TransformSpec& spec);

/// Builds Gamma' by the transform, transports both, and compares in the
/// quotient. Labels: "quotient_equal" (0 pass / 1 fail), "divider_distance",
/// and "obj_agreement" for reparametrizations.
ResidualReport invariance_suite(const Principal2Bundle& b, const QuasiConnection& c,
                                const StrictConnection& omega, const LazyPath& gamma,
                                const TransformSpec& spec, int steps = 0);

/// Functor laws at the quotient level: composition, unit, inverse.
ResidualReport functor_suite(const Principal2Bundle& b, const QuasiConnection& c,
                             const StrictConnection& omega, const LazyPath& gamma,
                             const LazyPath& gamma2, int steps = 0);

/// Commuting squares of transport against a connection-preserving bundle
/// morphism F : (b_src, c_src) -> (b_dst, c_dst) carrying omega on b_dst and
/// F*omega on b_src.
ResidualReport naturality_suite(const Principal2Bundle& b_src, const QuasiConnection& c_src,
                                const Principal2Bundle& b_dst, const QuasiConnection& c_dst,
                                const BundleMorphism& f, const StrictConnection& omega_dst,
                                const SampledPath& alpha, int n_samples, std::uint64_t seed);

/// Morphism of base groupoids in chart coordinates.
struct GroupoidMorphism {
  GroupoidPresentation domain;
  std::function<Vec(const Vec&)> F0, F1;
};

struct PullbackBundle {
  Principal2Bundle bundle;
  QuasiConnection connection;
  StrictConnection omega;
};

PullbackBundle pullback_bundle(const GroupoidMorphism& fbase, const Principal2Bundle& b,
                               const QuasiConnection& c, const StrictConnection& omega);

/// Components (i) and (ii) of pullback naturality with eta = pr_2 restricted
/// to fibers, compared in the quotient.
ResidualReport pullback_suite(const GroupoidMorphism& fbase, const Principal2Bundle& b,
                              const QuasiConnection& c, const StrictConnection& omega,
                              const SampledPath& alpha_y, int n_samples, std::uint64_t seed);

struct SmoothnessProbe {
  std::vector<double> us;
  std::vector<Mat> endpoint_frames;  // group factor of the transported probe
  ResidualReport report;             // dd1_max, dd2_max
  std::vector<Mat> dd1, dd2;         // divided differences on the u-grid
};

/// Finite-difference smoothness indicators of u |-> T_(family(u)) at a probe.
SmoothnessProbe smoothness_probe(const Principal2Bundle& b, const QuasiConnection& c,
                                 const StrictConnection& omega,
                                 const std::function<LazyPath(double)>& family,
                                 const std::vector<double>& ugrid, int steps = 0);

/// Equivariance and functoriality residuals of a TorsorMap on samples.
ResidualReport check_torsor_map(const Principal2Bundle& b, const TorsorMap& f, int n_samples,
                                std::uint64_t seed);

}  // namespace hgt

#endif
