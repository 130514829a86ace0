#ifndef HGT_BUNDLE_HPP
#define HGT_BUNDLE_HPP

#include <functional>
#include <optional>
#include <string>

#include "hgt/crossed_module.hpp"
#include "hgt/groupoid.hpp"

namespace hgt {

/// Point of the trivialized total object space E0 = X0 x G.
struct E0Point {
  Vec x;
  Mat g;
};

/// Morphism of the decorated total groupoid in coordinates (gamma, p, h),
/// with gamma in X1, p in E0 over s(gamma), h in H.
struct Bundle2Arrow {
  Vec gamma;
  E0Point p;
  Mat h;
};

/// Principal G-bundle over a Lie groupoid, globally trivialized: E_G = X0 x G
/// with the groupoid action mu(gamma, (x, g)) = (t(gamma), a(gamma) g) for a
/// cocycle a : X1 -> G. When `strict` the cocycle must satisfy a(1_x) = e and
/// a(gamma2 o gamma1) = a(gamma2) a(gamma1); quasi-principal bundles drop both.
struct PrincipalGroupBundle {
  GroupoidPresentation base;
  MatrixGroup G;
  std::function<Mat(const Vec&)> cocycle;

  E0Point mu(const Vec& gamma, const E0Point& p) const {
    return {base.target(gamma), cocycle(gamma) * p.g};
  }
  E0Point act(const E0Point& p, const Mat& g) const { return {p.x, p.g * g}; }

  E0Point sample_point(Rng& rng) const { return {base.sample_obj(rng), G.random_element(rng)}; }
  E0Point sample_point_over(const Vec& x, Rng& rng) const { return {x, G.random_element(rng)}; }
};

/// Max residual of the principal-bundle axioms (unit cocycle, multiplicativity,
/// equivariance) over seeded samples.
ResidualReport check_group_bundle(const PrincipalGroupBundle& pg, int n_samples,
                                  std::uint64_t seed);

/// Pseudo-principal crossed-module bundle: a quasi-principal G-bundle plus the
/// unital/compositional deviations (Hu, Hm), subject to coherence (a)-(k).
struct PseudoPrincipalBundle {
  PrincipalGroupBundle pg;
  CrossedModule cm;
  std::function<Mat(const E0Point&)> Hu;
  std::function<Mat(const Vec&, const Vec&)> Hm;  // (gamma2, gamma1) composable
};

enum class ConnectionClass { Quasi, Unital, Categorical };
const char* connection_class_name(ConnectionClass c);

/// Principal 2-bundle over a Lie groupoid in quasi-decorated coordinates:
/// E0 = X0 x G, E1 = s*E0 x H, with structure maps twisted by (Hu, Hm).
/// Decorated bundles are the special case Hu = Hm = e.
struct Principal2Bundle {
  CrossedModule cm;
  GroupoidPresentation base;
  std::function<Mat(const Vec&)> cocycle;
  std::function<Mat(const E0Point&)> Hu;
  std::function<Mat(const Vec&, const Vec&)> Hm;

  E0Point mu(const Vec& gamma, const E0Point& p) const {
    return {base.target(gamma), cocycle(gamma) * p.g};
  }

  E0Point src(const Bundle2Arrow& d) const { return d.p; }
  E0Point tgt(const Bundle2Arrow& d) const;
  Bundle2Arrow unit(const E0Point& p) const;
  Bundle2Arrow compose(const Bundle2Arrow& d2, const Bundle2Arrow& d1,
                       double tol = kTolMatch) const;
  Bundle2Arrow inverse(const Bundle2Arrow& d) const;

  Vec proj0(const E0Point& p) const { return p.x; }
  Vec proj1(const Bundle2Arrow& d) const { return d.gamma; }

  E0Point act0(const E0Point& p, const Mat& g) const { return {p.x, p.g * g}; }
  Bundle2Arrow act1(const Bundle2Arrow& d, const TwoGroupArrow& a) const;

  /// Torsor division: the unique g with p g = q (p, q in one fiber).
  Mat divide0(const E0Point& p, const E0Point& q, double tol = kTolMatch) const;
  /// The unique (h, g) with d (h, g) = e (d, e over the same gamma).
  TwoGroupArrow divide1(const Bundle2Arrow& d, const Bundle2Arrow& e,
                        double tol = kTolMatch) const;

  E0Point sample_point(Rng& rng) const { return {base.sample_obj(rng), cm.G.random_element(rng)}; }
  Bundle2Arrow sample_arrow(Rng& rng) const;

  double point_distance(const E0Point& p, const E0Point& q) const {
    return std::sqrt((p.x - q.x).squaredNorm() + (p.g - q.g).squaredNorm());
  }
  double arrow_distance(const Bundle2Arrow& a, const Bundle2Arrow& b) const {
    return std::sqrt((a.gamma - b.gamma).squaredNorm() + (a.p.x - b.p.x).squaredNorm() +
                     (a.p.g - b.p.g).squaredNorm() + (a.h - b.h).squaredNorm());
  }
};

/// Quasi connection in decorated coordinates: C(gamma, p) = (gamma, p, c(gamma, p)).
/// Equivariance along units requires c(gamma, p g) = alpha_{g^-1}(c(gamma, p)).
struct QuasiConnection {
  std::function<Mat(const Vec&, const E0Point&)> c;
  ConnectionClass cls = ConnectionClass::Quasi;

  Bundle2Arrow lift(const Vec& gamma, const E0Point& p) const { return {gamma, p, c(gamma, p)}; }
  E0Point mu_C(const Principal2Bundle& b, const Vec& gamma, const E0Point& p) const {
    return b.tgt(lift(gamma, p));
  }
};

struct DecoratedBundle {
  Principal2Bundle bundle;
  QuasiConnection connection;
};

/// Decorated construction: principal G-bundle + crossed module with the same G.
DecoratedBundle decorate(const PrincipalGroupBundle& pg, const CrossedModule& cm);

/// Quasi-decorated construction; throws IncoherentData naming the first failing
/// coherence label if check_coherence(pb) does not pass at `tol`.
DecoratedBundle quasi_decorate(const PseudoPrincipalBundle& pb, double tol = 1e-9,
                               int n_samples = 100, std::uint64_t seed = 7);

/// Coherence properties (a)-(k) of the deviations, evaluated on sampled
/// composable data built through the base groupoid's compose.
ResidualReport check_coherence(const PseudoPrincipalBundle& pb, int n_samples,
                               std::uint64_t seed);

/// Recover the pseudo-principal data (mu_C = t o C, Hu, Hm) from a quasi
/// connection by torsor division in H x| G.
PseudoPrincipalBundle extract_pseudo(const Principal2Bundle& b, const QuasiConnection& c,
                                     double tol = 1e-6);

struct ClassifyResult {
  ConnectionClass cls;
  ResidualReport report;  // labels "section", "unital", "categorical"
};

ClassifyResult classify_connection(const Principal2Bundle& b, const QuasiConnection& c,
                                   int n_samples, std::uint64_t seed, double tol = 1e-8);

/// C_H(gamma, p) = C(gamma, p) (H(gamma, p), e); requires the equivariance
/// hypothesis alpha_g(H(gamma, p g)) = H(gamma, p) on samples.
QuasiConnection make_Ch(const Principal2Bundle& b, const QuasiConnection& c,
                        const std::function<Mat(const Vec&, const E0Point&)>& hmap,
                        int n_samples = 50, std::uint64_t seed = 11, double tol = 1e-8);

/// Morphism of principal 2-bundles in trivialized coordinates.
struct BundleMorphism {
  std::function<E0Point(const E0Point&)> F0;
  std::function<Bundle2Arrow(const Bundle2Arrow&)> F1;
};

BundleMorphism identity_morphism();

/// Residuals: functoriality, equivariance, projection, connection intertwining.
ResidualReport bundle_morphism_check(const BundleMorphism& f, const Principal2Bundle& b,
                                     const Principal2Bundle& bprime, const QuasiConnection& c,
                                     const QuasiConnection& cprime, int n_samples,
                                     std::uint64_t seed);

struct GrothendieckRoundtrip {
  PseudoPrincipalBundle extracted;
  DecoratedBundle rebuilt;
  BundleMorphism theta;   // rebuilt -> original
  ResidualReport report;  // theta residuals + pseudo-data recovery residuals
};

GrothendieckRoundtrip grothendieck_roundtrip(const Principal2Bundle& b, const QuasiConnection& c,
                                             int n_samples, std::uint64_t seed);

/// Decorated-groupoid axiom residuals (associativity, units, inverses,
/// projection functoriality, action compatibility) on sampled triples.
ResidualReport check_bundle_axioms(const Principal2Bundle& b, int n_samples, std::uint64_t seed);

}  // namespace hgt

#endif
