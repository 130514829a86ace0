#include "hgt/connection.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace hgt {

Mat alpha_velocity(const CrossedModule& cm, const Mat& xi, const Mat& h, double step) {
  Mat fwd = cm.alpha(Mat((step * xi).exp()), h);
  Mat bwd = cm.alpha(Mat((-step * xi).exp()), h);
  return (fwd - bwd) / (2.0 * step);
}

Mat alpha_differential(const CrossedModule& cm, const Mat& g, const Mat& xiH, double step) {
  Mat fwd = cm.alpha(g, Mat((step * xiH).exp()));
  Mat bwd = cm.alpha(g, Mat((-step * xiH).exp()));
  return (fwd - bwd) / (2.0 * step);
}

Mat tau_differential(const CrossedModule& cm, const Mat& xiH, double step) {
  Mat fwd = cm.tau(Mat((step * xiH).exp()));
  Mat bwd = cm.tau(Mat((-step * xiH).exp()));
  return (fwd - bwd) / (2.0 * step);
}

AlgArrow ad_2group(const CrossedModule& cm, const Mat& h, const Mat& g, const AlgArrow& xi,
                   double step) {
  Mat ad_g = g * xi.xG * g.inverse();
  Mat hi = h.inverse();
  Mat xh = h * alpha_differential(cm, g, xi.xH, step) * hi + h * alpha_velocity(cm, ad_g, hi, step);
  return {xh, ad_g};
}

Mat StrictConnection::omega0(const E0Tangent& v) const {
  Mat gi = v.p.g.inverse();
  return gi * A0(v.p.x, v.vx) * v.p.g + gi * v.vg;
}

AlgArrow StrictConnection::omega1(const E1Tangent& v) const {
  Mat xg = omega0({v.d.p, v.vx, v.vg});
  Mat hi = v.d.h.inverse();
  // ad_{(h,e)} of the source pullback minus the (right) Maurer-Cartan term on H
  Mat xh = -alpha_velocity(owner.cm, xg, v.d.h, fd_step) * hi - v.vh * hi;
  return {xh, xg};
}

StrictConnection trivial_connection(const Principal2Bundle& b,
                                    const std::function<Mat(const Vec&, const Vec&)>& a0) {
  StrictConnection w;
  w.owner = b;
  w.A0 = a0;
  // spot-check that A0 lands in the algebra span
  Rng rng(3);
  for (int i = 0; i < 8; ++i) {
    Vec x = b.base.sample_obj(rng);
    Vec vx = Vec::Zero(x.size());
    for (Eigen::Index j = 0; j < vx.size(); ++j) vx[j] = rng.uniform(-1.0, 1.0);
    auto [c, res] = b.cm.G.span_coords(a0(x, vx));
    (void)c;
    if (res > 1e-9 * std::max(1.0, a0(x, vx).norm()))
      throw Error(ErrorKind::SpanViolation, "A0 does not take values in L(G)");
  }
  return w;
}

double pullback_hypothesis_residual(const PrincipalGroupBundle& pg,
                                    const std::function<Mat(const Vec&, const Vec&)>& a0,
                                    int n_samples, std::uint64_t seed) {
  Rng rng(seed);
  const double eps = 1e-5;
  double worst = 0.0;
  StrictConnection w;  // evaluator for omega0 only
  w.owner.cm.G = pg.G;
  w.A0 = a0;
  for (int i = 0; i < n_samples; ++i) {
    Vec free = pg.base.sample_free(rng);
    Vec x = pg.base.sample_obj(rng);
    Mat g = pg.G.random_element(rng);
    Vec vfree(free.size());
    for (Eigen::Index j = 0; j < vfree.size(); ++j) vfree[j] = rng.uniform(-1.0, 1.0);
    Vec vx(x.size());
    for (Eigen::Index j = 0; j < vx.size(); ++j) vx[j] = rng.uniform(-1.0, 1.0);
    Mat xi = pg.G.random_algebra(rng).m;

    // curve in s*E_G: gamma(s) through the free coordinates, p(s) over s(gamma(s))
    auto gamma_at = [&](double s) { return pg.base.mor_from_free(free + s * vfree, x + s * vx); };
    auto p_at = [&](double s) {
      return E0Point{pg.base.source(gamma_at(s)), Mat(g * (s * xi).exp())};
    };
    // source leg: omega0 at p(0) on the curve's velocity
    E0Point p0 = p_at(0.0);
    Vec vxs = (p_at(eps).x - p_at(-eps).x) / (2 * eps);
    Mat vgs = (p_at(eps).g - p_at(-eps).g) / (2 * eps);
    Mat lhs = w.omega0({p0, vxs, vgs});
    // target leg: omega0 at mu(gamma, p) on the pushed velocity
    auto q_at = [&](double s) { return pg.mu(gamma_at(s), p_at(s)); };
    E0Point q0 = q_at(0.0);
    Vec vxt = (q_at(eps).x - q_at(-eps).x) / (2 * eps);
    Mat vgt = (q_at(eps).g - q_at(-eps).g) / (2 * eps);
    Mat rhs = w.omega0({q0, vxt, vgt});
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

StrictConnection decorated_connection(const PrincipalGroupBundle& pg, const CrossedModule& cm,
                                      const std::function<Mat(const Vec&, const Vec&)>& a0,
                                      double tol, int n_samples, std::uint64_t seed) {
  double res = pullback_hypothesis_residual(pg, a0, n_samples, seed);
  if (res > tol)
    throw Error(ErrorKind::HypothesisFailure,
                "s*omega != t*omega, residual " + std::to_string(res));
  return trivial_connection(decorate(pg, cm).bundle, a0);
}

StrictConnection pullback_connection(const BundleMorphism& f, const StrictConnection& omega,
                                     const Principal2Bundle& source_bundle) {
  StrictConnection w;
  w.owner = source_bundle;
  double eps = omega.fd_step;
  w.A0 = [f, omega, e = source_bundle.cm.G.identity(), eps](const Vec& x, const Vec& vx) {
    auto curve = [&](double s) { return f.F0(E0Point{x + s * vx, e}); };
    E0Point q = curve(0.0);
    Vec vq = (curve(eps).x - curve(-eps).x) / (2 * eps);
    Mat vg = (curve(eps).g - curve(-eps).g) / (2 * eps);
    return omega.omega0({q, vq, vg});
  };
  return w;
}

namespace {

struct E1Curve {
  std::function<Bundle2Arrow(double)> at;
  E1Tangent tangent(double eps) const {
    Bundle2Arrow d0 = at(0.0), fw = at(eps), bw = at(-eps);
    return {d0, (fw.gamma - bw.gamma) / (2 * eps), (fw.p.x - bw.p.x) / (2 * eps),
            (fw.p.g - bw.p.g) / (2 * eps), (fw.h - bw.h) / (2 * eps)};
  }
};

E0Tangent e0_tangent(const std::function<E0Point(double)>& c, double eps) {
  E0Point p0 = c(0.0), fw = c(eps), bw = c(-eps);
  return {p0, (fw.x - bw.x) / (2 * eps), (fw.g - bw.g) / (2 * eps)};
}

}  // namespace

ResidualReport validate_strict(const StrictConnection& w, int n_samples, std::uint64_t seed) {
  Rng rng(seed);
  const Principal2Bundle& b = w.owner;
  const double eps = w.fd_step;
  ResidualReport rep;
  rep.name = "strict_connection";
  for (const char* l : {"vertical0", "vertical1", "equivariance0", "equivariance1", "source",
                        "target", "unit", "composition"})
    rep.add(l, 0.0);

  for (int i = 0; i < n_samples; ++i) {
    Vec x = b.base.sample_obj(rng);
    Mat g = b.cm.G.random_element(rng);
    Mat h = b.cm.H.random_element(rng);
    Vec g1 = b.base.sample_mor_from(x, rng);
    E0Point p{x, g};
    Bundle2Arrow d{g1, p, h};

    // random curve data
    Vec vx(x.size());
    for (Eigen::Index j = 0; j < vx.size(); ++j) vx[j] = rng.uniform(-1.0, 1.0);
    Vec vfree = Vec::Zero(b.base.free_dim);
    for (Eigen::Index j = 0; j < vfree.size(); ++j) vfree[j] = rng.uniform(-1.0, 1.0);
    Mat xg = b.cm.G.random_algebra(rng).m;
    Mat xh = b.cm.H.random_algebra(rng).m;
    Vec free0 = b.base.sample_free(rng);

    auto gamma_at = [&](double s) { return b.base.mor_from_free(free0 + s * vfree, x + s * vx); };
    E1Curve dc{[&](double s) {
      return Bundle2Arrow{gamma_at(s),
                          {b.base.source(gamma_at(s)), Mat(g * (s * xg).exp())},
                          Mat(h * (s * xh).exp())};
    }};
    E1Tangent v1 = dc.tangent(eps);

    // vertical normalization on E0: omega0 of the fundamental field is xi
    Mat xi = b.cm.G.random_algebra(rng).m;
    rep.add_max("vertical0", (w.omega0({p, Vec::Zero(x.size()), Mat(g * xi)}) - xi).norm());

    // vertical normalization on E1
    Mat xiH = b.cm.H.random_algebra(rng).m;
    E1Curve vert{[&](double s) {
      return b.act1(d, TwoGroupArrow{Mat((s * xiH).exp()), Mat((s * xi).exp())});
    }};
    AlgArrow wv = w.omega1(vert.tangent(eps));
    rep.add_max("vertical1", (wv.xH - xiH).norm() + (wv.xG - xi).norm());

    // G0-equivariance of omega0
    Mat g0 = b.cm.G.random_element(rng);
    auto pc = [&](double s) { return E0Point{x + s * vx, Mat(g * (s * xg).exp())}; };
    E0Tangent v0 = e0_tangent(pc, eps);
    E0Tangent v0g = e0_tangent([&](double s) { return b.act0(pc(s), g0); }, eps);
    rep.add_max("equivariance0",
                (w.omega0(v0g) - Mat(g0.inverse() * w.omega0(v0) * g0)).norm());

    // G1-equivariance of omega1
    Mat h0 = b.cm.H.random_element(rng);
    TwoGroupArrow k{h0, g0};
    E1Curve dk{[&](double s) { return b.act1(dc.at(s), k); }};
    AlgArrow lhs = w.omega1(dk.tangent(eps));
    TwoGroupArrow ki = tensor_inverse(b.cm, k);
    AlgArrow rhs = ad_2group(b.cm, ki.h, ki.g, w.omega1(v1), eps);
    rep.add_max("equivariance1", (lhs.xH - rhs.xH).norm() + (lhs.xG - rhs.xG).norm());

    // functoriality: source
    AlgArrow w1 = w.omega1(v1);
    rep.add_max("source", (w1.xG - w.omega0({d.p, v1.vx, v1.vg})).norm());

    // functoriality: target
    E0Tangent tv = e0_tangent([&](double s) { return b.tgt(dc.at(s)); }, eps);
    Mat tgt_alg = tau_differential(b.cm, w1.xH, eps) + w1.xG;
    rep.add_max("target", (w.omega0(tv) - tgt_alg).norm());

    // functoriality: unit
    E1Curve uc{[&](double s) { return b.unit(pc(s)); }};
    AlgArrow wu = w.omega1(uc.tangent(eps));
    Mat w0 = w.omega0(v0);
    rep.add_max("unit", (wu.xH).norm() + (wu.xG - w0).norm());

    // functoriality: composition (composable curve pair)
    Vec free2 = b.base.sample_free(rng);
    Vec vfree2 = Vec::Zero(b.base.free_dim);
    for (Eigen::Index j = 0; j < vfree2.size(); ++j) vfree2[j] = rng.uniform(-1.0, 1.0);
    Mat xh2 = b.cm.H.random_algebra(rng).m;
    Mat h2 = b.cm.H.random_element(rng);
    auto d2_at = [&](double s) {
      E0Point p2 = b.tgt(dc.at(s));
      Vec gamma2 = b.base.mor_from_free(free2 + s * vfree2, p2.x);
      return Bundle2Arrow{gamma2, p2, Mat(h2 * (s * xh2).exp())};
    };
    E1Curve cc{[&](double s) { return b.compose(d2_at(s), dc.at(s), 1e-6); }};
    AlgArrow wc = w.omega1(cc.tangent(eps));
    AlgArrow w2 = w.omega1(E1Curve{d2_at}.tangent(eps));
    rep.add_max("composition", (wc.xH - (w2.xH + w1.xH)).norm() + (wc.xG - w1.xG).norm());
  }
  return rep;
}

}  // namespace hgt
