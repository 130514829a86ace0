#include "hgt/path.hpp"

#include <algorithm>
#include <cmath>

namespace hgt {

namespace {

// Lagrange basis over up to 5 consecutive grid nodes; u is the query in node units.
void lagrange_weights(double u, int i0, int m, double* w, double* dw) {
  for (int a = 0; a < m; ++a) {
    double prod = 1.0, dsum = 0.0;
    for (int b = 0; b < m; ++b) {
      if (b == a) continue;
      prod *= (u - (i0 + b)) / static_cast<double>(a - b);
    }
    // derivative of the product w.r.t. u
    for (int c = 0; c < m; ++c) {
      if (c == a) continue;
      double term = 1.0 / static_cast<double>(a - c);
      for (int b = 0; b < m; ++b) {
        if (b == a || b == c) continue;
        term *= (u - (i0 + b)) / static_cast<double>(a - b);
      }
      dsum += term;
    }
    w[a] = prod;
    dw[a] = dsum;
  }
}

struct Stencil {
  int i0, m;
};

Stencil stencil_for(double u, int k) {
  int m = std::min(5, k + 1);
  int i0 = static_cast<int>(std::lround(u)) - m / 2;
  i0 = std::clamp(i0, 0, k + 1 - m);
  return {i0, m};
}

}  // namespace

Vec SampledPath::eval(double t) const {
  const int k = grid();
  double u = std::clamp(t, 0.0, 1.0) * k;
  auto [i0, m] = stencil_for(u, k);
  double w[5], dw[5];
  lagrange_weights(u, i0, m, w, dw);
  Vec v = Vec::Zero(dim());
  for (int a = 0; a < m; ++a) v += w[a] * node(i0 + a);
  return v;
}

Vec SampledPath::deriv(double t) const {
  const int k = grid();
  double u = std::clamp(t, 0.0, 1.0) * k;
  auto [i0, m] = stencil_for(u, k);
  double w[5], dw[5];
  lagrange_weights(u, i0, m, w, dw);
  Vec v = Vec::Zero(dim());
  for (int a = 0; a < m; ++a) v += dw[a] * node(i0 + a);
  return v * k;
}

bool SampledPath::is_constant(double tol) const {
  for (int i = 1; i <= grid(); ++i)
    if ((node(i) - node(0)).norm() > tol) return false;
  return true;
}

bool SampledPath::sits(double tol) const {
  if (plateau_len < 1 || grid() < 2 * plateau_len) return false;
  for (int i = 1; i <= plateau_len; ++i) {
    if ((node(i) - node(0)).norm() > tol) return false;
    if ((node(grid() - i) - node(grid())).norm() > tol) return false;
  }
  return true;
}

SampledPath SampledPath::reversed() const {
  SampledPath r;
  r.samples = samples.colwise().reverse();
  r.plateau_len = plateau_len;
  return r;
}

SampledPath SampledPath::mapped(const std::function<Vec(const Vec&)>& f) const {
  SampledPath r;
  Vec first = f(node(0));
  r.samples.resize(samples.rows(), first.size());
  r.samples.row(0) = first.transpose();
  for (int i = 1; i <= grid(); ++i) r.samples.row(i) = f(node(i)).transpose();
  r.plateau_len = plateau_len;
  return r;
}

SampledPath SampledPath::reparametrized(const std::function<double(double)>& phi, int k2) const {
  SampledPath r;
  r.samples.resize(k2 + 1, dim());
  for (int i = 0; i <= k2; ++i) r.samples.row(i) = eval(phi(static_cast<double>(i) / k2)).transpose();
  r.plateau_len = plateau_len;
  return r;
}

SampledPath SampledPath::constant(const Vec& x, int k, int plateau) {
  SampledPath p;
  p.samples = x.transpose().replicate(k + 1, 1);
  p.plateau_len = plateau;
  return p;
}

double smoothstep6(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // S(x) = int_0^x u^6 (1-u)^6 du / B(7,7); first six derivatives vanish at 0 and 1
  static const double c = 12012.0;  // 13! / (6!)^2
  double s = 0.0;
  static const double binom6[7] = {1, 6, 15, 20, 15, 6, 1};
  for (int j = 0; j <= 6; ++j) {
    double sign = (j % 2 == 0) ? 1.0 : -1.0;
    s += sign * binom6[j] * std::pow(x, 7 + j) / (7 + j);
  }
  return c * s;
}

double plateau_warp(double t, double a) {
  if (a <= 0.0) return t;
  if (t <= a) return 0.0;
  if (t >= 1.0 - a) return 1.0;
  return smoothstep6((t - a) / (1.0 - 2.0 * a));
}

SampledPath SampledPath::from_waypoints(const std::vector<Vec>& waypoints, int k, int plateau) {
  if (waypoints.empty()) throw Error(ErrorKind::BuildError, "path needs at least one waypoint");
  if (k < 2 * plateau + 2) throw Error(ErrorKind::BuildError, "grid too coarse for plateau");
  const int d = static_cast<int>(waypoints[0].size());
  const int m = static_cast<int>(waypoints.size()) - 1;
  if (m == 0) return constant(waypoints[0], k, plateau);

  // natural cubic spline through waypoints at parameters 0..m, per dimension
  Eigen::MatrixXd y(m + 1, d);
  for (int i = 0; i <= m; ++i) y.row(i) = waypoints[i].transpose();
  Eigen::MatrixXd m2(m + 1, d);  // second derivatives
  if (m == 1) {
    m2.setZero();
  } else {
    Eigen::MatrixXd rhs = 6.0 * (y.topRows(m - 1) + y.bottomRows(m - 1) - 2.0 * y.middleRows(1, m - 1));
    // tridiagonal (1 4 1) solve, Thomas algorithm
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(m - 1, 4.0);
    for (int i = 1; i < m - 1; ++i) {
      double w = 1.0 / diag[i - 1];
      diag[i] -= w;
      rhs.row(i) -= w * rhs.row(i - 1);
    }
    m2.setZero();
    m2.row(m - 1) = rhs.row(m - 2) / diag[m - 2];
    for (int i = m - 3; i >= 0; --i)
      m2.row(i + 1) = (rhs.row(i) - m2.row(i + 2)) / diag[i];
  }
  auto spline = [&](double s) {
    int seg = std::clamp(static_cast<int>(std::floor(s)), 0, m - 1);
    double u = s - seg;
    Vec a = y.row(seg).transpose(), b = y.row(seg + 1).transpose();
    Vec ma = m2.row(seg).transpose(), mb = m2.row(seg + 1).transpose();
    return Vec(a * (1 - u) + b * u +
               ((1 - u) * ((1 - u) * (1 - u) - 1.0) * ma + u * (u * u - 1.0) * mb) / 6.0);
  };

  SampledPath p;
  p.samples.resize(k + 1, d);
  double a = static_cast<double>(plateau) / k;
  for (int i = 0; i <= k; ++i) {
    double s = plateau_warp(static_cast<double>(i) / k, a) * m;
    p.samples.row(i) = spline(s).transpose();
  }
  p.plateau_len = plateau;
  return p;
}

SampledPath SampledPath::concat(const SampledPath& a, const SampledPath& b, double tol) {
  if ((a.end() - b.start()).norm() > tol)
    throw Error(ErrorKind::EndpointMismatch, "concatenation endpoints do not meet");
  SampledPath r;
  r.samples.resize(a.grid() + b.grid() + 1, a.dim());
  r.samples.topRows(a.grid() + 1) = a.samples;
  r.samples.bottomRows(b.grid()) = b.samples.bottomRows(b.grid());
  r.plateau_len = std::min(a.plateau_len, b.plateau_len);
  return r;
}

LazyPath make_lazy_path(const GroupoidPresentation& gp, std::vector<Vec> arrows,
                        std::vector<SampledPath> paths, double tol) {
  if (arrows.size() != paths.size() + 1)
    throw Error(ErrorKind::BuildError, "lazy path needs n+1 arrows and n paths");
  for (size_t i = 0; i + 1 < arrows.size(); ++i) {
    if ((gp.target(arrows[i]) - paths[i].start()).norm() > tol)
      throw Error(ErrorKind::EndpointMismatch,
                  "t(gamma_" + std::to_string(i) + ") != alpha_" + std::to_string(i + 1) + "(0)");
    if ((gp.source(arrows[i + 1]) - paths[i].end()).norm() > tol)
      throw Error(ErrorKind::EndpointMismatch,
                  "s(gamma_" + std::to_string(i + 1) + ") != alpha_" + std::to_string(i + 1) + "(1)");
  }
  LazyPath g;
  g.arrows = std::move(arrows);
  g.paths = std::move(paths);
  return g;
}

Vec lazy_source(const GroupoidPresentation& gp, const LazyPath& path) {
  return gp.source(path.arrows.front());
}

Vec lazy_target(const GroupoidPresentation& gp, const LazyPath& path) {
  return gp.target(path.arrows.back());
}

LazyPath move_remove_constant(const GroupoidPresentation& gp, const LazyPath& g, int i,
                              double tol) {
  if (i < 0 || i >= g.order()) throw Error(ErrorKind::BuildError, "path index out of range");
  if (!g.paths[i].is_constant(tol))
    throw Error(ErrorKind::NotConstant, "alpha_" + std::to_string(i + 1) + " is not constant");
  LazyPath r;
  for (int j = 0; j <= g.order(); ++j) {
    if (j == i) {
      r.arrows.push_back(gp.compose(g.arrows[i + 1], g.arrows[i]));
    } else if (j != i + 1) {
      r.arrows.push_back(g.arrows[j]);
    }
  }
  for (int j = 0; j < g.order(); ++j)
    if (j != i) r.paths.push_back(g.paths[j]);
  return make_lazy_path(gp, r.arrows, r.paths, 1e-6);
}

LazyPath move_add_constant(const GroupoidPresentation& gp, const LazyPath& g, int i) {
  if (i < 0 || i > g.order()) throw Error(ErrorKind::BuildError, "arrow index out of range");
  int k = g.order() > 0 ? g.paths[0].grid() : 128;
  int plateau = g.order() > 0 ? g.paths[0].plateau_len : 8;
  Vec y = gp.target(g.arrows[i]);
  LazyPath r;
  for (int j = 0; j <= g.order(); ++j) {
    r.arrows.push_back(g.arrows[j]);
    if (j == i) r.arrows.push_back(gp.unit(y));
  }
  for (int j = 0; j < g.order(); ++j) {
    if (j == i) r.paths.push_back(SampledPath::constant(y, k, plateau));
    r.paths.push_back(g.paths[j]);
  }
  if (i == g.order()) r.paths.push_back(SampledPath::constant(y, k, plateau));
  return make_lazy_path(gp, r.arrows, r.paths, 1e-6);
}

LazyPath move_remove_identity(const GroupoidPresentation& gp, const LazyPath& g, int i,
                              double tol) {
  if (i <= 0 || i >= static_cast<int>(g.arrows.size()) - 1)
    throw Error(ErrorKind::BuildError, "can only remove an interior arrow");
  Vec u = gp.unit(gp.source(g.arrows[i]));
  if ((g.arrows[i] - u).norm() > tol)
    throw Error(ErrorKind::NotIdentity, "gamma_" + std::to_string(i) + " is not an identity");
  LazyPath r;
  for (int j = 0; j <= g.order(); ++j)
    if (j != i) r.arrows.push_back(g.arrows[j]);
  for (int j = 0; j < g.order(); ++j) {
    if (j == i - 1) {
      r.paths.push_back(SampledPath::concat(g.paths[i - 1], g.paths[i]));
      ++j;  // consumed both halves
    } else {
      r.paths.push_back(g.paths[j]);
    }
  }
  return make_lazy_path(gp, r.arrows, r.paths, 1e-6);
}

LazyPath move_add_identity(const GroupoidPresentation& gp, const LazyPath& g, int i, double tol) {
  if (i < 0 || i >= g.order()) throw Error(ErrorKind::BuildError, "path index out of range");
  const SampledPath& p = g.paths[i];
  int k = p.grid();
  if (k % 2 != 0) throw Error(ErrorKind::BuildError, "path grid must be even to split");
  int mid = k / 2;
  for (int d = 1; d <= p.plateau_len; ++d)
    if ((p.node(mid - d) - p.node(mid)).norm() > tol ||
        (p.node(mid + d) - p.node(mid)).norm() > tol)
      throw Error(ErrorKind::NotConstant, "path does not sit at its midpoint");
  SampledPath first, second;
  first.samples = p.samples.topRows(mid + 1);
  first.plateau_len = p.plateau_len;
  second.samples = p.samples.bottomRows(k - mid + 1);
  second.plateau_len = p.plateau_len;
  LazyPath r;
  for (int j = 0; j <= g.order(); ++j) {
    r.arrows.push_back(g.arrows[j]);
    if (j == i) r.arrows.push_back(gp.unit(p.node(mid)));
  }
  for (int j = 0; j < g.order(); ++j) {
    if (j == i) {
      r.paths.push_back(first);
      r.paths.push_back(second);
    } else {
      r.paths.push_back(g.paths[j]);
    }
  }
  return make_lazy_path(gp, r.arrows, r.paths, 1e-6);
}

LazyPath move_conjugate(const GroupoidPresentation& gp, const LazyPath& g, int i,
                        const SampledPath& zeta, double tol) {
  if (i < 0 || i >= g.order()) throw Error(ErrorKind::BuildError, "path index out of range");
  const SampledPath& alpha = g.paths[i];
  if (zeta.grid() != alpha.grid())
    throw Error(ErrorKind::BuildError, "zeta must share the path's sample grid");
  if (!zeta.sits(1e-9))
    throw Error(ErrorKind::SourceMismatch, "zeta lacks sitting instants");
  for (int j = 0; j <= zeta.grid(); ++j)
    if ((gp.source(zeta.node(j)) - alpha.node(j)).norm() > tol)
      throw Error(ErrorKind::SourceMismatch, "s(zeta) != alpha at node " + std::to_string(j));
  LazyPath r = g;
  r.arrows[i] = gp.compose(zeta.node(0), g.arrows[i]);
  r.paths[i] = zeta.mapped(gp.target);
  r.arrows[i + 1] = gp.compose(g.arrows[i + 1], gp.inverse(zeta.node(zeta.grid())));
  return make_lazy_path(gp, r.arrows, r.paths, 1e-6);
}

LazyPath thin_deform(const GroupoidPresentation& gp, const LazyPath& g,
                     const std::vector<SampledPath>& zetas, double tol) {
  const int n = g.order();
  if (static_cast<int>(zetas.size()) != n + 1)
    throw Error(ErrorKind::BuildError, "need one zeta per arrow");
  for (int j = 0; j <= n; ++j) {
    if ((zetas[j].node(0) - g.arrows[j]).norm() > tol)
      throw Error(ErrorKind::BoundaryMismatch, "zeta_" + std::to_string(j) + "(0) != gamma_" + std::to_string(j));
    if (!zetas[j].sits(1e-9))
      throw Error(ErrorKind::BoundaryMismatch, "zeta_" + std::to_string(j) + " lacks sitting instants");
  }
  if (!zetas.front().mapped(gp.source).is_constant(tol))
    throw Error(ErrorKind::BoundaryMismatch, "s o zeta_0 must be constant");
  if (!zetas.back().mapped(gp.target).is_constant(tol))
    throw Error(ErrorKind::BoundaryMismatch, "t o zeta_n must be constant");

  LazyPath r;
  for (int j = 0; j <= n; ++j) r.arrows.push_back(zetas[j].node(zetas[j].grid()));
  for (int j = 0; j < n; ++j) {
    SampledPath leg_in = zetas[j].mapped(gp.target).reversed();
    SampledPath leg_out = zetas[j + 1].mapped(gp.source);
    SampledPath p = g.paths[j];
    if (!leg_in.is_constant(tol)) p = SampledPath::concat(leg_in, p);
    if (!leg_out.is_constant(tol)) p = SampledPath::concat(p, leg_out);
    r.paths.push_back(p);
  }
  return make_lazy_path(gp, r.arrows, r.paths, 1e-6);
}

double rank1_certificate(const std::vector<std::vector<Vec>>& grid,
                         const std::function<bool(const Vec&)>& in_chart) {
  const int m = static_cast<int>(grid.size()) - 1;
  const int k = static_cast<int>(grid[0].size()) - 1;
  if (m < 4 || k < 4) throw Error(ErrorKind::BuildError, "homotopy grid too coarse");
  if (in_chart)
    for (const auto& row : grid)
      for (const auto& pt : row)
        if (!in_chart(pt)) throw Error(ErrorKind::OutOfChart, "homotopy grid leaves the chart");
  double worst = 0.0;
  const int d = static_cast<int>(grid[0][0].size());
  // fourth-order stencils keep the truncation error below the certificate scale
  auto d4 = [](const Vec& m2, const Vec& m1, const Vec& p1, const Vec& p2, double h) {
    return Vec((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h));
  };
  for (int i = 2; i + 2 <= m; ++i)
    for (int j = 2; j + 2 <= k; ++j) {
      Mat jac(d, 2);
      jac.col(0) = d4(grid[i - 2][j], grid[i - 1][j], grid[i + 1][j], grid[i + 2][j], 1.0 / m);
      jac.col(1) = d4(grid[i][j - 2], grid[i][j - 1], grid[i][j + 1], grid[i][j + 2], 1.0 / k);
      Eigen::JacobiSVD<Mat> svd(jac);
      worst = std::max(worst, svd.singularValues()[1]);
    }
  return worst;
}

LazyPath lazy_compose(const GroupoidPresentation& gp, const LazyPath& second,
                      const LazyPath& first, double tol) {
  if ((lazy_target(gp, first) - lazy_source(gp, second)).norm() > tol)
    throw Error(ErrorKind::NotComposable, "lazy paths do not chain");
  LazyPath r;
  r.arrows = first.arrows;
  r.arrows.back() = gp.compose(second.arrows.front(), first.arrows.back());
  r.arrows.insert(r.arrows.end(), second.arrows.begin() + 1, second.arrows.end());
  r.paths = first.paths;
  r.paths.insert(r.paths.end(), second.paths.begin(), second.paths.end());
  return r;
}

LazyPath lazy_invert(const GroupoidPresentation& gp, const LazyPath& g) {
  LazyPath r;
  for (auto it = g.arrows.rbegin(); it != g.arrows.rend(); ++it)
    r.arrows.push_back(gp.inverse(*it));
  for (auto it = g.paths.rbegin(); it != g.paths.rend(); ++it) r.paths.push_back(it->reversed());
  return r;
}

LazyPath lazy_unit(const GroupoidPresentation& gp, const Vec& x, int k, int plateau) {
  LazyPath r;
  r.arrows = {gp.unit(x), gp.unit(x)};
  r.paths = {SampledPath::constant(x, k, plateau)};
  return r;
}

}  // namespace hgt
