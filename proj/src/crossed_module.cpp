#include "hgt/crossed_module.hpp"

#include <cmath>

namespace hgt {

Mat arrow_source(const CrossedModule&, const TwoGroupArrow& a) { return a.g; }

Mat arrow_target(const CrossedModule& cm, const TwoGroupArrow& a) { return cm.tau(a.h) * a.g; }

TwoGroupArrow arrow_unit(const CrossedModule& cm, const Mat& g) {
  return {cm.H.identity(), g};
}

TwoGroupArrow arrow_compose(const CrossedModule& cm, const TwoGroupArrow& a2,
                            const TwoGroupArrow& a1, double tol) {
  double mismatch = (arrow_source(cm, a2) - arrow_target(cm, a1)).norm();
  if (mismatch > tol)
    throw Error(ErrorKind::NotComposable,
                "source/target mismatch " + std::to_string(mismatch) + " in 2-group composition");
  return {a2.h * a1.h, a1.g};
}

TwoGroupArrow arrow_inverse(const CrossedModule& cm, const TwoGroupArrow& a) {
  return {a.h.inverse(), cm.tau(a.h) * a.g};
}

TwoGroupArrow arrow_tensor(const CrossedModule& cm, const TwoGroupArrow& a2,
                           const TwoGroupArrow& a1) {
  return {a2.h * cm.alpha(a2.g, a1.h), a2.g * a1.g};
}

TwoGroupArrow tensor_inverse(const CrossedModule& cm, const TwoGroupArrow& a) {
  Mat gi = a.g.inverse();
  return {cm.alpha(gi, a.h.inverse()), gi};
}

ResidualReport check_peiffer(const CrossedModule& cm, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw Error(ErrorKind::BuildError, "check_peiffer needs n_samples >= 1");
  Rng rng(seed);
  ResidualReport rep;
  rep.name = "peiffer:" + cm.name;
  rep.add("tau_hom", 0.0);
  rep.add("peiffer1", 0.0);
  rep.add("peiffer2", 0.0);
  rep.add("alpha_hom", 0.0);
  rep.add("tauH_image", 0.0);
  for (int i = 0; i < n_samples; ++i) {
    Mat g = cm.G.random_element(rng);
    Mat h1 = cm.H.random_element(rng);
    Mat h2 = cm.H.random_element(rng);
    rep.add_max("tau_hom", (cm.tau(h1 * h2) - cm.tau(h1) * cm.tau(h2)).norm());
    rep.add_max("peiffer1", (cm.tau(cm.alpha(g, h1)) - g * cm.tau(h1) * g.inverse()).norm());
    rep.add_max("peiffer2", (cm.alpha(cm.tau(h1), h2) - h1 * h2 * h1.inverse()).norm());
    rep.add_max("alpha_hom", (cm.alpha(g, h1 * h2) - cm.alpha(g, h1) * cm.alpha(g, h2)).norm());
    rep.add_max("tauH_image", cm.tauH_distance(cm.tau(h1)));
  }
  return rep;
}

CrossedModule make_cm_conjugation(const MatrixGroup& g, const std::string& name) {
  CrossedModule cm;
  cm.name = name.empty() ? "conj:" + g.name : name;
  cm.G = g;
  cm.H = g;
  cm.tau = [](const Mat& h) { return h; };
  cm.alpha = [](const Mat& a, const Mat& h) { return Mat(a * h * a.inverse()); };
  cm.tauH_distance = [](const Mat&) { return 0.0; };  // tau(H) = G
  return cm;
}

CrossedModule make_cm1() {
  CrossedModule cm = make_cm_conjugation(make_so2(), "CM1");
  return cm;
}

CrossedModule make_cm2() {
  CrossedModule cm;
  cm.name = "CM2";
  cm.G = make_trivial();
  cm.H = make_translation(1);
  cm.tau = [G = cm.G](const Mat&) { return G.identity(); };
  cm.alpha = [](const Mat&, const Mat& h) { return h; };
  cm.tauH_distance = [G = cm.G](const Mat& g) { return (g - G.identity()).norm(); };
  return cm;
}

CrossedModule make_cm3() {
  CrossedModule cm;
  cm.name = "CM3";
  cm.G = make_so2();
  cm.H = make_translation(1);
  cm.tau = [](const Mat& h) { return rot2(h(0, 1)); };
  cm.alpha = [](const Mat&, const Mat& h) { return h; };
  cm.tauH_distance = [](const Mat&) { return 0.0; };  // tau is onto SO(2)
  return cm;
}

CrossedModule make_cm4() {
  CrossedModule cm;
  cm.name = "CM4";
  cm.G = make_translation(2);
  cm.H = make_translation(1);
  cm.tau = [](const Mat& h) {
    Mat g = Mat::Identity(3, 3);
    g(0, 2) = h(0, 1);
    return g;
  };
  cm.alpha = [](const Mat&, const Mat& h) { return h; };
  // tau(H) is the x-axis of translations; distance is the y-displacement
  cm.tauH_distance = [](const Mat& g) { return std::abs(g(1, 2)); };
  return cm;
}

CrossedModule make_cm_discrete(const MatrixGroup& g) {
  CrossedModule cm;
  cm.name = "discrete:" + g.name;
  cm.G = g;
  cm.H = make_trivial();
  cm.tau = [G = cm.G](const Mat&) { return G.identity(); };
  cm.alpha = [H = cm.H](const Mat&, const Mat&) { return H.identity(); };
  cm.tauH_distance = [G = cm.G](const Mat& a) { return (a - G.identity()).norm(); };
  return cm;
}

CrossedModule crossed_module_by_name(const std::string& id) {
  if (id == "CM1") return make_cm1();
  if (id == "twisted:SO2") {
    // deliberately corrupted action; a counterexample that fails Peiffer 1
    CrossedModule cm = make_cm1();
    cm.name = "twisted:SO2";
    cm.alpha = [](const Mat& g, const Mat& h) { return Mat(g * h * g.inverse() * rot2(0.5)); };
    return cm;
  }
  if (id == "CM2") return make_cm2();
  if (id == "CM3") return make_cm3();
  if (id == "CM4") return make_cm4();
  if (id.rfind("conj:", 0) == 0) return make_cm_conjugation(group_by_name(id.substr(5)));
  if (id.rfind("discrete:", 0) == 0) return make_cm_discrete(group_by_name(id.substr(9)));
  throw Error(ErrorKind::BuildError, "unknown crossed module: " + id);
}

}  // namespace hgt
