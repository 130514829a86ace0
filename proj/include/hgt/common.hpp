#ifndef HGT_COMMON_HPP
#define HGT_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hgt {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class ErrorKind {
  NonConvergent,
  NonFiniteState,
  OutOfChart,
  SpanViolation,
  NotComposable,
  NotAnAction,
  GroupMismatch,
  IncoherentData,
  DivisionFailure,
  NotASection,
  EquivarianceFailure,
  HypothesisFailure,
  EndpointMismatch,
  NotConstant,
  NotIdentity,
  SourceMismatch,
  BoundaryMismatch,
  FiberMismatch,
  ProbeDisagreement,
  SchemaError,
  BuildError,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Global source/target matching tolerance (spec'd single knob).
inline constexpr double kTolMatch = 1e-8;

// Deterministic RNG. mt19937_64 with an explicit bits-to-double mapping so
// that streams do not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_bits() {
    // xorshift* -- small, fast, reproducible everywhere
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1Dull;
  }

  double uniform() { return static_cast<double>(next_bits() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int n) { return static_cast<int>(next_bits() % static_cast<std::uint64_t>(n)); }

  Vec uniform_vec(const Vec& lo, const Vec& hi) {
    Vec v(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) v[i] = uniform(lo[i], hi[i]);
    return v;
  }

 private:
  std::uint64_t state_;
};

// Labeled residual collection. Checks report residuals; callers decide pass/fail.
struct ResidualReport {
  std::string name;
  std::vector<std::pair<std::string, double>> entries;

  void add(const std::string& label, double value) { entries.emplace_back(label, value); }

  void add_max(const std::string& label, double value) {
    for (auto& e : entries) {
      if (e.first == label) {
        if (value > e.second) e.second = value;
        return;
      }
    }
    entries.emplace_back(label, value);
  }

  double get(const std::string& label) const {
    for (const auto& e : entries)
      if (e.first == label) return e.second;
    return -1.0;
  }

  double max() const {
    double m = 0.0;
    for (const auto& e : entries)
      if (e.second > m) m = e.second;
    return m;
  }

  bool all_below(double tol) const { return max() < tol; }

  std::string worst_label() const {
    double m = -1.0;
    std::string w;
    for (const auto& e : entries)
      if (e.second > m) {
        m = e.second;
        w = e.first;
      }
    return w;
  }
};

inline double frob(const Mat& m) { return m.norm(); }

}  // namespace hgt

#endif
