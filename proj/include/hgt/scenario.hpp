#ifndef HGT_SCENARIO_HPP
#define HGT_SCENARIO_HPP

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <vector>

#include "hgt/vb.hpp"

namespace hgt {

struct SuiteResult {
  std::string name;
  bool pass = false;
  ResidualReport report;
  std::string details;
};

struct ScenarioReport {
  std::string scenario;
  bool pass = false;
  std::vector<SuiteResult> suites;
  std::uint64_t seed = 0;
  int grid = 128;

  /// Deterministic serialization; floats printed with 17 significant digits.
  std::string to_json() const;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::string suite_filter;  // run only suites with this name when non-empty
  bool verbose = false;
};

// Named builders shared by the scenario runner and the test suites.
std::function<Mat(const Vec&)> build_cocycle(const std::string& id, const CrossedModule& cm,
                                             const GroupoidPresentation& base);
std::function<Mat(const Vec&, const Vec&)> build_potential(const std::string& id,
                                                           const CrossedModule& cm);
PseudoPrincipalBundle build_pseudo(const std::string& id, const CrossedModule& cm,
                                   const GroupoidPresentation& base);

ScenarioReport run_scenario(const nlohmann::json& spec, const RunOptions& opts = {});
ScenarioReport run_scenario_file(const std::string& path, const RunOptions& opts = {});

std::string list_builtins();

}  // namespace hgt

#endif
