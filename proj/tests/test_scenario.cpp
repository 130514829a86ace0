#include <doctest.h>

#include <nlohmann/json.hpp>

#include "hgt/scenario.hpp"

using namespace hgt;
using nlohmann::json;

TEST_CASE("list-builtins is stable and complete") {
  std::string text = list_builtins();
  for (const char* needle :
       {"CM1", "CM2", "CM3", "CM4", "pair", "discrete", "action:SO2", "SO2", "SO3", "R^n",
        "trivial", "zero", "constant:<c>", "defining", "adjoint"})
    CHECK(text.find(needle) != std::string::npos);
  CHECK(text == list_builtins());  // deterministic
}

TEST_CASE("minimal scenario runs and reports") {
  json spec = {
      {"schema", 1},
      {"name", "mini"},
      {"seed", 9},
      {"crossed_module", "CM1"},
      {"base", {{"kind", "pair"}, {"n", 2}, {"half_width", 2.0}}},
      {"bundle", {{"construction", "decorate"}, {"cocycle", "gauge:0.5"}}},
      {"checks", json::array({{{"suite", "peiffer"}},
                              {{"suite", "groupoid_axioms"}},
                              {{"suite", "bundle_axioms"}},
                              {{"suite", "classify"}, {"expect", "categorical"}}})},
  };
  ScenarioReport rep = run_scenario(spec);
  CHECK(rep.pass);
  CHECK(rep.suites.size() == 4);
  std::string text = rep.to_json();
  CHECK(text.find("\"pass\": true") != std::string::npos);
  CHECK(text == run_scenario(spec).to_json());  // reproducible byte for byte

  // seed override changes the report deterministically
  RunOptions opts;
  opts.seed = 10;
  ScenarioReport rep2 = run_scenario(spec, opts);
  CHECK(rep2.seed == 10);

  // suite filter keeps per-suite seeds, so the filtered numbers match the full run
  RunOptions filt;
  filt.suite_filter = "bundle_axioms";
  ScenarioReport only = run_scenario(spec, filt);
  REQUIRE(only.suites.size() == 1);
  for (const auto& s : rep.suites)
    if (s.name == "bundle_axioms")
      CHECK(s.report.entries == only.suites[0].report.entries);
}

TEST_CASE("schema violations are rejected") {
  json bad = {{"schema", 1}, {"name", "x"}, {"unknown_key", 3}};
  CHECK_THROWS_AS((void)run_scenario(bad), Error);
  try {
    (void)run_scenario(bad);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaError);
  }

  json nover = {{"name", "x"}};
  CHECK_THROWS_AS((void)run_scenario(nover), Error);
}

TEST_CASE("missing registry names are build errors") {
  json spec = {{"schema", 1}, {"crossed_module", "CM9"}};
  try {
    (void)run_scenario(spec);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BuildError);
  }
}

TEST_CASE("failing suites fail the scenario") {
  json spec = {
      {"schema", 1},
      {"name", "corrupted"},
      {"crossed_module", "CM2"},
      {"base", {{"kind", "pair"}, {"n", 2}, {"half_width", 2.0}}},
      {"checks",
       json::array({{{"suite", "coherence"}, {"pseudo", "assoc_break"}, {"tol", 1e-9}}})},
  };
  ScenarioReport rep = run_scenario(spec);
  CHECK_FALSE(rep.pass);
  CHECK(rep.suites[0].details.find("(j)") != std::string::npos);
}
