#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "hgt/scenario.hpp"

namespace {

int exit_code_for(const hgt::Error& e) {
  switch (e.kind()) {
    case hgt::ErrorKind::SchemaError: return 2;
    default: return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"higher gauge transport scenario runner"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, suite_filter;
  std::uint64_t seed = 0;
  int grid = 0;
  bool have_seed = false, have_grid = false, verbose = false;

  CLI::App* run = app.add_subcommand("run", "run a scenario file and write a report");
  run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_path, "report output path (default: stdout)");
  run->add_option("--seed", seed, "override the scenario seed")->each([&](const std::string&) {
    have_seed = true;
  });
  run->add_option("--grid", grid, "override the default path grid")->each([&](const std::string&) {
    have_grid = true;
  });
  run->add_option("--suite", suite_filter, "run only suites with this name");
  run->add_flag("--verbose", verbose, "print one line per suite");

  CLI::App* list = app.add_subcommand("list-builtins", "list registered builtin objects");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    std::cout << hgt::list_builtins();
    return 0;
  }

  try {
    hgt::RunOptions opts;
    if (have_seed) opts.seed = seed;
    if (have_grid) opts.grid = grid;
    opts.suite_filter = suite_filter;
    opts.verbose = verbose;
    hgt::ScenarioReport rep = hgt::run_scenario_file(scenario_path, opts);

    if (verbose)
      for (const auto& s : rep.suites)
        std::cerr << (s.pass ? "[PASS] " : "[FAIL] ") << s.name << "  worst "
                  << s.report.worst_label() << " = " << s.report.max()
                  << (s.details.empty() ? "" : "  (" + s.details + ")") << "\n";

    std::string text = rep.to_json();
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path);
      out << text;
    }
    std::cerr << "scenario " << rep.scenario << ": " << (rep.pass ? "PASS" : "FAIL") << "\n";
    return rep.pass ? 0 : 1;
  } catch (const hgt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
