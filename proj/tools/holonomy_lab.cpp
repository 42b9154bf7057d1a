#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "holo/cli/runner.hpp"

int main(int argc, char** argv) {
  using namespace holo::cli;
  CLI::App app{"Parallel transport, holonomy and Wilson loop laboratory"};
  app.require_subcommand(1);

  RunOptions options;
  double step = 0.0;
  int order = 0;
  std::uint64_t seed = 0;
  int jobs = 0;

  for (const auto& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " checks");
    sub->add_option("--scenario", options.scenario_path, "scenario JSON file")->required();
    sub->add_option("--out", options.out_dir, "output directory")->capture_default_str();
    sub->add_option("--step", step, "integrator step")->check(CLI::PositiveNumber);
    sub->add_option("--order", order, "series order")->check(CLI::Range(0, 8));
    sub->add_flag("--oracle", options.oracle, "compare the series against the shifted-connection oracle");
    sub->add_option("--seed", seed, "override the scenario seed");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->callback([&options, name] { options.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  const CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--step")) options.step = step;
  if (sub->count("--order")) options.order = order;
  if (sub->count("--seed")) options.seed = seed;
  if (sub->count("--jobs")) {
    options.jobs = jobs;
  } else if (const char* env = std::getenv("HOLONOMY_LAB_JOBS")) {
    try {
      options.jobs = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      std::cerr << "error: HOLONOMY_LAB_JOBS must be a positive integer\n";
      return kExitValidation;
    }
  }
  return run(options, std::cerr);
}
