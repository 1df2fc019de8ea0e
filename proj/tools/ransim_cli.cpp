#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ransim/scenario.h"
#include "ransim/sim_harness.h"

namespace {

// 0 success, 1 invariant violation, 2 input error
int exit_code_for(const ransim::SimError& error) {
  return error.code() == ransim::ErrorCode::RuntimeInvariantViolation ? 1 : 2;
}

std::string scenario_dir(const std::string& path) {
  std::filesystem::path p(path);
  auto parent = p.parent_path();
  return parent.empty() ? std::string(".") : parent.string();
}

int cmd_validate(const std::string& scenario_path) {
  try {
    ransim::Scenario scenario = ransim::parse_scenario_file(scenario_path);
    ransim::RunOptions options;
    options.seed_explicit = true; // validation does not draw jitter
    options.trace_dir = scenario_dir(scenario_path);
    ransim::validate_scenario(scenario, options);
  } catch (const ransim::SimError& error) {
    std::cerr << "invalid: " << error.what() << "\n";
    return 2;
  }
  std::cout << "ok\n";
  return 0;
}

int cmd_run(const std::string& scenario_path, std::uint64_t seed, bool seed_explicit,
            const std::string& out_dir) {
  try {
    ransim::Scenario scenario = ransim::parse_scenario_file(scenario_path);
    ransim::RunOptions options;
    options.seed = seed;
    options.seed_explicit = seed_explicit;
    options.trace_dir = scenario_dir(scenario_path);
    ransim::RunArtifacts artifacts = ransim::run_scenario(scenario, options);
    if (!out_dir.empty()) {
      ransim::write_artifacts(artifacts, out_dir);
    }
    std::cout << artifacts.summary_text;
  } catch (const ransim::SimError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return exit_code_for(error);
  }
  return 0;
}

int cmd_report(const std::string& dir) {
  std::ifstream summary(dir + "/summary.txt");
  if (!summary) {
    std::cerr << "error: no summary.txt under " << dir << "\n";
    return 2;
  }
  std::cout << summary.rdbuf();
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"RAN broadcast/multicast area simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  std::uint64_t seed = 0;

  CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", scenario_path, "scenario file")->required();

  CLI::App* run = app.add_subcommand("run", "run a scenario deterministically");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  CLI::Option* seed_opt = run->add_option("--seed", seed, "rng seed (required for jitter)");
  run->add_option("--out", out_dir, "directory for run artifacts");

  std::string report_dir;
  CLI::App* report = app.add_subcommand("report", "print the summary of a finished run");
  report->add_option("dir", report_dir, "artifact directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(scenario_path);
  if (run->parsed()) return cmd_run(scenario_path, seed, seed_opt->count() > 0, out_dir);
  if (report->parsed()) return cmd_report(report_dir);
  return 2;
}
