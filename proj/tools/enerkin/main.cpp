// enerkin <simulate|solve|analyze|check> --scenario <path> --out <dir> [--seed N] [--replicas N]

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "enerkin/commands.hpp"
#include "enerkin/error.hpp"
#include "enerkin/scenario.hpp"

namespace {

struct Args {
  std::string scenario;
  std::string out = ".";
  std::uint64_t seed = 0;
  int replicas = 0;
};

void add_common(CLI::App* cmd, Args& args) {
  cmd->add_option("--scenario", args.scenario, "Scenario JSON file")->required();
  cmd->add_option("--out", args.out, "Output directory")->required();
  cmd->add_option("--seed", args.seed, "Override the master seed");
  cmd->add_option("--replicas", args.replicas, "Override the replica count")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic kinetics with energy parameters"};
  app.require_subcommand(1);
  Args args;
  auto* simulate = app.add_subcommand("simulate", "Run the particle simulator");
  auto* solve = app.add_subcommand("solve", "Integrate the kinetic equation on a grid");
  auto* analyze = app.add_subcommand("analyze", "Entropy and KS statistics");
  auto* check = app.add_subcommand("check", "Run the scenario's checks and write report.json");
  for (auto* cmd : {simulate, solve, analyze, check}) add_common(cmd, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : enerkin::kExitValidation;
  }

  try {
    const auto scenario = enerkin::load_scenario(args.scenario);
    enerkin::CommandOptions options;
    options.out_dir = args.out;
    if (simulate->count("--seed") || solve->count("--seed") || analyze->count("--seed") ||
        check->count("--seed"))
      options.seed = args.seed;
    if (args.replicas > 0) options.replicas = args.replicas;
    if (*simulate) return enerkin::command_simulate(scenario, options);
    if (*solve) return enerkin::command_solve(scenario, options);
    if (*analyze) return enerkin::command_analyze(scenario, options);
    const int code = enerkin::command_check(scenario, options);
    if (code != 0) std::cerr << R"({"error":{"kind":"checks_failed","message":"see report.json"}})" << '\n';
    return code;
  } catch (const std::exception& e) {
    std::cerr << enerkin::error_json(e).dump() << '\n';
    return enerkin::exit_code_for(e);
  }
}
