#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "enerkin/analysis.hpp"
#include "enerkin/scenario.hpp"

namespace enerkin {

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> replicas;
};

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitChecksFailed = 1,
  kExitValidation = 2,
  kExitNumerical = 3,
  kExitIo = 4,
  kExitInternal = 5,
};

/// replica_XXX/snapshot_XXXX.csv, replica_XXX/histogram.csv, summary.json.
int command_simulate(const Scenario& scenario, const CommandOptions& options);
/// grid_XXXX.csv, summary.csv (time, mass, mean energy), summary.json.
int command_solve(const Scenario& scenario, const CommandOptions& options);
/// entropy.csv (solver run against the reference law) and ks.csv
/// (simulated snapshots against the reference law).
int command_analyze(const Scenario& scenario, const CommandOptions& options);
/// report.json; kExitOk iff every requested check passes.
int command_check(const Scenario& scenario, const CommandOptions& options);

std::vector<CheckResult> run_checks(const Scenario& scenario, const CommandOptions& options);

/// Scenario with the seed / replica overrides applied.
Scenario apply_overrides(Scenario scenario, const CommandOptions& options);

int exit_code_for(const std::exception& e);
/// {"error": {"kind": ..., "message": ...}}.
nlohmann::json error_json(const std::exception& e);

}  // namespace enerkin
