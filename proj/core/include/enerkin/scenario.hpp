#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "enerkin/density.hpp"
#include "enerkin/network.hpp"
#include "enerkin/simulator.hpp"
#include "enerkin/solver.hpp"

namespace enerkin {

inline constexpr int kSchemaVersion = 1;

/// weight * density for one type.
struct TypedDensity {
  TypeId type = 1;
  DensityFamily density = DensityFamily::exponential(1.0);
  double weight = 1.0;
};

struct SimulationSpec {
  InitialCondition initial;
  double t_end = 0.0;
  std::vector<double> snapshot_times;
  std::uint64_t seed = 1;
  int replicas = 1;
  std::optional<std::uint64_t> max_events;
  std::uint64_t renormalize_every = 0;
  /// Bin edges of the exported histograms (strictly increasing).
  std::vector<double> histogram_edges;
};

struct SolverSpec {
  double x_max = 20.0;
  int n_cells = 1000;
  double dt = 0.01;
  double t_end = 0.0;
  Scheme scheme = Scheme::rk4;
  std::vector<double> snapshot_times;
  bool renormalize_mass = false;
  std::vector<TypedDensity> initial;
};

/// A requested check: `kind` from the catalog understood by the check
/// command, a tolerance and free-form parameters.
struct CheckSpec {
  std::string kind;
  double tolerance = 0.0;
  nlohmann::json params = nlohmann::json::object();
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  ReactionNetwork network;
  std::optional<SimulationSpec> simulation;
  std::optional<SolverSpec> solver;
  /// Reference law f0 (one entry per type) for entropy, residual and KS checks.
  std::vector<TypedDensity> reference;
  std::vector<CheckSpec> checks;

  /// Throws ValidationError when the section is missing.
  SimulatorConfig simulator_config() const;
  SolverConfig solver_config() const;
  DensityGrid solver_initial_grid() const;
  /// Reference densities and weights ordered by type.
  std::vector<DensityFamily> reference_densities() const;
  std::vector<double> reference_weights() const;
};

/// Parse and validate; every failure names the offending field.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const Scenario& scenario);

}  // namespace enerkin
