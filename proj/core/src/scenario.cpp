#include "enerkin/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "enerkin/error.hpp"

namespace enerkin {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& rule) {
  throw ValidationError(path + ": " + rule);
}

// Run `f`, prefixing any validation failure with the field path.
template <class F>
auto at(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing required field");
  return j.at(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "must be a number");
  return j.get<double>();
}

double number(const json& j, const char* key, const std::string& path) {
  return number(require(j, key, path), path + "." + key);
}

double number_or(const json& j, const char* key, double fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  return number(j.at(key), path + "." + key);
}

long long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(path, "must be an integer");
  return j.get<long long>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

TypeId type_id(const json& j, const std::string& path, int type_count) {
  const auto v = integer(j, path);
  if (v < 1 || v > type_count)
    fail(path, "type id " + std::to_string(v) + " outside 1.." + std::to_string(type_count));
  return static_cast<TypeId>(v);
}

std::pair<TypeId, TypeId> type_pair(const json& j, const std::string& path, int type_count) {
  if (!j.is_array() || j.size() != 2) fail(path, "must be a pair of type ids");
  return {type_id(j[0], path + "[0]", type_count), type_id(j[1], path + "[1]", type_count)};
}

void check_times(const std::vector<double>& times, double t_end, const std::string& path) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0) || times[i] > t_end) fail(path, "every time must lie in [0, t_end]");
    if (i > 0 && times[i] < times[i - 1]) fail(path, "must be sorted");
  }
}

std::vector<TypedDensity> typed_densities(const json& j, const std::string& path, int type_count) {
  if (!j.is_array()) fail(path, "must be an array");
  std::vector<TypedDensity> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    TypedDensity d;
    d.type = type_id(require(j[i], "type", p), p + ".type", type_count);
    d.density = at(p + ".density", [&] { return DensityFamily::from_json(require(j[i], "density", p)); });
    d.weight = number_or(j[i], "weight", 1.0, p);
    if (!(d.weight >= 0.0) || !std::isfinite(d.weight)) fail(p + ".weight", "must be finite and >= 0");
    out.push_back(std::move(d));
  }
  return out;
}

json typed_densities_json(const std::vector<TypedDensity>& list) {
  json out = json::array();
  for (const auto& d : list)
    out.push_back({{"type", d.type}, {"density", d.density.to_json()}, {"weight", d.weight}});
  return out;
}

TypeTable parse_types(const json& j) {
  if (!j.is_array() || j.empty()) fail("types", "must be a nonempty array");
  std::vector<double> energies;
  std::vector<std::string> labels;
  bool any_label = false;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = "types[" + std::to_string(i) + "]";
    energies.push_back(number(j[i], "internal_energy", p));
    if (j[i].contains("label")) {
      if (!j[i].at("label").is_string()) fail(p + ".label", "must be a string");
      labels.push_back(j[i].at("label").get<std::string>());
      any_label = true;
    } else {
      labels.emplace_back();
    }
  }
  if (!any_label) labels.clear();
  return at("types", [&] { return TypeTable(energies, labels); });
}

ReactionNetwork parse_network(const json& j, const TypeTable& types) {
  const int v = types.count();
  std::vector<BinaryChannel> binary;
  if (j.contains("binary_channels")) {
    const auto& list = j.at("binary_channels");
    if (!list.is_array()) fail("binary_channels", "must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = "binary_channels[" + std::to_string(i) + "]";
      BinaryChannel ch;
      std::tie(ch.a, ch.b) = type_pair(require(list[i], "reactants", p), p + ".reactants", v);
      ch.rate = at(p + ".rate", [&] { return RateFunction::from_json(require(list[i], "rate", p)); });
      const auto& outs = require(list[i], "outcomes", p);
      if (!outs.is_array() || outs.empty()) fail(p + ".outcomes", "must be a nonempty array");
      for (std::size_t k = 0; k < outs.size(); ++k) {
        const std::string q = p + ".outcomes[" + std::to_string(k) + "]";
        Outcome o;
        std::tie(o.first, o.second) = type_pair(require(outs[k], "products", q), q + ".products", v);
        o.weight = number_or(outs[k], "weight", 1.0, q);
        o.split = outs[k].contains("split")
                      ? at(q + ".split", [&] { return EnergySplit::from_json(outs[k].at("split")); })
                      : EnergySplit::uniform();
        ch.outcomes.push_back(std::move(o));
      }
      binary.push_back(std::move(ch));
    }
  }
  std::vector<UnaryChannel> unary;
  if (j.contains("unary_channels")) {
    const auto& list = j.at("unary_channels");
    if (!list.is_array()) fail("unary_channels", "must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = "unary_channels[" + std::to_string(i) + "]";
      UnaryChannel u;
      u.from = type_id(require(list[i], "from", p), p + ".from", v);
      u.to = type_id(require(list[i], "to", p), p + ".to", v);
      u.rate = at(p + ".rate", [&] { return UnaryRate::from_json(require(list[i], "rate", p)); });
      unary.push_back(std::move(u));
    }
  }
  auto network = at("binary_channels", [&] { return ReactionNetwork(types, binary, unary); });
  at("binary_channels", [&] {
    network.validate(1000);
    return 0;
  });
  return network;
}

InitialCondition parse_initial(const json& j, const std::string& path, int type_count) {
  if (j.contains("particles")) {
    const auto& list = j.at("particles");
    if (!list.is_array()) fail(path + ".particles", "must be an array");
    ParticleSystem s;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = path + ".particles[" + std::to_string(i) + "]";
      Particle particle;
      particle.type = type_id(require(list[i], "type", p), p + ".type", type_count);
      particle.kinetic_energy = number(list[i], "kinetic_energy", p);
      if (!(particle.kinetic_energy >= 0.0) || !std::isfinite(particle.kinetic_energy))
        fail(p + ".kinetic_energy", "must be finite and >= 0");
      s.particles.push_back(particle);
    }
    return s;
  }
  if (j.contains("groups")) {
    const auto& list = j.at("groups");
    if (!list.is_array()) fail(path + ".groups", "must be an array");
    SampledInitial s;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = path + ".groups[" + std::to_string(i) + "]";
      SampledGroup g;
      g.type = type_id(require(list[i], "type", p), p + ".type", type_count);
      const auto count = integer(require(list[i], "count", p), p + ".count");
      if (count < 0) fail(p + ".count", "must be >= 0");
      g.count = static_cast<std::size_t>(count);
      g.density = at(p + ".density", [&] { return DensityFamily::from_json(require(list[i], "density", p)); });
      s.groups.push_back(std::move(g));
    }
    return s;
  }
  fail(path, "needs either 'particles' or 'groups'");
}

json initial_json(const InitialCondition& initial) {
  if (const auto* s = std::get_if<ParticleSystem>(&initial)) {
    json list = json::array();
    for (const auto& p : s->particles)
      list.push_back({{"type", p.type}, {"kinetic_energy", p.kinetic_energy}});
    return {{"particles", list}};
  }
  json list = json::array();
  for (const auto& g : std::get<SampledInitial>(initial).groups)
    list.push_back({{"type", g.type}, {"count", g.count}, {"density", g.density.to_json()}});
  return {{"groups", list}};
}

SimulationSpec parse_simulation(const json& j, int type_count) {
  const std::string path = "simulation";
  SimulationSpec s;
  s.initial = parse_initial(require(j, "initial", path), path + ".initial", type_count);
  s.t_end = number(j, "t_end", path);
  if (j.contains("max_events")) {
    const auto n = integer(j.at("max_events"), path + ".max_events");
    if (n < 0) fail(path + ".max_events", "must be >= 0");
    s.max_events = static_cast<std::uint64_t>(n);
  }
  if (!(s.t_end >= 0.0)) fail(path + ".t_end", "must be >= 0");
  if (j.contains("snapshot_times")) {
    s.snapshot_times = numbers(j.at("snapshot_times"), path + ".snapshot_times");
    check_times(s.snapshot_times, s.t_end, path + ".snapshot_times");
  }
  if (j.contains("seed")) {
    const auto& seed = j.at("seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0))
      fail(path + ".seed", "must be a nonnegative integer");
    s.seed = seed.get<std::uint64_t>();
  }
  if (j.contains("replicas")) {
    const auto r = integer(j.at("replicas"), path + ".replicas");
    if (r < 1) fail(path + ".replicas", "must be >= 1");
    s.replicas = static_cast<int>(r);
  }
  if (j.contains("renormalize_every")) {
    const auto r = integer(j.at("renormalize_every"), path + ".renormalize_every");
    if (r < 0) fail(path + ".renormalize_every", "must be >= 0");
    s.renormalize_every = static_cast<std::uint64_t>(r);
  }
  const std::string hp = path + ".histogram";
  if (j.contains("histogram")) {
    const auto& h = j.at("histogram");
    if (h.contains("edges")) {
      s.histogram_edges = numbers(h.at("edges"), hp + ".edges");
    } else {
      const double lo = number(h, "min", hp);
      const double hi = number(h, "max", hp);
      const auto bins = integer(require(h, "bins", hp), hp + ".bins");
      if (bins < 1) fail(hp + ".bins", "must be >= 1");
      if (!(hi > lo)) fail(hp, "max must exceed min");
      for (long long k = 0; k <= bins; ++k)
        s.histogram_edges.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(bins));
    }
  } else {
    for (int k = 0; k <= 20; ++k) s.histogram_edges.push_back(0.5 * k);
  }
  if (s.histogram_edges.size() < 2) fail(hp, "needs at least two edges");
  for (std::size_t k = 1; k < s.histogram_edges.size(); ++k)
    if (!(s.histogram_edges[k] > s.histogram_edges[k - 1])) fail(hp, "edges must be strictly increasing");
  return s;
}

Scheme parse_scheme(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "must be \"rk4\" or \"euler\"");
  const auto s = j.get<std::string>();
  if (s == "rk4") return Scheme::rk4;
  if (s == "euler") return Scheme::explicit_euler;
  fail(path, "unknown scheme '" + s + "' (expected rk4 or euler)");
}

SolverSpec parse_solver(const json& j, int type_count) {
  const std::string path = "solver";
  SolverSpec s;
  s.x_max = number(j, "x_max", path);
  if (!(s.x_max > 0.0) || !std::isfinite(s.x_max)) fail(path + ".x_max", "must be > 0");
  const auto n = integer(require(j, "n_cells", path), path + ".n_cells");
  if (n < 2) fail(path + ".n_cells", "must be >= 2");
  s.n_cells = static_cast<int>(n);
  s.dt = number(j, "dt", path);
  if (!(s.dt > 0.0)) fail(path + ".dt", "must be > 0");
  s.t_end = number(j, "t_end", path);
  if (!(s.t_end >= 0.0) || !std::isfinite(s.t_end)) fail(path + ".t_end", "must be finite and >= 0");
  if (j.contains("scheme")) s.scheme = parse_scheme(j.at("scheme"), path + ".scheme");
  if (j.contains("snapshot_times")) {
    s.snapshot_times = numbers(j.at("snapshot_times"), path + ".snapshot_times");
    check_times(s.snapshot_times, s.t_end, path + ".snapshot_times");
  }
  if (j.contains("renormalize_mass")) {
    if (!j.at("renormalize_mass").is_boolean()) fail(path + ".renormalize_mass", "must be a boolean");
    s.renormalize_mass = j.at("renormalize_mass").get<bool>();
  }
  s.initial = typed_densities(require(j, "initial", path), path + ".initial", type_count);
  return s;
}

struct CheckKind {
  double tolerance;
  bool needs_reference;
  bool needs_solver;
  bool needs_simulation;
};

const std::map<std::string, CheckKind>& check_catalog() {
  static const std::map<std::string, CheckKind> catalog{
      {"kernel_normalization", {1e-6, false, false, false}},
      {"detailed_balance", {1e-12, true, false, false}},
      {"local_equilibrium", {1e-8, true, false, false}},
      {"fixed_point", {1e-8, true, false, false}},
      {"additive_conservation", {1e-12, true, false, false}},
      {"fixed_point_grid", {1e-3, true, true, false}},
      {"solver_convergence", {1e-2, true, true, false}},
      {"entropy_monotonicity", {1e-6, true, true, false}},
      {"mass_conservation", {1e-3, false, true, false}},
      {"energy_conservation", {1e-9, false, false, true}},
      {"simulation_ks", {0.06, true, false, true}},
      {"admissible_pair", {1e-12, true, false, false}},
      {"kolmogorov", {1e-10, false, false, false}},
  };
  return catalog;
}

}  // namespace

SimulatorConfig Scenario::simulator_config() const {
  if (!simulation) throw ValidationError("scenario has no 'simulation' section");
  SimulatorConfig c;
  c.network = network;
  c.initial = simulation->initial;
  c.t_end = simulation->t_end;
  c.snapshot_times = simulation->snapshot_times;
  c.seed = simulation->seed;
  c.replicas = simulation->replicas;
  c.max_events = simulation->max_events;
  c.renormalize_every = simulation->renormalize_every;
  return c;
}

SolverConfig Scenario::solver_config() const {
  if (!solver) throw ValidationError("scenario has no 'solver' section");
  SolverConfig c;
  c.dt = solver->dt;
  c.t_end = solver->t_end;
  c.scheme = solver->scheme;
  c.snapshot_times = solver->snapshot_times;
  c.renormalize_mass = solver->renormalize_mass;
  return c;
}

DensityGrid Scenario::solver_initial_grid() const {
  if (!solver) throw ValidationError("scenario has no 'solver' section");
  DensityGrid g(solver->x_max, solver->n_cells, network.types().count());
  const double h = g.h();
  for (const auto& d : solver->initial) {
    auto& row = g[d.type];
    double prev = d.density.cdf(0.0);
    for (int k = 0; k < g.n_cells; ++k) {
      const double next = d.density.cdf((k + 1) * h);
      row[static_cast<std::size_t>(k)] += d.weight * std::max(0.0, next - prev) / h;
      prev = next;
    }
  }
  return g;
}

std::vector<DensityFamily> Scenario::reference_densities() const {
  if (reference.empty()) throw ValidationError("scenario has no 'reference' densities");
  std::vector<DensityFamily> out(static_cast<std::size_t>(network.types().count()),
                                 DensityFamily::exponential(1.0));
  for (const auto& d : reference) out[static_cast<std::size_t>(d.type - 1)] = d.density;
  return out;
}

std::vector<double> Scenario::reference_weights() const {
  std::vector<double> out(static_cast<std::size_t>(network.types().count()), 0.0);
  for (const auto& d : reference) out[static_cast<std::size_t>(d.type - 1)] = d.weight;
  return out;
}

Scenario parse_scenario(const json& j) {
  if (!j.is_object()) fail("scenario", "must be a JSON object");
  Scenario s;
  const auto version = integer(require(j, "schema_version", "scenario"), "schema_version");
  if (version != kSchemaVersion)
    fail("schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                               std::to_string(kSchemaVersion) + ")");
  if (j.contains("name")) {
    if (!j.at("name").is_string()) fail("name", "must be a string");
    s.name = j.at("name").get<std::string>();
  }
  const TypeTable types = parse_types(require(j, "types", "scenario"));
  s.network = parse_network(j, types);
  const int v = types.count();
  if (j.contains("simulation")) s.simulation = parse_simulation(j.at("simulation"), v);
  if (j.contains("solver")) s.solver = parse_solver(j.at("solver"), v);
  if (j.contains("reference")) {
    s.reference = typed_densities(j.at("reference"), "reference", v);
    std::vector<int> seen(static_cast<std::size_t>(v), 0);
    for (const auto& d : s.reference) ++seen[static_cast<std::size_t>(d.type - 1)];
    for (int t = 0; t < v; ++t)
      if (seen[static_cast<std::size_t>(t)] != 1)
        fail("reference", "needs exactly one entry for type " + std::to_string(t + 1));
  }
  if (j.contains("checks")) {
    const auto& list = j.at("checks");
    if (!list.is_array()) fail("checks", "must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string p = "checks[" + std::to_string(i) + "]";
      const auto& kind_json = require(list[i], "kind", p);
      if (!kind_json.is_string()) fail(p + ".kind", "must be a string");
      CheckSpec c;
      c.kind = kind_json.get<std::string>();
      const auto it = check_catalog().find(c.kind);
      if (it == check_catalog().end()) fail(p + ".kind", "unknown check kind '" + c.kind + "'");
      c.tolerance = number_or(list[i], "tolerance", it->second.tolerance, p);
      if (!(c.tolerance >= 0.0)) fail(p + ".tolerance", "must be >= 0");
      if (it->second.needs_reference && s.reference.empty())
        fail(p, "check '" + c.kind + "' requires a 'reference' section");
      if (it->second.needs_solver && !s.solver)
        fail(p, "check '" + c.kind + "' requires a 'solver' section");
      if (it->second.needs_simulation && !s.simulation)
        fail(p, "check '" + c.kind + "' requires a 'simulation' section");
      c.params = list[i];
      c.params.erase("kind");
      c.params.erase("tolerance");
      s.checks.push_back(std::move(c));
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario '" + path.string() + "': parse error: " + e.what());
  }
  return parse_scenario(j);
}

json to_json(const Scenario& s) {
  json j;
  j["schema_version"] = s.schema_version;
  if (!s.name.empty()) j["name"] = s.name;
  const auto& types = s.network.types();
  json type_list = json::array();
  for (TypeId v = 1; v <= types.count(); ++v) {
    json t{{"internal_energy", types.internal_energy(v)}};
    if (!types.label(v).empty()) t["label"] = types.label(v);
    type_list.push_back(t);
  }
  j["types"] = type_list;
  json binary = json::array();
  for (const auto& ch : s.network.binary_channels()) {
    json outs = json::array();
    for (const auto& o : ch.outcomes)
      outs.push_back({{"products", {o.first, o.second}},
                      {"weight", o.weight},
                      {"split", o.split.to_json()}});
    binary.push_back({{"reactants", {ch.a, ch.b}}, {"rate", ch.rate.to_json()}, {"outcomes", outs}});
  }
  j["binary_channels"] = binary;
  json unary = json::array();
  for (const auto& u : s.network.unary_channels())
    unary.push_back({{"from", u.from}, {"to", u.to}, {"rate", u.rate.to_json()}});
  j["unary_channels"] = unary;
  if (s.simulation) {
    const auto& sim = *s.simulation;
    json o{{"initial", initial_json(sim.initial)},
           {"t_end", sim.t_end},
           {"snapshot_times", sim.snapshot_times},
           {"seed", sim.seed},
           {"replicas", sim.replicas},
           {"renormalize_every", sim.renormalize_every},
           {"histogram", {{"edges", sim.histogram_edges}}}};
    if (sim.max_events) o["max_events"] = *sim.max_events;
    j["simulation"] = o;
  }
  if (s.solver) {
    const auto& sol = *s.solver;
    j["solver"] = {{"x_max", sol.x_max},
                   {"n_cells", sol.n_cells},
                   {"dt", sol.dt},
                   {"t_end", sol.t_end},
                   {"scheme", sol.scheme == Scheme::rk4 ? "rk4" : "euler"},
                   {"snapshot_times", sol.snapshot_times},
                   {"renormalize_mass", sol.renormalize_mass},
                   {"initial", typed_densities_json(sol.initial)}};
  }
  if (!s.reference.empty()) j["reference"] = typed_densities_json(s.reference);
  json checks = json::array();
  for (const auto& c : s.checks) {
    json o = c.params;
    o["kind"] = c.kind;
    o["tolerance"] = c.tolerance;
    checks.push_back(o);
  }
  j["checks"] = checks;
  return j;
}

}  // namespace enerkin
