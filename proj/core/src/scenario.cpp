#include <odorsim/scenario.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace odorsim::scenario {

using nlohmann::json;

namespace {

// Every key of the schema with its default. null marks optional members
// (computed defaults for initial_states and offsets, unused fixed point).
json defaults() {
  return json::parse(R"({
    "schema_version": 1,
    "agents": { "count": 4, "dimension": 1, "initial_states": null },
    "topology": {
      "edges": [
        { "receiver": 0, "sender": 2, "weight": 1.0 },
        { "receiver": 2, "sender": 1, "weight": 1.0 },
        { "receiver": 3, "sender": 2, "weight": 1.0 }
      ],
      "leaders": [0, 1]
    },
    "scenario": { "kind": "consensus", "offsets": null },
    "time": { "dt": 0.001, "t_end": 10.0, "sensing_period": 0.1 },
    "theta": 0.001,
    "seed": 42,
    "dynamics": { "drift": "sine", "disturbance": "chirp", "disturbance_amplitude": 0.3 },
    "plume": {
      "source": [0.0],
      "release_period": 0.1,
      "kernel_width": 0.5,
      "kernel_amplitude": 1.0,
      "warmup": 15.0,
      "max_filament_age": 60.0
    },
    "wind": {
      "mean_velocity": [0.8],
      "max_speed": 1.0,
      "noise_sigma": 0.05,
      "additive_amplitude": 0.1,
      "multiplicative_amplitude": 0.1,
      "gust_frequency": 0.2
    },
    "decision": {
      "alpha1": 0.25, "alpha2": 0.25, "inertia_omega": 2.0, "c1": 0.5,
      "detection_threshold": 2.0
    },
    "planner": { "delta0": 5.0, "search_mean": 0.0, "search_std": 1.0, "casting": "midpoint" },
    "smc": { "lambda1": 1.774, "lambda2": 2.85, "mu": 5.0, "m": 0.001, "w": 2.0, "boundary_layer": 0.0 },
    "controller": { "kind": "smc", "discretization": "sampled" },
    "reference": { "mode": "plume", "point": null, "rate": "hold", "initial_leader": 0 },
    "trace": { "filaments": false }
  })");
}

// Keys whose value is free-form (arrays, or null placeholders).
bool is_leaf(const json& schema_value) {
  return !schema_value.is_object();
}

void merge_into(json& base, const json& patch, const std::string& prefix) {
  if (!patch.is_object()) {
    throw sim::ConfigError(prefix.empty() ? "config" : prefix, "expected an object");
  }
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!base.contains(it.key())) throw sim::ConfigError(key, "unknown key");
    json& slot = base[it.key()];
    if (is_leaf(slot)) {
      slot = it.value();
    } else {
      merge_into(slot, it.value(), key);
    }
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw sim::ConfigError(assignment, "override must look like key=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) {
      throw sim::ConfigError(path, "unknown key");
    }
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (node->is_object()) throw sim::ConfigError(path, "cannot override a whole section");
  *node = std::move(value);
}

const json& at(const json& doc, const std::string& path) {
  const json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    node = &node->at(path.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
    if (dot == std::string::npos) return *node;
    start = dot + 1;
  }
}

double num(const json& doc, const std::string& path) {
  const json& v = at(doc, path);
  if (!v.is_number()) throw sim::ConfigError(path, "expected a number");
  return v.get<double>();
}

long long integer(const json& doc, const std::string& path) {
  const json& v = at(doc, path);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw sim::ConfigError(path, "expected an integer");
  }
  return v.get<long long>();
}

bool boolean(const json& doc, const std::string& path) {
  const json& v = at(doc, path);
  if (!v.is_boolean()) throw sim::ConfigError(path, "expected true or false");
  return v.get<bool>();
}

template <typename Enum>
Enum choice(const json& doc, const std::string& path,
            std::initializer_list<std::pair<const char*, Enum>> options) {
  const json& v = at(doc, path);
  if (v.is_string()) {
    for (const auto& [name, value] : options) {
      if (v.get<std::string>() == name) return value;
    }
  }
  std::string allowed;
  for (const auto& [name, value] : options) {
    allowed += allowed.empty() ? name : std::string(", ") + name;
  }
  throw sim::ConfigError(path, "expected one of: " + allowed);
}

Vec vec_of(const json& v, const std::string& path) {
  if (v.is_number()) return Vec::Constant(1, v.get<double>());
  if (!v.is_array() || v.empty()) throw sim::ConfigError(path, "expected a numeric array");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number()) throw sim::ConfigError(path, "expected a numeric array");
    out[static_cast<Eigen::Index>(k)] = v[k].get<double>();
  }
  return out;
}

std::vector<Vec> vec_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw sim::ConfigError(path, "expected an array of vectors");
  std::vector<Vec> out;
  for (const auto& e : v) out.push_back(vec_of(e, path));
  return out;
}

sim::SimConfig to_config(const json& doc, bool structural) {
  sim::SimConfig c;
  if (integer(doc, "schema_version") != kSchemaVersion) {
    throw sim::ConfigError("schema_version", "unsupported version, expected " +
                                                 std::to_string(kSchemaVersion));
  }
  c.n_agents = static_cast<int>(integer(doc, "agents.count"));
  c.dim = static_cast<int>(integer(doc, "agents.dimension"));
  if (c.n_agents < 1) throw sim::ConfigError("agents.count", "must be >= 1");
  if (c.dim < 1 || c.dim > 3) throw sim::ConfigError("agents.dimension", "must be 1, 2 or 3");

  std::vector<graph::Edge> edges;
  const json& jedges = at(doc, "topology.edges");
  if (!jedges.is_array()) throw sim::ConfigError("topology.edges", "expected an array");
  for (const auto& e : jedges) {
    if (!e.is_object() || !e.contains("receiver") || !e.contains("sender") ||
        !e["receiver"].is_number_integer() || !e["sender"].is_number_integer()) {
      throw sim::ConfigError("topology.edges", "each edge needs integer receiver and sender");
    }
    for (auto it = e.begin(); it != e.end(); ++it) {
      if (it.key() != "receiver" && it.key() != "sender" && it.key() != "weight") {
        throw sim::ConfigError("topology.edges." + it.key(), "unknown key");
      }
    }
    const double w = e.contains("weight") ? e["weight"].get<double>() : 1.0;
    edges.push_back({e["receiver"].get<int>(), e["sender"].get<int>(), w});
  }
  const json& jleaders = at(doc, "topology.leaders");
  if (!jleaders.is_array()) throw sim::ConfigError("topology.leaders", "expected an array");
  std::vector<int> leaders;
  for (const auto& l : jleaders) {
    if (!l.is_number_integer()) throw sim::ConfigError("topology.leaders", "expected integers");
    leaders.push_back(l.get<int>());
  }
  try {
    c.topology = graph::Digraph::from_edges(c.n_agents, edges, leaders);
  } catch (const graph::GraphError& e) {
    throw sim::ConfigError("topology", e.what());
  }

  c.scenario = choice<sim::ScenarioKind>(doc, "scenario.kind",
                                         {{"consensus", sim::ScenarioKind::Consensus},
                                          {"formation", sim::ScenarioKind::Formation}});
  const json& joff = at(doc, "scenario.offsets");
  c.offsets = joff.is_null() ? std::vector<Vec>(static_cast<std::size_t>(c.n_agents), Vec::Zero(c.dim))
                             : vec_list(joff, "scenario.offsets");
  const json& jinit = at(doc, "agents.initial_states");
  c.initial_states = jinit.is_null() ? sim::default_initial_states(c.n_agents, c.dim)
                                     : vec_list(jinit, "agents.initial_states");

  c.time.dt = num(doc, "time.dt");
  c.time.t_end = num(doc, "time.t_end");
  c.time.sensing_period = num(doc, "time.sensing_period");
  c.theta = num(doc, "theta");
  const json& jseed = at(doc, "seed");
  if (!jseed.is_number_integer() && !jseed.is_number_unsigned()) {
    throw sim::ConfigError("seed", "expected a non-negative integer");
  }
  if (jseed.is_number_integer() && jseed.get<long long>() < 0) {
    throw sim::ConfigError("seed", "expected a non-negative integer");
  }
  c.seed = jseed.get<std::uint64_t>();

  c.dynamics.drift = choice<sim::DriftKind>(doc, "dynamics.drift",
                                            {{"sine", sim::DriftKind::Sine},
                                             {"none", sim::DriftKind::None}});
  c.dynamics.disturbance = choice<sim::DisturbanceKind>(
      doc, "dynamics.disturbance",
      {{"none", sim::DisturbanceKind::None},
       {"chirp", sim::DisturbanceKind::Chirp},
       {"uniform", sim::DisturbanceKind::Uniform}});
  c.dynamics.disturbance_amplitude = num(doc, "dynamics.disturbance_amplitude");

  c.plume.source = vec_of(at(doc, "plume.source"), "plume.source");
  c.plume.release_period = num(doc, "plume.release_period");
  c.plume.kernel_width = num(doc, "plume.kernel_width");
  c.plume.kernel_amplitude = num(doc, "plume.kernel_amplitude");
  c.plume.warmup = num(doc, "plume.warmup");
  c.plume.max_filament_age = num(doc, "plume.max_filament_age");
  c.plume.wind.base_velocity = vec_of(at(doc, "wind.mean_velocity"), "wind.mean_velocity");
  c.plume.wind.max_speed = num(doc, "wind.max_speed");
  c.plume.wind.noise_sigma = num(doc, "wind.noise_sigma");
  c.plume.wind.additive_amplitude = num(doc, "wind.additive_amplitude");
  c.plume.wind.multiplicative_amplitude = num(doc, "wind.multiplicative_amplitude");
  c.plume.wind.gust_frequency = num(doc, "wind.gust_frequency");

  c.pso.alpha1 = num(doc, "decision.alpha1");
  c.pso.alpha2 = num(doc, "decision.alpha2");
  c.pso.inertia_omega = num(doc, "decision.inertia_omega");
  c.pso.c1 = num(doc, "decision.c1");
  c.detection_threshold = num(doc, "decision.detection_threshold");

  c.planner.delta0 = num(doc, "planner.delta0");
  c.planner.search_mean = num(doc, "planner.search_mean");
  c.planner.search_std = num(doc, "planner.search_std");
  c.planner.casting = choice<planner::CastingRule>(doc, "planner.casting",
                                                   {{"midpoint", planner::CastingRule::Midpoint},
                                                    {"literal", planner::CastingRule::Literal}});

  c.smc.lambda1 = num(doc, "smc.lambda1");
  c.smc.lambda2 = num(doc, "smc.lambda2");
  c.smc.mu = num(doc, "smc.mu");
  c.smc.m_offset = num(doc, "smc.m");
  c.smc.w_gain = num(doc, "smc.w");
  c.smc.boundary_layer = num(doc, "smc.boundary_layer");

  c.controller = choice<sim::ControllerKind>(doc, "controller.kind",
                                             {{"smc", sim::ControllerKind::SlidingMode},
                                              {"pso", sim::ControllerKind::Pso}});
  c.discretization = choice<sim::Discretization>(
      doc, "controller.discretization",
      {{"sampled", sim::Discretization::Sampled}, {"continuous", sim::Discretization::Continuous}});

  c.reference.mode = choice<sim::ReferenceMode>(doc, "reference.mode",
                                                {{"plume", sim::ReferenceMode::Plume},
                                                 {"fixed", sim::ReferenceMode::Fixed}});
  const json& jpoint = at(doc, "reference.point");
  if (!jpoint.is_null()) c.reference.fixed_point = vec_of(jpoint, "reference.point");
  c.reference.rate = choice<sim::ReferenceRate>(doc, "reference.rate",
                                                {{"hold", sim::ReferenceRate::Hold},
                                                 {"difference", sim::ReferenceRate::Difference}});
  c.reference.initial_leader = static_cast<int>(integer(doc, "reference.initial_leader"));
  c.record_filaments = boolean(doc, "trace.filaments");

  c.validate(structural);
  return c;
}

}  // namespace

std::vector<std::string> canned_names() {
  return {"paper_consensus", "paper_formation", "no_disturbance", "pso_comparison"};
}

std::optional<std::string> canned_scenario(std::string_view name) {
  if (name == "paper_consensus") {
    return R"({ "schema_version": 1 })";
  }
  if (name == "paper_formation") {
    return R"({
  "schema_version": 1,
  "scenario": { "kind": "formation", "offsets": [[0.0], [0.5], [1.0], [1.5]] }
})";
  }
  if (name == "no_disturbance") {
    return R"({
  "schema_version": 1,
  "dynamics": { "drift": "none", "disturbance": "none" }
})";
  }
  if (name == "pso_comparison") {
    return R"({
  "schema_version": 1,
  "controller": { "kind": "pso" }
})";
  }
  return std::nullopt;
}

std::string default_scenario_json() { return defaults().dump(2); }

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

LoadedScenario load_scenario(std::string_view json_text,
                             const std::vector<std::string>& overrides,
                             bool structural_checks) {
  json user = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (user.is_discarded()) throw sim::ConfigError("config", "not valid JSON");
  if (user.is_object() && user.contains("config") && user.contains("config_hash")) {
    user = user["config"];
  }
  json doc = defaults();
  merge_into(doc, user, "");
  for (const auto& o : overrides) apply_override(doc, o);

  LoadedScenario out;
  try {
    out.config = to_config(doc, structural_checks);
  } catch (const json::exception& e) {
    throw sim::ConfigError("config", e.what());
  }
  out.canonical_json = doc.dump(2);
  out.hash = fnv1a64(out.canonical_json);
  return out;
}

std::string resolve_scenario_text(const std::string& name_or_path) {
  if (auto canned = canned_scenario(name_or_path)) return *canned;
  std::ifstream in(name_or_path);
  if (!in) {
    throw sim::ConfigError("config", "no built-in scenario or readable file named '" +
                                         name_or_path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace odorsim::scenario
