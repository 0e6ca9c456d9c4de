#pragma once

#include <odorsim/decision.hpp>
#include <odorsim/graph.hpp>
#include <odorsim/planner.hpp>
#include <odorsim/plume.hpp>
#include <odorsim/rng.hpp>
#include <odorsim/smc.hpp>
#include <odorsim/types.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace odorsim::sim {

/// Invalid scenario; `key` names the offending configuration entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class ScenarioKind { Consensus, Formation };
enum class ControllerKind { SlidingMode, Pso };
enum class Discretization { Sampled, Continuous };
enum class ReferenceRate { Hold, Difference };
enum class ReferenceMode { Plume, Fixed };
enum class DriftKind { Sine, None };
enum class DisturbanceKind { None, Chirp, Uniform };

struct TimeConfig {
  double dt = 1e-3;
  double t_end = 10.0;
  double sensing_period = 0.1;
};

struct DynamicsConfig {
  /// Sine: f(x, t) = 0.1 sin(x) + cos(2 pi t) per component.
  DriftKind drift = DriftKind::Sine;
  /// Chirp: sigma(t) = a sin(pi^2 t^2) / sqrt(d) on every component.
  /// Uniform: independent draws in [-a/sqrt(d), a/sqrt(d)] per agent and step.
  DisturbanceKind disturbance = DisturbanceKind::Chirp;
  double disturbance_amplitude = 0.3;
};

struct PlumeConfig {
  Vec source;
  double release_period = 0.1;
  double kernel_width = 0.5;
  double kernel_amplitude = 1.0;
  /// Seconds of release and advection before t = 0.
  double warmup = 0.0;
  double max_filament_age = 60.0;
  plume::WindParams wind;
};

struct ReferenceConfig {
  ReferenceMode mode = ReferenceMode::Plume;
  Vec fixed_point;  ///< used when mode == Fixed
  ReferenceRate rate = ReferenceRate::Hold;
  int initial_leader = 0;
};

struct SimConfig {
  int n_agents = 4;
  int dim = 1;
  graph::Digraph topology;
  ScenarioKind scenario = ScenarioKind::Consensus;
  std::vector<Vec> offsets;         ///< formation offsets delta_i (zeros for consensus)
  std::vector<Vec> initial_states;
  TimeConfig time;
  double theta = 1e-3;
  std::uint64_t seed = 42;
  DynamicsConfig dynamics;
  PlumeConfig plume;
  decision::PsoParams pso;
  double detection_threshold = 2.0;
  planner::PlannerParams planner;
  smc::SmcParams smc;
  ControllerKind controller = ControllerKind::SlidingMode;
  Discretization discretization = Discretization::Sampled;
  ReferenceConfig reference;
  bool record_filaments = false;

  /// Throws ConfigError naming the first offending key. With
  /// `structural` set, also rejects a singular H for the sliding-mode
  /// controller.
  void validate(bool structural = true) const;
};

/// Evenly spaced states in [-10, 10] on every component.
std::vector<Vec> default_initial_states(int n_agents, int dim);

/// Nominal drift of one agent.
Vec nominal_drift(DriftKind kind, const Vec& x, double t);

struct AgentSample {
  Vec x;
  Vec u;
  Vec s;
  Vec reference;  ///< psi + delta_i
  double lyapunov = 0.0;      ///< V = 0.5 |s|^2
  double reachability = 0.0;  ///< eta
  double error_norm = 0.0;    ///< |x - psi - delta_i|
  double concentration = 0.0;
  bool detecting = false;
  planner::Mode mode = planner::Mode::Casting;
};

struct TraceRecord {
  double t = 0.0;
  std::vector<AgentSample> agents;
  Vec reference;              ///< common psi
  double max_gap = 0.0;       ///< max pairwise |(x_i - delta_i) - (x_j - delta_j)|
  double tracking_error = 0.0;///< |x - psi - delta| over all agents
  double distance_to_source = 0.0;  ///< max_i |x_i - delta_i - x_s|
  double disturbance_norm = 0.0;    ///< max_i |sigma_i|
  int leader = 0;
};

struct FilamentSnapshot {
  double t = 0.0;
  std::vector<Vec> positions;
};

struct Diagnostics {
  long long gamma_floor_events = 0;
  double max_disturbance_norm = 0.0;
  /// sup over samples of |Lambda Gamma_i (H sigma)_i|; the empirical
  /// counterpart of the worst-case term in the mu condition.
  double empirical_disturbance_push = 0.0;
};

struct Trace {
  int n_agents = 0;
  int dim = 0;
  double dt = 0.0;
  double lambda1 = 0.0;
  std::vector<Vec> offsets;
  std::vector<TraceRecord> records;
  std::vector<FilamentSnapshot> filaments;
  Diagnostics diagnostics;
};

/// Replaces the decision-layer reference psi at every step.
using ReferenceOverride = std::function<Vec(long long step, double t)>;

/// Closed-loop simulation. Each step: at sensor instants advance the plume,
/// sense, update PSO bests and wind estimates, fuse psi and run the planner;
/// then evaluate the controller and take one explicit Euler step
/// x += (f + u + sigma) dt.
class Simulation {
 public:
  explicit Simulation(SimConfig cfg, ReferenceOverride override_reference = {});

  /// Advances one integration step and returns the record for the state at
  /// the start of the step. Throws NumericalError on non-finite state.
  TraceRecord step();
  bool done() const { return step_ > total_steps_; }
  Trace run();

  double time() const { return static_cast<double>(step_) * cfg_.time.dt; }
  const SimConfig& config() const { return cfg_; }
  const graph::GraphMatrices& matrices() const { return matrices_; }
  const plume::PlumeState* plume_state() const;
  const Vec& reference() const { return reference_; }
  const Diagnostics& diagnostics() const { return diagnostics_; }

 private:
  struct Agent {
    Vec x;
    decision::DecisionState decision;
    planner::PlannerState planner;
    double concentration = 0.0;
    bool detecting = false;
  };

  void sense(double t);
  void choose_reference(double t);
  Vec stacked_state() const;
  Vec stacked_reference() const;
  Vec disturbance(double t);

  SimConfig cfg_;
  ReferenceOverride override_;
  graph::GraphMatrices matrices_;
  std::optional<smc::SlidingModeController> controller_;
  std::optional<plume::Plume> plume_;
  RandomStream plume_rng_;
  RandomStream planner_rng_;
  RandomStream disturbance_rng_;
  std::vector<Agent> agents_;
  Vec reference_;
  Vec reference_rate_;
  int leader_ = 0;
  long long step_ = 0;
  long long total_steps_ = 0;
  long long sense_every_ = 1;
  Diagnostics diagnostics_;
  std::vector<FilamentSnapshot> snapshots_;
};

Trace run_scenario(const SimConfig& cfg, ReferenceOverride override_reference = {});

struct ConsensusMetrics {
  /// First t after which the max pairwise gap stays below tolerance;
  /// +infinity if it never settles.
  double time_to_consensus = 0.0;
  double final_max_gap = 0.0;
  double final_tracking_error = 0.0;
  double final_distance_to_source = 0.0;
  double max_abs_s = 0.0;
  /// Mean |u_k - u_{k-1}| per component over the final 20% of steps.
  double chattering_index = 0.0;
  /// Sum over agents of integral |u_i| dt.
  double control_energy = 0.0;
};

ConsensusMetrics consensus_metrics(const Trace& trace, double tolerance);

}  // namespace odorsim::sim
