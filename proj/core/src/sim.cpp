#include <odorsim/sim.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace odorsim::sim {

namespace {

void require(bool ok, const char* key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace

void SimConfig::validate(bool structural) const {
  require(n_agents >= 1, "agents.count", "must be >= 1");
  require(dim >= 1 && dim <= 3, "agents.dimension", "must be 1, 2 or 3");
  require(topology.n_agents == n_agents, "topology", "agent count does not match agents.count");
  try {
    topology.validate();
  } catch (const graph::GraphError& e) {
    throw ConfigError("topology", e.what());
  }
  require(time.dt > 0.0 && std::isfinite(time.dt), "time.dt", "must be > 0");
  require(time.t_end > 0.0 && std::isfinite(time.t_end), "time.t_end", "must be > 0");
  require(time.sensing_period >= time.dt, "time.sensing_period", "must be >= time.dt");
  require(theta > 0.0 && std::isfinite(theta), "theta", "accuracy parameter must be > 0");
  require(initial_states.size() == static_cast<std::size_t>(n_agents),
          "agents.initial_states", "needs one state per agent");
  for (const auto& x : initial_states) {
    require(x.size() == dim && all_finite(x), "agents.initial_states",
            "each state needs agents.dimension finite entries");
  }
  require(offsets.size() == static_cast<std::size_t>(n_agents), "scenario.offsets",
          "needs one offset per agent");
  for (const auto& o : offsets) {
    require(o.size() == dim && all_finite(o), "scenario.offsets",
            "each offset needs agents.dimension finite entries");
    if (scenario == ScenarioKind::Consensus) {
      require(o.isZero(0.0), "scenario.offsets", "must be zero for a consensus scenario");
    }
  }
  require(dynamics.disturbance_amplitude >= 0.0 && std::isfinite(dynamics.disturbance_amplitude),
          "dynamics.disturbance_amplitude", "must be finite and >= 0");

  require(plume.source.size() == dim, "plume.source", "needs agents.dimension entries");
  require(plume.release_period > 0.0, "plume.release_period", "must be > 0");
  require(plume.kernel_width > 0.0, "plume.kernel_width", "must be > 0");
  require(plume.kernel_amplitude >= 0.0, "plume.kernel_amplitude", "must be >= 0");
  require(plume.warmup >= 0.0, "plume.warmup", "must be >= 0");
  require(plume.max_filament_age >= 0.0, "plume.max_filament_age", "must be >= 0");
  require(plume.wind.base_velocity.size() == dim, "wind.mean_velocity",
          "needs agents.dimension entries");
  require(plume.wind.max_speed > 0.0, "wind.max_speed", "must be > 0");
  require(plume.wind.noise_sigma >= 0.0, "wind.noise_sigma", "must be >= 0");

  auto wrap = [](const char* key, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
  };
  wrap("decision", [&] { pso.validate(); });
  require(detection_threshold > 0.0, "decision.detection_threshold", "must be > 0");
  wrap("planner", [&] { planner.validate(); });
  wrap("smc", [&] { smc.validate(); });

  if (reference.mode == ReferenceMode::Fixed) {
    require(reference.fixed_point.size() == dim, "reference.point",
            "needs agents.dimension entries");
  }
  require(reference.initial_leader >= 0 && reference.initial_leader < n_agents,
          "reference.initial_leader", "must index an agent");

  if (structural && controller == ControllerKind::SlidingMode) {
    const auto m = graph::build_matrices(topology);
    require(graph::h_is_nonsingular(m), "topology",
            "H = L + B is singular; the leader must reach every agent through a spanning tree");
  }
}

std::vector<Vec> default_initial_states(int n_agents, int dim) {
  std::vector<Vec> xs;
  xs.reserve(static_cast<std::size_t>(n_agents));
  const double span = n_agents > 1 ? 20.0 / static_cast<double>(n_agents - 1) : 0.0;
  for (int i = 0; i < n_agents; ++i) {
    xs.push_back(Vec::Constant(dim, -10.0 + span * static_cast<double>(i)));
  }
  return xs;
}

Vec nominal_drift(DriftKind kind, const Vec& x, double t) {
  if (kind == DriftKind::None) return Vec::Zero(x.size());
  return (0.1 * x.array().sin() + std::cos(2.0 * std::numbers::pi * t)).matrix();
}

Simulation::Simulation(SimConfig cfg, ReferenceOverride override_reference)
    : cfg_(std::move(cfg)),
      override_(std::move(override_reference)),
      plume_rng_(make_stream(cfg_.seed, Stream::Plume)),
      planner_rng_(make_stream(cfg_.seed, Stream::Planner)),
      disturbance_rng_(make_stream(cfg_.seed, Stream::Disturbance)) {
  cfg_.validate();
  matrices_ = graph::build_matrices(cfg_.topology);
  if (cfg_.controller == ControllerKind::SlidingMode) {
    controller_.emplace(matrices_.coupling, cfg_.dim, cfg_.smc);
  }
  total_steps_ = std::llround(cfg_.time.t_end / cfg_.time.dt);
  sense_every_ = std::max<long long>(1, std::llround(cfg_.time.sensing_period / cfg_.time.dt));

  if (cfg_.reference.mode == ReferenceMode::Plume) {
    plume::PlumeState ps;
    ps.source_position = cfg_.plume.source;
    ps.release_period = cfg_.plume.release_period;
    ps.kernel_width = cfg_.plume.kernel_width;
    ps.kernel_amplitude = cfg_.plume.kernel_amplitude;
    plume_.emplace(std::move(ps), plume::WindField(cfg_.plume.wind),
                   cfg_.plume.max_filament_age);
    // Plume clock runs warmup seconds ahead of simulation time.
    const double period = cfg_.time.sensing_period;
    const long long warm_steps = std::llround(cfg_.plume.warmup / period);
    for (long long k = 0; k < warm_steps; ++k) {
      plume_->advance(static_cast<double>(k) * period, period, plume_rng_);
    }
  }

  agents_.resize(static_cast<std::size_t>(cfg_.n_agents));
  for (int i = 0; i < cfg_.n_agents; ++i) {
    auto& a = agents_[static_cast<std::size_t>(i)];
    a.x = cfg_.initial_states[static_cast<std::size_t>(i)];
    a.planner.waypoint = a.x - cfg_.offsets[static_cast<std::size_t>(i)];
  }
  leader_ = cfg_.reference.initial_leader;
  reference_ = cfg_.reference.mode == ReferenceMode::Fixed
                   ? cfg_.reference.fixed_point
                   : agents_[static_cast<std::size_t>(leader_)].planner.waypoint;
  reference_rate_ = Vec::Zero(cfg_.dim);
}

const plume::PlumeState* Simulation::plume_state() const {
  return plume_ ? &plume_->state() : nullptr;
}

void Simulation::sense(double t) {
  const double period = cfg_.time.sensing_period;
  if (step_ > 0) plume_->advance(t - period + cfg_.plume.warmup, period, plume_rng_);
  const auto& ps = plume_->state();

  bool group_any = false;
  std::vector<bool> was_detecting(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    auto& a = agents_[i];
    was_detecting[i] = a.detecting;
    a.concentration = plume::concentration_at(ps, a.x);
    a.detecting = a.concentration >= cfg_.detection_threshold;
    group_any = group_any || a.detecting;
  }

  const int n = cfg_.n_agents;
  for (int i = 0; i < n; ++i) {
    auto& a = agents_[static_cast<std::size_t>(i)];
    // Formation agents reason about the shared target, not their slot.
    const Vec& offset = cfg_.offsets[static_cast<std::size_t>(i)];
    std::optional<decision::ScoredPosition> own;
    if (a.detecting) own = decision::ScoredPosition{a.x - offset, a.concentration};
    std::vector<decision::NeighborReport> reports;
    for (int j = 0; j < n; ++j) {
      const auto& b = agents_[static_cast<std::size_t>(j)];
      const double w = matrices_.adjacency(i, j);
      if (w > 0.0 && b.detecting) {
        reports.push_back({b.x - cfg_.offsets[static_cast<std::size_t>(j)], b.concentration, w});
      }
    }
    a.decision = decision::update_bests(std::move(a.decision), own, reports);
    if (a.detecting && !was_detecting[static_cast<std::size_t>(i)]) {
      if (auto idx = plume::dominant_filament(ps, a.x)) {
        a.decision.wind_estimate = plume::wind_source_estimate(ps.filaments[*idx]);
      }
    }
    decision::refresh_reference(a.decision, cfg_.pso);
    a.decision.last_update = t;

    if (group_any) a.planner.last_detection_time = t;
    a.planner.mode = planner::classify_mode(a.detecting, group_any, t, a.planner, cfg_.planner);
    a.planner.predicted_source = a.decision.reference;
    a.planner.waypoint = planner::next_waypoint(a.planner.mode, a.x - offset, a.planner,
                                                cfg_.planner, planner_rng_);
  }
}

void Simulation::choose_reference(double t) {
  const Vec previous = reference_;
  if (override_) {
    reference_ = override_(step_, t);
  } else if (cfg_.reference.mode == ReferenceMode::Plume) {
    auto score = [](const Agent& a) {
      double s = -1.0;
      if (a.decision.best_local) s = std::max(s, a.decision.best_local->score);
      if (a.decision.best_global) s = std::max(s, a.decision.best_global->score);
      return s;
    };
    // The best-informed agent plays virtual leader; the incumbent keeps the
    // role on ties.
    int best = leader_;
    for (int i = 0; i < cfg_.n_agents; ++i) {
      const auto& a = agents_[static_cast<std::size_t>(i)];
      if (a.decision.reference &&
          (!agents_[static_cast<std::size_t>(best)].decision.reference ||
           score(a) > score(agents_[static_cast<std::size_t>(best)]))) {
        best = i;
      }
    }
    leader_ = best;
    const auto& lead = agents_[static_cast<std::size_t>(leader_)];
    reference_ = lead.decision.reference ? *lead.decision.reference : lead.planner.waypoint;
  }
  if (reference_.size() != cfg_.dim || !reference_.allFinite()) {
    throw NumericalError("reference is not a finite vector of the configured dimension");
  }
  if (cfg_.reference.rate == ReferenceRate::Difference && step_ > 0) {
    reference_rate_ = (reference_ - previous) / cfg_.time.sensing_period;
  } else {
    reference_rate_ = Vec::Zero(cfg_.dim);
  }
}

Vec Simulation::stacked_state() const {
  Vec x(cfg_.n_agents * cfg_.dim);
  for (int i = 0; i < cfg_.n_agents; ++i) {
    x.segment(i * cfg_.dim, cfg_.dim) = agents_[static_cast<std::size_t>(i)].x;
  }
  return x;
}

Vec Simulation::stacked_reference() const {
  Vec r(cfg_.n_agents * cfg_.dim);
  for (int i = 0; i < cfg_.n_agents; ++i) {
    r.segment(i * cfg_.dim, cfg_.dim) = reference_ + cfg_.offsets[static_cast<std::size_t>(i)];
  }
  return r;
}

Vec Simulation::disturbance(double t) {
  const int d = cfg_.dim;
  const double per_axis = cfg_.dynamics.disturbance_amplitude / std::sqrt(static_cast<double>(d));
  Vec sigma = Vec::Zero(cfg_.n_agents * d);
  switch (cfg_.dynamics.disturbance) {
    case DisturbanceKind::None:
      break;
    case DisturbanceKind::Chirp:
      sigma.setConstant(per_axis * std::sin(std::numbers::pi * std::numbers::pi * t * t));
      break;
    case DisturbanceKind::Uniform:
      for (Eigen::Index k = 0; k < sigma.size(); ++k) {
        sigma[k] = per_axis > 0.0 ? disturbance_rng_.uniform(-per_axis, per_axis) : 0.0;
      }
      break;
  }
  return sigma;
}

TraceRecord Simulation::step() {
  if (done()) throw std::logic_error("simulation already finished");
  const double t = time();
  const double dt = cfg_.time.dt;
  const int n = cfg_.n_agents;
  const int d = cfg_.dim;

  if (step_ % sense_every_ == 0) {
    if (plume_ && !override_) sense(t);
    if (cfg_.record_filaments && plume_) {
      FilamentSnapshot snap{t, {}};
      for (const auto& f : plume_->state().filaments) snap.positions.push_back(f.position);
      snapshots_.push_back(std::move(snap));
    }
    choose_reference(t);
  }

  const Vec x = stacked_state();
  const Vec r = stacked_reference();
  Vec drift(n * d);
  for (int i = 0; i < n; ++i) {
    drift.segment(i * d, d) = nominal_drift(cfg_.dynamics.drift, agents_[static_cast<std::size_t>(i)].x, t);
  }
  const Vec sigma = disturbance(t);

  Vec u(n * d);
  Vec eps;
  Vec s;
  if (controller_) {
    smc::ControlInput in{x, r, Vec::Zero(n * d), drift};
    for (int i = 0; i < n; ++i) in.reference_rate.segment(i * d, d) = reference_rate_;
    const auto out = cfg_.discretization == Discretization::Sampled
                         ? controller_->sampled(in, dt)
                         : controller_->continuous(in);
    u = out.control;
    eps = out.eps;
    s = out.s;
    diagnostics_.gamma_floor_events += out.gamma_floor_hits;
  } else {
    for (int i = 0; i < n; ++i) {
      u.segment(i * d, d) = decision::pso_control(r.segment(i * d, d), x.segment(i * d, d), cfg_.pso);
    }
    eps = smc::topological_error(matrices_.coupling, x - r, d);
    s = smc::sliding_value(eps, cfg_.smc);
  }

  const Vec gamma = smc::gamma_factor(eps, cfg_.smc);
  const Vec coupled_sigma = smc::topological_error(matrices_.coupling, sigma, d);
  const Vec eta = smc::reachability_margin(s, gamma, coupled_sigma, d, cfg_.smc);

  TraceRecord rec;
  rec.t = t;
  rec.reference = reference_;
  rec.leader = leader_;
  rec.agents.resize(static_cast<std::size_t>(n));
  double err2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& a = agents_[static_cast<std::size_t>(i)];
    auto& smp = rec.agents[static_cast<std::size_t>(i)];
    smp.x = a.x;
    smp.u = u.segment(i * d, d);
    smp.s = s.segment(i * d, d);
    smp.reference = r.segment(i * d, d);
    smp.lyapunov = 0.5 * smp.s.squaredNorm();
    smp.reachability = eta[i];
    smp.error_norm = (a.x - smp.reference).norm();
    smp.concentration = a.concentration;
    smp.detecting = a.detecting;
    smp.mode = a.planner.mode;
    err2 += smp.error_norm * smp.error_norm;

    const double push =
        cfg_.smc.big_lambda() *
        gamma.segment(i * d, d).cwiseProduct(coupled_sigma.segment(i * d, d)).norm();
    diagnostics_.empirical_disturbance_push = std::max(diagnostics_.empirical_disturbance_push, push);
    const double sn = sigma.segment(i * d, d).norm();
    rec.disturbance_norm = std::max(rec.disturbance_norm, sn);
  }
  rec.tracking_error = std::sqrt(err2);
  for (int i = 0; i < n; ++i) {
    const Vec yi = agents_[static_cast<std::size_t>(i)].x - cfg_.offsets[static_cast<std::size_t>(i)];
    if (plume_) rec.distance_to_source = std::max(rec.distance_to_source, (yi - cfg_.plume.source).norm());
    for (int j = i + 1; j < n; ++j) {
      const Vec yj = agents_[static_cast<std::size_t>(j)].x - cfg_.offsets[static_cast<std::size_t>(j)];
      rec.max_gap = std::max(rec.max_gap, (yi - yj).norm());
    }
  }
  if (rec.disturbance_norm > cfg_.dynamics.disturbance_amplitude * (1.0 + 1e-12)) {
    throw NumericalError("disturbance exceeded its configured bound");
  }
  diagnostics_.max_disturbance_norm = std::max(diagnostics_.max_disturbance_norm, rec.disturbance_norm);

  if (step_ < total_steps_) {
    for (int i = 0; i < n; ++i) {
      auto& a = agents_[static_cast<std::size_t>(i)];
      a.x += (drift.segment(i * d, d) + u.segment(i * d, d) + sigma.segment(i * d, d)) * dt;
      if (!a.x.allFinite()) {
        std::ostringstream msg;
        msg << "non-finite state for agent " << i << " at t = " << t + dt;
        throw NumericalError(msg.str());
      }
    }
  }
  ++step_;
  return rec;
}

Trace Simulation::run() {
  Trace trace;
  trace.n_agents = cfg_.n_agents;
  trace.dim = cfg_.dim;
  trace.dt = cfg_.time.dt;
  trace.lambda1 = cfg_.smc.lambda1;
  trace.offsets = cfg_.offsets;
  trace.records.reserve(static_cast<std::size_t>(total_steps_ + 1));
  while (!done()) trace.records.push_back(step());
  trace.filaments = std::move(snapshots_);
  trace.diagnostics = diagnostics_;
  return trace;
}

Trace run_scenario(const SimConfig& cfg, ReferenceOverride override_reference) {
  return Simulation(cfg, std::move(override_reference)).run();
}

}  // namespace odorsim::sim
