#include "cli.hpp"

#include <odorsim/graph.hpp>
#include <odorsim/plot.hpp>
#include <odorsim/scenario.hpp>
#include <odorsim/sim.hpp>
#include <odorsim/smc.hpp>
#include <odorsim/trace_io.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace odorsim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kOutDirEnv = "ODORSIM_OUT_DIR";
constexpr const char* kVersion = "0.1.0";

struct ScenarioOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool casting_literal = false;
};

std::string default_out_dir() {
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return "odorsim_out";
}

void add_scenario_options(CLI::App* cmd, ScenarioOptions& o) {
  cmd->add_option("--config", o.config, "built-in scenario name or scenario/manifest JSON file")
      ->required();
  cmd->add_option("--seed", o.seed, "override the scenario seed");
  cmd->add_option("--set", o.sets, "override a key, e.g. --set smc.mu=6 (repeatable)");
  cmd->add_flag("--casting-literal", o.casting_literal,
                "casting waypoint |x - x_hat|/2 + x_hat instead of the midpoint");
}

scenario::LoadedScenario load(const ScenarioOptions& o, bool structural = true) {
  std::vector<std::string> overrides = o.sets;
  if (o.seed) overrides.push_back(fmt::format("seed={}", *o.seed));
  if (o.casting_literal) overrides.emplace_back("planner.casting=literal");
  return scenario::load_scenario(scenario::resolve_scenario_text(o.config), overrides, structural);
}

double disturbance_bound(const sim::SimConfig& c) {
  return c.dynamics.disturbance == sim::DisturbanceKind::None ? 0.0
                                                              : c.dynamics.disturbance_amplitude;
}

json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json gain_json(const smc::GainReport& g, double empirical_push, double mu) {
  return json{
      {"disturbance_bound", g.disturbance_bound},
      {"w_condition", g.w_condition},
      {"w_margin", g.w_margin},
      {"coupling_norm", g.coupling_norm},
      {"mu_condition_conservative", g.mu_condition},
      {"mu_margin_conservative", g.mu_margin},
      {"mu_margin_empirical", mu - empirical_push},
      {"empirical_disturbance_push", empirical_push},
      {"certified_radius", g.certified_radius},
      {"ultimate_bound", g.ultimate_bound},
  };
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

int execute_run(const scenario::LoadedScenario& sc, const fs::path& out_dir, bool jsonl,
                std::ostream& out, std::ostream& err) {
  const auto& cfg = sc.config;
  const auto matrices = graph::build_matrices(cfg.topology);
  const auto gains = smc::gain_check(cfg.smc, matrices.coupling, disturbance_bound(cfg));
  if (cfg.controller == sim::ControllerKind::SlidingMode && !gains.passes()) {
    err << fmt::format(
        "warning: gain conditions not met (w margin {:.4g}, conservative mu margin {:.4g}); "
        "running with empirical monitoring\n",
        gains.w_margin, gains.mu_margin);
  }

  sim::Trace trace;
  try {
    trace = sim::run_scenario(cfg);
  } catch (const NumericalError& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  }
  if (trace.diagnostics.gamma_floor_events > 0) {
    err << fmt::format("warning: Gamma floored at {:g} in {} evaluations\n", smc::kGammaFloor,
                       trace.diagnostics.gamma_floor_events);
  }

  fs::create_directories(out_dir);
  {
    std::ofstream f(out_dir / "trace.csv", std::ios::binary);
    trace_io::write_csv(trace, f);
  }
  if (jsonl) {
    std::ofstream f(out_dir / "trace.jsonl", std::ios::binary);
    trace_io::write_jsonl(trace, f);
  }

  const auto m = sim::consensus_metrics(trace, cfg.theta);
  json metrics{
      {"theta", cfg.theta},
      {"time_to_consensus", number_or_inf(m.time_to_consensus)},
      {"final_max_gap", m.final_max_gap},
      {"final_tracking_error", m.final_tracking_error},
      {"final_distance_to_source", m.final_distance_to_source},
      {"within_theta_of_source", m.final_distance_to_source <= cfg.theta},
      {"max_abs_s", m.max_abs_s},
      {"chattering_index", m.chattering_index},
      {"control_energy", m.control_energy},
      {"gamma_floor_events", trace.diagnostics.gamma_floor_events},
      {"max_disturbance_norm", trace.diagnostics.max_disturbance_norm},
      {"gains", gain_json(gains, trace.diagnostics.empirical_disturbance_push, cfg.smc.mu)},
  };
  write_file(out_dir / "metrics.json", metrics.dump(2) + "\n");

  json manifest{
      {"tool", "odorsim"},
      {"version", kVersion},
      {"schema_version", scenario::kSchemaVersion},
      {"config_hash", fmt::format("{:016x}", sc.hash)},
      {"seed", cfg.seed},
      {"files", jsonl ? json{"trace.csv", "trace.jsonl", "metrics.json"}
                      : json{"trace.csv", "metrics.json"}},
      {"config", json::parse(sc.canonical_json)},
  };
  write_file(out_dir / "run_manifest.json", manifest.dump(2) + "\n");

  out << fmt::format("wrote {} records to {}\n", trace.records.size(), (out_dir / "trace.csv").string());
  out << fmt::format("time to consensus (theta = {:g}): {}\n", cfg.theta,
                     std::isinf(m.time_to_consensus) ? std::string("never")
                                                     : fmt::format("{:.3f} s", m.time_to_consensus));
  out << fmt::format("final max gap {:.3e}, final tracking error {:.3e}, distance to source {:.3e}\n",
                     m.final_max_gap, m.final_tracking_error, m.final_distance_to_source);
  return kOk;
}

int cmd_run(const ScenarioOptions& o, const std::string& out_dir, bool jsonl, std::ostream& out,
            std::ostream& err) {
  const auto sc = load(o);
  return execute_run(sc, out_dir, jsonl, out, err);
}

int cmd_batch(const ScenarioOptions& o, const std::vector<std::uint64_t>& seeds, int jobs,
              const std::string& out_dir, std::ostream& out, std::ostream& err) {
  std::vector<scenario::LoadedScenario> runs;
  for (auto seed : seeds) {
    ScenarioOptions each = o;
    each.seed = seed;
    runs.push_back(load(each));
  }
  jobs = std::max(1, jobs);
  std::vector<int> codes(runs.size(), kOk);
  std::vector<std::string> logs(runs.size());
  for (std::size_t begin = 0; begin < runs.size(); begin += static_cast<std::size_t>(jobs)) {
    const std::size_t end = std::min(runs.size(), begin + static_cast<std::size_t>(jobs));
    std::vector<std::future<void>> pending;
    for (std::size_t k = begin; k < end; ++k) {
      pending.push_back(std::async(std::launch::async, [&, k] {
        std::ostringstream o_log;
        std::ostringstream e_log;
        const fs::path dir = fs::path(out_dir) / fmt::format("seed_{}", runs[k].config.seed);
        codes[k] = execute_run(runs[k], dir, false, o_log, e_log);
        logs[k] = o_log.str() + e_log.str();
      }));
    }
    for (auto& f : pending) f.get();
  }
  int worst = kOk;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    out << fmt::format("[seed {}] exit {}\n{}", runs[k].config.seed, codes[k], logs[k]);
    worst = std::max(worst, codes[k]);
  }
  (void)err;
  return worst;
}

int cmd_plot(const std::string& trace_path, const std::string& selector,
             std::optional<std::string> out_dir, std::optional<double> lambda1, std::ostream& out,
             std::ostream& err) {
  std::vector<plot::Figure> figures;
  try {
    figures = plot::parse_figure_selector(selector);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  }
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) {
    err << "error: cannot read trace " << trace_path << '\n';
    return kInvalidConfig;
  }
  const auto table = trace_io::TraceTable::read_csv(in);
  const fs::path trace_dir = fs::path(trace_path).parent_path();
  if (!lambda1) {
    std::ifstream mf(trace_dir / "run_manifest.json");
    if (mf) {
      const json manifest = json::parse(mf, nullptr, false);
      if (!manifest.is_discarded() && manifest.contains("config")) {
        lambda1 = manifest["config"]["smc"]["lambda1"].get<double>();
      }
    }
  }
  const double l1 = lambda1.value_or(smc::SmcParams{}.lambda1);
  const fs::path dir = out_dir ? fs::path(*out_dir) : trace_dir;
  if (!dir.empty()) fs::create_directories(dir);
  for (auto f : figures) {
    const auto path = dir / plot::file_name(f);
    write_file(path, plot::render_svg(plot::extract_figure(table, f, l1)));
    out << "wrote " << path.string() << '\n';
  }
  return kOk;
}

int cmd_check(const ScenarioOptions& o, std::ostream& out) {
  const auto sc = load(o, /*structural=*/false);
  const auto& cfg = sc.config;
  const auto m = graph::build_matrices(cfg.topology);

  std::string leaders;
  for (int i = 0; i < cfg.n_agents; ++i) {
    if (cfg.topology.leader_flags[static_cast<std::size_t>(i)]) {
      leaders += leaders.empty() ? std::to_string(i + 1) : "," + std::to_string(i + 1);
    }
  }
  const bool tree = graph::has_leader_spanning_tree(cfg.topology);
  const int rank = graph::matrix_rank(m.coupling);
  const bool nonsingular = graph::h_is_nonsingular(m);
  out << fmt::format("topology: {} agents, leader-linked agents {{{}}}\n", cfg.n_agents, leaders);
  out << fmt::format("spanning tree rooted at virtual leader: {}\n", tree ? "yes" : "NO");
  out << fmt::format("H = L + B: rank {}/{}, det {:.6g} -> {}\n", rank, cfg.n_agents,
                     graph::determinant(m.coupling), nonsingular ? "nonsingular" : "SINGULAR");
  if (!tree || !nonsingular) {
    out << "structural check FAILED: H is invertible only if the virtual leader reaches every "
           "agent through a directed spanning tree\n";
    return kSingularCoupling;
  }

  const double bound = disturbance_bound(cfg);
  const auto g = smc::gain_check(cfg.smc, m.coupling, bound);
  out << fmt::format("disturbance bound sigma_max: {:g}\n", bound);
  out << fmt::format("w condition  w > sigma_max: {} (w = {:g}, margin {:.4g})\n",
                     g.w_condition ? "PASS" : "FAIL", cfg.smc.w_gain, g.w_margin);
  out << fmt::format(
      "mu condition, conservative  mu > ||Lambda H||_inf sigma_max = {:.4g} * {:g}: {} (margin {:.4g})\n",
      g.coupling_norm, bound, g.mu_condition ? "PASS" : "FAIL", g.mu_margin);

  std::string empirical = "unavailable";
  try {
    auto probe = cfg;
    probe.record_filaments = false;
    const auto trace = sim::run_scenario(probe);
    const double push = trace.diagnostics.empirical_disturbance_push;
    const double margin = cfg.smc.mu - push;
    empirical = fmt::format("{} (sup |Lambda Gamma_i (H sigma)_i| = {:.4g}, margin {:.4g})",
                            margin > 0.0 ? "PASS" : "FAIL", push, margin);
  } catch (const std::exception& e) {
    empirical = fmt::format("unavailable ({})", e.what());
  }
  out << "mu condition, empirical over the scenario run: " << empirical << '\n';
  out << fmt::format(
      "discrepancy: the conservative bound takes Gamma = 1. ||Lambda H||_inf = {:.4g} alone exceeds "
      "mu = {:g}; only the factor sigma_max brings the worst case to {:.4g}. It also certifies the "
      "reaching law only where asinh(m + w|s|) >= 1, i.e. |s| >= {:.4g}; for |s| < {:.4g} the "
      "worst-case disturbance can outweigh it. The empirical margin uses the Gamma actually seen.\n",
      g.coupling_norm, cfg.smc.mu, g.coupling_norm * bound * g.gamma_sup, g.certified_radius,
      g.ultimate_bound);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"odorsim: cooperative odour-source localisation simulator"};
  app.require_subcommand(1);

  ScenarioOptions run_opts;
  std::string run_out = default_out_dir();
  bool run_jsonl = false;
  auto* run_cmd = app.add_subcommand("run", "simulate a scenario and write trace, metrics, manifest");
  add_scenario_options(run_cmd, run_opts);
  run_cmd->add_option("--out", run_out, fmt::format("output directory (default ${} or odorsim_out)", kOutDirEnv));
  run_cmd->add_flag("--jsonl", run_jsonl, "also write trace.jsonl");

  ScenarioOptions batch_opts;
  std::vector<std::uint64_t> batch_seeds;
  int batch_jobs = 4;
  std::string batch_out = default_out_dir();
  auto* batch_cmd = app.add_subcommand("batch", "run one scenario over several seeds in parallel");
  add_scenario_options(batch_cmd, batch_opts);
  batch_cmd->add_option("--seeds", batch_seeds, "comma separated seeds")->required()->delimiter(',');
  batch_cmd->add_option("--jobs", batch_jobs, "concurrent runs");
  batch_cmd->add_option("--out", batch_out, "output directory; one seed_<n> subdirectory per run");

  std::string plot_trace;
  std::string plot_fig = "all";
  std::optional<std::string> plot_out;
  std::optional<double> plot_lambda1;
  auto* plot_cmd = app.add_subcommand("plot", "render SVG figures from a trace.csv");
  plot_cmd->add_option("--trace", plot_trace, "trace.csv written by run")->required();
  plot_cmd->add_option("--fig", plot_fig, "all, states, error, controls or manifolds");
  plot_cmd->add_option("--out", plot_out, "output directory (default: next to the trace)");
  plot_cmd->add_option("--lambda1", plot_lambda1, "manifold envelope (default: from run_manifest.json)");

  ScenarioOptions check_opts;
  auto* check_cmd = app.add_subcommand("check", "report graph structure and gain conditions");
  add_scenario_options(check_cmd, check_opts);

  std::string show_name;
  auto* list_cmd = app.add_subcommand("scenarios", "list built-in scenarios or print one resolved");
  list_cmd->add_option("name", show_name, "print the fully resolved configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_opts, run_out, run_jsonl, out, err);
    if (*batch_cmd) return cmd_batch(batch_opts, batch_seeds, batch_jobs, batch_out, out, err);
    if (*plot_cmd) return cmd_plot(plot_trace, plot_fig, plot_out, plot_lambda1, out, err);
    if (*check_cmd) return cmd_check(check_opts, out);
    if (*list_cmd) {
      if (show_name.empty()) {
        for (const auto& n : scenario::canned_names()) out << n << '\n';
        return kOk;
      }
      out << scenario::load_scenario(scenario::resolve_scenario_text(show_name)).canonical_json
          << '\n';
      return kOk;
    }
  } catch (const sim::ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const NumericalError& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidConfig;
  }
  return kUsage;
}

}  // namespace odorsim::cli
