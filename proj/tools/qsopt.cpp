// qsopt command-line driver.
//
// Exit codes: 0 success, 1 configuration or input error, 2 runtime failure
// (including an interrupted training run, which still leaves its partial outputs).

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsopt/agent.hpp"
#include "qsopt/checkpoint.hpp"
#include "qsopt/circuit_text.hpp"
#include "qsopt/config.hpp"
#include "qsopt/error.hpp"
#include "qsopt/metrics.hpp"
#include "qsopt/report.hpp"
#include "qsopt/simulate.hpp"

namespace fs = std::filesystem;
using namespace qsopt;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::atomic<bool> g_stop{false};

extern "C" void on_sigint(int) { g_stop.store(true); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
  if (!os) throw Error("failed writing " + path.string());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void check_fits(const Circuit& c, const EnvConfig& env, const std::string& what) {
  if (c.n_qubits() != env.n_qubits) {
    throw ConfigError(what + " has " + std::to_string(c.n_qubits()) + " qubits but env.n_qubits is " +
                      std::to_string(env.n_qubits));
  }
  if (static_cast<int>(c.size()) > env.max_gates) {
    throw ConfigError(what + " has " + std::to_string(c.size()) + " gates, more than env.max_gates = " +
                      std::to_string(env.max_gates));
  }
}

// ---- train -------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string output_dir;
  std::optional<int> episodes;
  std::optional<std::uint64_t> seed;
  bool no_noise = false;
  bool quiet = false;
};

int cmd_train(const TrainArgs& args) {
  RunConfig cfg = load_run_config(args.config);
  if (args.episodes) cfg.episodes = *args.episodes;
  if (args.seed) cfg.seed = *args.seed;
  if (!args.output_dir.empty()) cfg.output_dir = args.output_dir;
  if (args.no_noise) cfg.env.sim.noise.enabled = false;
  cfg.validate();

  const std::vector<Circuit> initials = initial_circuits(cfg);
  for (std::size_t i = 0; i < initials.size(); ++i) check_fits(initials[i], cfg.env, "initial circuit " + std::to_string(i));

  fs::create_directories(cfg.output_dir);
  const fs::path out = cfg.output_dir;
  fs::remove(out / "PARTIAL");
  write_file(out / "config_used.json", run_config_to_json(cfg));

  const std::size_t actions = action_catalog(cfg.env.n_qubits, cfg.env.angles).size();
  Agent agent(cfg.agent, network_shape(cfg.env, actions), cfg.seed);

  CsvFile episodes_csv(out / "episodes.csv", episodes_csv_header());
  CsvFile steps_csv(out / "steps.csv", steps_csv_header());
  CsvFile timing_csv(out / "timing.csv", "episode,seconds,steps");

  g_stop.store(false);
  auto previous = std::signal(SIGINT, on_sigint);
  auto t_episode = std::chrono::steady_clock::now();

  TrainHooks hooks;
  hooks.stop = &g_stop;
  hooks.on_step = [&](const StepLog& s) { steps_csv.row(step_csv_row(s)); };
  hooks.on_episode = [&](const EpisodeLog& e) {
    episodes_csv.row(episode_csv_row(e));
    timing_csv.row(std::to_string(e.episode) + "," + format_number(seconds_since(t_episode)) + "," +
                   std::to_string(e.steps));
    t_episode = std::chrono::steady_clock::now();
    if (!args.quiet) {
      std::fprintf(stderr, "episode %d/%d return %+.4f qfi %.3f entropy %.3f depth %d gates %d eps %.3f\n",
                   e.episode + 1, cfg.episodes, e.episode_return, e.final.qfi_norm, e.final.entropy_norm,
                   e.final.depth, e.final.gates, e.epsilon);
    }
  };

  TrainResult result;
  try {
    result = train(agent, cfg.env, initials, cfg.episodes, cfg.seed, hooks);
  } catch (...) {
    std::signal(SIGINT, previous);
    throw;
  }
  std::signal(SIGINT, previous);

  save_checkpoint(make_checkpoint(agent), out / "checkpoint.bin");

  if (result.interrupted) {
    write_file(out / "PARTIAL", "interrupted after " + std::to_string(result.episodes.size()) + " of " +
                                    std::to_string(cfg.episodes) + " episodes\n");
    std::cerr << "interrupted; partial outputs in " << out.string() << "\n";
    return kExitRuntime;
  }

  // Evaluate the trained policy from every initial circuit. Like `optimize`, the
  // rollout starts from the configured threshold, not the one adapted in training.
  std::vector<SummaryRow> rows;
  for (std::size_t i = 0; i < initials.size(); ++i) {
    CircuitEnv env(cfg.env);
    const RolloutResult r = greedy_rollout(agent, env, initials[i], derive_seed(cfg.seed, 6, i));
    const std::string suffix = i == 0 ? "" : "_" + std::to_string(i);
    save_circuit(r.initial, out / ("initial_circuit" + suffix + ".qc"));
    save_circuit(r.best, out / ("final_circuit" + suffix + ".qc"));
    rows.push_back({"circuit_" + std::to_string(i), cfg.env.n_qubits, r.initial_metrics, r.best_metrics});
  }
  write_file(out / "summary.txt", summary_table(rows));
  if (!args.quiet) std::cerr << summary_table(rows);
  return kExitOk;
}

// ---- optimize ----------------------------------------------------------

struct OptimizeArgs {
  std::string checkpoint;
  std::string circuit;
  std::string config;
  std::string out;
  std::uint64_t seed = 7;
};

int cmd_optimize(const OptimizeArgs& args) {
  const Circuit c = load_circuit(args.circuit);
  EnvConfig env_cfg;
  if (!args.config.empty()) {
    env_cfg = load_run_config(args.config).env;
  } else {
    env_cfg.n_qubits = c.n_qubits();
  }
  const Checkpoint ckpt = load_checkpoint(args.checkpoint);
  const std::size_t actions = action_catalog(env_cfg.n_qubits, env_cfg.angles).size();
  const QNetShape expected = network_shape(env_cfg, actions);
  if (ckpt.shape.rows != expected.rows || ckpt.shape.cols != expected.cols || ckpt.shape.actions != expected.actions) {
    throw ConfigError("checkpoint was trained for " + std::to_string(ckpt.shape.rows) + " qubits, " +
                      std::to_string(ckpt.shape.cols) + " gates and " + std::to_string(ckpt.shape.actions) +
                      " actions; pass the training config with --config");
  }
  check_fits(c, env_cfg, "circuit");
  const Agent agent = restore_agent(ckpt);
  CircuitEnv env(env_cfg);
  const RolloutResult r = greedy_rollout(agent, env, c, args.seed);
  const std::string text = emit_circuit(r.best);
  if (args.out.empty()) {
    std::cout << text;
  } else {
    write_file(args.out, text);
  }
  const SummaryRow row{"circuit", c.n_qubits(), r.initial_metrics, r.best_metrics};
  std::cerr << summary_table({&row, 1});
  return kExitOk;
}

// ---- simulate / compare -----------------------------------------------

struct SimRun {
  OutcomeCounts counts;
  std::vector<double> entropies;
  double entropy_norm = 0.0;
  double seconds = 0.0;
  std::size_t memory_bytes = 0;
  Distribution exact;
};

void check_dense_cap(const Circuit& c, const SimulatorConfig& sim) {
  const int cap = std::min(sim.max_dense_qubits, kStatevectorMaxCap);
  if (c.n_qubits() > cap) {
    throw ConfigError("statevector backend is limited to " + std::to_string(cap) + " qubits; circuit has " +
                      std::to_string(c.n_qubits()));
  }
}

SimRun run_backend(const Circuit& c, const SimulatorConfig& sim, std::uint64_t shots, std::uint64_t seed,
                   bool want_exact) {
  SimRun r;
  const auto t0 = std::chrono::steady_clock::now();
  if (sim.backend == Backend::Statevector) {
    check_dense_cap(c, sim);
    const DenseState s = run_statevector(c, sim.max_dense_qubits);
    r.memory_bytes = s.memory_bytes();
    r.entropies.resize(static_cast<std::size_t>(std::max(0, c.n_qubits() - 1)));
    for (int k = 1; k < c.n_qubits(); ++k) r.entropies[static_cast<std::size_t>(k - 1)] = exact_bond_entropy(s, k);
    if (want_exact) r.exact = exact_distribution(s);
  } else {
    MpsState s = run_mps(c, sim.mps);
    r.memory_bytes = s.peak_stats().memory_estimate_bytes;
    r.entropies = s.bond_entropies();
    if (want_exact) r.exact = exact_circuit_distribution(c, sim);
  }
  r.counts = sample_circuit(c, sim, shots, seed);
  r.seconds = seconds_since(t0);
  r.entropy_norm = entropy_norm(r.entropies, c.n_qubits(), effective_chi(sim));
  return r;
}

json counts_json(const OutcomeCounts& oc) {
  json j = json::object();
  for (const auto& [bits, n] : oc.counts) j[bits_to_string(bits, oc.n_qubits)] = n;
  return j;
}

struct SimArgs {
  std::string circuit;
  std::string backend = "mps";
  std::uint64_t shots = 5000;
  std::uint64_t seed = 7;
  int chi_max = MpsOptions{}.chi_max;
  int max_dense_qubits = kStatevectorDefaultCap;
  bool noise = false;
};

SimulatorConfig sim_config(const SimArgs& a) {
  SimulatorConfig sim;
  sim.backend = parse_backend(a.backend);
  sim.mps.chi_max = a.chi_max;
  sim.max_dense_qubits = a.max_dense_qubits;
  if (a.noise) sim.noise = NoiseParams::standard();
  if (a.chi_max < 1) throw ConfigError("chi_max must be at least 1");
  if (a.max_dense_qubits < 1 || a.max_dense_qubits > kStatevectorMaxCap) {
    throw ConfigError("max_dense_qubits must lie in [1, " + std::to_string(kStatevectorMaxCap) + "]");
  }
  return sim;
}

int cmd_simulate(const SimArgs& args) {
  const SimulatorConfig sim = sim_config(args);
  const Circuit c = load_circuit(args.circuit);
  if (sim.backend == Backend::Statevector) check_dense_cap(c, sim);
  const SimRun r = run_backend(c, sim, args.shots, args.seed, false);
  json j = {{"backend", std::string(backend_name(sim.backend))},
            {"qubits", c.n_qubits()},
            {"shots", args.shots},
            {"seed", args.seed},
            {"noise", sim.noise.enabled},
            {"counts", counts_json(r.counts)},
            {"bond_entropies", r.entropies},
            {"entropy_norm", r.entropy_norm},
            {"depth", depth(c)},
            {"gates", c.size()},
            {"wall_seconds", r.seconds},
            {"memory_bytes", r.memory_bytes}};
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int cmd_compare(const SimArgs& args) {
  const Circuit c = load_circuit(args.circuit);
  SimulatorConfig dense = sim_config(args);
  dense.backend = Backend::Statevector;
  check_dense_cap(c, dense);
  SimulatorConfig mps = dense;
  mps.backend = Backend::Mps;
  const SimRun a = run_backend(c, mps, args.shots, args.seed, true);
  const SimRun b = run_backend(c, dense, args.shots, args.seed, true);
  const auto side = [&](const SimRun& r) {
    return json{{"wall_seconds", r.seconds},
                {"memory_bytes", r.memory_bytes},
                {"bond_entropies", r.entropies},
                {"entropy_norm", r.entropy_norm},
                {"counts", counts_json(r.counts)}};
  };
  json j = {{"qubits", c.n_qubits()},
            {"shots", args.shots},
            {"seed", args.seed},
            {"chi_max", args.chi_max},
            {"tv_exact", total_variation(a.exact, b.exact)},
            {"tv_sampled", total_variation(a.counts.distribution(), b.counts.distribution())},
            {"mps", side(a)},
            {"statevector", side(b)}};
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

// ---- report ------------------------------------------------------------

int cmd_report(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("run directory " + dir + " does not exist");
  for (const char* f : {"episodes.csv", "initial_circuit.qc", "final_circuit.qc"}) {
    if (!fs::exists(fs::path(dir) / f)) throw ConfigError("missing run output " + (fs::path(dir) / f).string());
  }
  for (const std::string& name : write_report(dir)) std::cout << (fs::path(dir) / name).string() << "\n";
  return kExitOk;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CircuitError& e) {
    std::cerr << "invalid circuit: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reinforcement-learning optimizer for quantum sensing circuits"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train an agent from a JSON run config");
  train_cmd->add_option("--config", train_args.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--output-dir", train_args.output_dir, "Override output_dir");
  train_cmd->add_option("--episodes", train_args.episodes, "Override episodes");
  train_cmd->add_option("--seed", train_args.seed, "Override seed");
  train_cmd->add_flag("--no-noise", train_args.no_noise, "Disable the noise model");
  train_cmd->add_flag("-q,--quiet", train_args.quiet, "No progress output");

  OptimizeArgs opt_args;
  auto* opt_cmd = app.add_subcommand("optimize", "Run a trained policy on one circuit");
  opt_cmd->add_option("--checkpoint", opt_args.checkpoint)->required()->check(CLI::ExistingFile);
  opt_cmd->add_option("--circuit", opt_args.circuit)->required()->check(CLI::ExistingFile);
  opt_cmd->add_option("--config", opt_args.config, "Training config (for env settings)")->check(CLI::ExistingFile);
  opt_cmd->add_option("--out", opt_args.out, "Write the optimized circuit here instead of stdout");
  opt_cmd->add_option("--seed", opt_args.seed);

  SimArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Sample a circuit and report entanglement and cost");
  SimArgs cmp_args;
  auto* cmp_cmd = app.add_subcommand("compare", "Run MPS and statevector on the same circuit");
  for (auto [cmd, a] : {std::pair{sim_cmd, &sim_args}, std::pair{cmp_cmd, &cmp_args}}) {
    cmd->add_option("--circuit", a->circuit)->required()->check(CLI::ExistingFile);
    cmd->add_option("--shots", a->shots);
    cmd->add_option("--seed", a->seed);
    cmd->add_option("--chi", a->chi_max, "MPS bond-dimension cap");
    cmd->add_option("--max-dense-qubits", a->max_dense_qubits);
    cmd->add_flag("--noise", a->noise, "Sample with the default noise model");
  }
  sim_cmd->add_option("--backend", sim_args.backend)->check(CLI::IsMember({"mps", "statevector"}));

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "Write curves and composition charts for a run");
  report_cmd->add_option("--dir", report_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  if (*train_cmd) return guarded([&] { return cmd_train(train_args); });
  if (*opt_cmd) return guarded([&] { return cmd_optimize(opt_args); });
  if (*sim_cmd) return guarded([&] { return cmd_simulate(sim_args); });
  if (*cmp_cmd) return guarded([&] { return cmd_compare(cmp_args); });
  if (*report_cmd) return guarded([&] { return cmd_report(report_dir); });
  return kExitConfig;
}
