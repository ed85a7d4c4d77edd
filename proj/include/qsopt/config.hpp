#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qsopt/agent.hpp"
#include "qsopt/env.hpp"

namespace qsopt {

/// Seeded sensor-style circuits used when no circuit files are listed.
/// `family` picks the builder: "sensor" (Hadamard layer first) or
/// "ghz_sensor" (GHZ preparation first).
struct GeneratedCircuits {
  std::string family = "sensor";
  int count = 4;
  int gates = 15;
  std::uint64_t seed = 1;
};

/// Everything one `train` run needs. Loaded from JSON:
///
///   {
///     "seed": 7, "episodes": 50, "output_dir": "out",
///     "env":       { "n_qubits", "max_gates", "max_steps", "threshold", "auto_inject",
///                    "invalid_penalty", "angles" },
///     "agent":     { "gamma", "memory_size", "batch_size", "epsilon_start", "epsilon_floor",
///                    "epsilon_decay", "learning_rate", "lr_decay", "plateau_patience",
///                    "plateau_factor", "plateau_window", "target_sync_every", "entangling_weight" },
///     "metrics":   { "shots", "weights": { "qfi", "depth", "entropy", "gates" } },
///     "simulator": { "backend", "chi_max", "trunc_tol", "max_dense_qubits" },
///     "noise":     { "enabled", "p_meas", "p_1q", "p_2q", "t1_us", "t2_us", "dur_1q_us",
///                    "dur_2q_us", "during_training", "trajectories" },
///     "initial_circuits": { "paths": [...], "generate": { "family", "count", "gates", "seed" } }
///   }
///
/// Every key is optional and defaults to the values in the structs; unknown
/// keys are errors. Relative paths resolve against the config file's directory.
struct RunConfig {
  EnvConfig env;
  AgentConfig agent;
  std::uint64_t seed = 7;
  int episodes = 50;
  std::filesystem::path output_dir = "out";
  std::vector<std::filesystem::path> initial_paths;
  GeneratedCircuits generate;

  /// Throws ConfigError naming the violated invariant.
  void validate() const;
};

/// Parses and validates. `base_dir` anchors relative paths.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
/// Canonical JSON for the effective configuration (all keys present).
std::string run_config_to_json(const RunConfig& cfg);

/// The run's initial circuits: the listed files, or generated ones.
std::vector<Circuit> initial_circuits(const RunConfig& cfg);

}  // namespace qsopt
