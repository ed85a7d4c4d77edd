#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsopt/circuit.hpp"
#include "qsopt/metrics.hpp"
#include "qsopt/simulate.hpp"

namespace qsopt {

enum class ActionKind : std::uint8_t {
  AddH,
  AddRX,
  AddRZ,
  AddCX,
  AddCZ,
  AddSwap,
  RemoveLast,    // last gate touching q
  SwapLastPair,  // last gate touching q and its list predecessor, if disjoint
  ReplaceLast,   // last single-qubit gate on q becomes H
  CancelPass,
  Inject,  // H then CX across the lowest-entropy bond
  Boost,   // CZ across every bond below the threshold
};

struct Action {
  ActionKind kind = ActionKind::CancelPass;
  int qubit = -1;  // left qubit for two-qubit additions; -1 for global actions
  double angle = 0.0;
};

/// Whether an action adds a two-qubit gate (prioritized in replay).
constexpr bool is_entangling(ActionKind k) noexcept {
  return k == ActionKind::AddCX || k == ActionKind::AddCZ || k == ActionKind::AddSwap || k == ActionKind::Inject ||
         k == ActionKind::Boost;
}

std::string action_label(const Action& a);

/// Fixed enumeration: ADD_H x n, ADD_RX x n x |angles|, ADD_RZ likewise,
/// ADD_CX/ADD_CZ/ADD_SWAP on (q, q+1) x (n-1) each, REMOVE_LAST, SWAP_LAST_PAIR
/// and REPLACE_LAST x n each, then CANCEL_PASS, INJECT, BOOST.
std::vector<Action> action_catalog(int n_qubits, std::span<const double> angles);

struct EnvConfig {
  int n_qubits = 5;
  int max_gates = 30;
  int max_steps = 50;
  double threshold = 0.7;
  /// Apply INJECT automatically after an edit that leaves entropy_norm below the threshold.
  bool auto_inject = true;
  double invalid_penalty = -0.1;
  RewardWeights weights;
  std::vector<double> angles{std::numbers::pi / 4, std::numbers::pi / 2};
  std::uint64_t shots = 5000;
  SimulatorConfig sim;

  /// Throws ConfigError.
  void validate() const;
};

inline constexpr int kObservationChannels = 9;
enum ObservationChannel : int {
  kChanEmpty,
  kChanH,
  kChanRX,
  kChanRZ,
  kChanCxControl,
  kChanCxTarget,
  kChanCZ,
  kChanSwap,
  kChanAngle,
};

/// Grid is channel-major [channel][qubit][moment] with rows = n_qubits and
/// cols = max_gates (no circuit can be deeper). Aux holds the normalized
/// per-bond entropies, then qfi_norm, depth / max_gates, gates / max_gates.
struct Observation {
  int rows = 0;
  int cols = 0;
  std::vector<float> grid;
  std::vector<float> aux;

  friend bool operator==(const Observation&, const Observation&) = default;
};

inline int observation_aux_size(int n_qubits) { return n_qubits - 1 + 3; }

Observation encode_observation(const Circuit& c, const MetricsRecord& m, const EnvConfig& cfg);

/// clamp(0.9 t + 0.1 mean_entropy, 0.5, 0.95).
double adjust_threshold(double threshold, double mean_entropy);

/// Result of applying `a` to `c`, or nullopt when the action is invalid there.
/// `bond_norm` are the normalized entropies of `c` (used by INJECT and BOOST).
std::optional<Circuit> apply_action(const Circuit& c, const Action& a, std::span<const double> bond_norm,
                                    double threshold, int max_gates);

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool done = false;
  bool valid = true;
  bool injected = false;
  MetricsRecord metrics;
  std::vector<std::uint8_t> mask;
};

/// Circuit-editing MDP. Step rewards are differences of the weighted reward
/// evaluated against the episode's initial circuit, so they sum to the
/// episode-level reward (plus any invalid-action penalties).
class CircuitEnv {
 public:
  explicit CircuitEnv(EnvConfig cfg);

  const EnvConfig& config() const noexcept { return cfg_; }
  const std::vector<Action>& catalog() const noexcept { return catalog_; }
  std::size_t action_count() const noexcept { return catalog_.size(); }

  Observation reset(const Circuit& initial, std::uint64_t seed);
  StepResult step(std::size_t action);

  std::vector<std::uint8_t> valid_mask() const;
  bool is_valid(std::size_t action) const;

  const Circuit& circuit() const;
  const MetricsRecord& metrics() const noexcept { return current_; }
  const MetricsRecord& baseline() const noexcept { return baseline_; }
  int steps_taken() const noexcept { return steps_; }
  /// Weighted reward of the current circuit against the episode baseline.
  double potential() const noexcept { return potential_; }

  double threshold() const noexcept { return threshold_; }
  void set_threshold(double t) { threshold_ = t; }
  /// Mean entropy_norm over the episode's steps (baseline if none).
  double episode_mean_entropy() const;
  /// Applies adjust_threshold with the episode mean and returns the new threshold.
  double end_episode();

 private:
  MetricsRecord measure(const Circuit& c, std::uint64_t seed) const;
  void require_reset() const;

  EnvConfig cfg_;
  std::vector<Action> catalog_;
  std::optional<Circuit> circuit_;
  MetricsRecord baseline_;
  MetricsRecord current_;
  double potential_ = 0.0;
  double threshold_;
  std::uint64_t seed_ = 0;
  int steps_ = 0;
  double entropy_sum_ = 0.0;
};

}  // namespace qsopt
