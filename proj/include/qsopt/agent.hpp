#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsopt/env.hpp"
#include "qsopt/qnet.hpp"
#include "qsopt/random.hpp"
#include "qsopt/replay.hpp"

namespace qsopt {

struct AgentConfig {
  double gamma = 0.95;
  std::size_t memory_size = 2000;
  std::size_t batch_size = 128;
  double epsilon_start = 1.0;
  double epsilon_floor = 0.01;
  double epsilon_decay = 0.999;
  double learning_rate = 1e-3;
  double lr_decay = 0.995;
  int plateau_patience = 10;
  double plateau_factor = 0.5;
  /// Episodes in the return moving average watched for plateaus.
  int plateau_window = 10;
  int target_sync_every = 100;
  double entangling_weight = 2.0;

  /// Throws ConfigError.
  void validate() const;
};

using Net = QNet<float>;

/// max(floor, start * decay^k) after k selections.
double epsilon_at(const AgentConfig& cfg, std::uint64_t selections);

/// Learning-rate schedule: lr0 * decay^episode * factor^plateau_events. A
/// plateau event fires when the moving-average return has not improved for
/// `patience` consecutive episodes; the counter then restarts.
class LrSchedule {
 public:
  explicit LrSchedule(const AgentConfig& cfg) : cfg_(cfg) {}

  double lr_at(int episode) const;
  /// Records an episode's return; returns true if it triggered a plateau event.
  bool record(double episode_return);
  int plateau_events() const noexcept { return events_; }

 private:
  AgentConfig cfg_;
  std::vector<double> returns_;
  std::optional<double> best_;
  int stale_ = 0;
  int events_ = 0;
};

/// Grid and aux matrices (one column per observation).
template <class Scalar>
void stack_observations(std::span<const Observation* const> obs, typename QNet<Scalar>::Matrix& grid,
                        typename QNet<Scalar>::Matrix& aux);

/// Epsilon-greedy over valid actions; greedy ties go to the lowest id.
/// Throws TrainingError if no action is valid.
std::size_t select_action(const Net& net, const Observation& obs, double epsilon,
                          std::span<const std::uint8_t> mask, Rng& rng);

/// Argmax over valid entries of column `col`, lowest index on ties.
template <class Matrix>
Eigen::Index masked_argmax(const Matrix& q, Eigen::Index col, std::span<const std::uint8_t> mask) {
  Eigen::Index best = -1;
  for (Eigen::Index a = 0; a < q.rows(); ++a) {
    if (!mask.empty() && !mask[static_cast<std::size_t>(a)]) continue;
    if (best < 0 || q(a, col) > q(best, col)) best = a;
  }
  return best;
}

/// Double-DQN targets y = r + gamma * Q'(s', argmax_a Q(s', a)), y = r when
/// done. `next_masks[b]` restricts the argmax (empty means all actions).
template <class Matrix>
std::vector<double> td_targets(const Matrix& q_next_main, const Matrix& q_next_target, std::span<const double> rewards,
                               std::span<const std::uint8_t> done,
                               std::span<const std::vector<std::uint8_t>> next_masks, double gamma) {
  std::vector<double> y(rewards.begin(), rewards.end());
  for (std::size_t b = 0; b < y.size(); ++b) {
    if (done[b]) continue;
    const auto col = static_cast<Eigen::Index>(b);
    const std::span<const std::uint8_t> mask =
        next_masks.empty() ? std::span<const std::uint8_t>{} : std::span<const std::uint8_t>(next_masks[b]);
    const Eigen::Index a = masked_argmax(q_next_main, col, mask);
    if (a >= 0) y[b] += gamma * static_cast<double>(q_next_target(a, col));
  }
  return y;
}

/// Targets for stored transitions, evaluated with `main` (selection) and `target` (evaluation).
std::vector<double> td_targets(std::span<const Transition* const> batch, const Net& main, const Net& target,
                               double gamma);

/// One Adam step on the mean squared TD error; returns the loss before the step.
/// Throws TrainingError on a non-finite loss.
double train_step(Net& main, const Net& target, std::span<const Transition* const> batch, Adam<float>& adam,
                  double lr, double gamma);

/// DDQN learner: main and target networks, optimizer, replay and counters.
class Agent {
 public:
  Agent(const AgentConfig& cfg, const QNetShape& shape, std::uint64_t seed);

  const AgentConfig& config() const noexcept { return cfg_; }
  Net& main() noexcept { return main_; }
  const Net& main() const noexcept { return main_; }
  const Net& target() const noexcept { return target_; }
  ReplayBuffer& replay() noexcept { return replay_; }

  /// Epsilon-greedy selection at the current schedule position; advances it.
  std::size_t act(const Observation& obs, std::span<const std::uint8_t> mask);
  /// Greedy selection without touching any counter.
  std::size_t greedy(const Observation& obs, std::span<const std::uint8_t> mask) const;
  double epsilon() const { return epsilon_at(cfg_, selections_); }

  void remember(Transition t) { replay_.push(std::move(t)); }
  /// Trains on one batch if the replay holds enough; syncs the target on cadence.
  std::optional<double> learn(double lr);
  void sync_target();
  /// Replaces the target parameters (checkpoint restore); not counted as a sync.
  void set_target(const Net& net) { target_.copy_from(net); }

  std::uint64_t selections() const noexcept { return selections_; }
  std::uint64_t train_steps() const noexcept { return train_steps_; }
  std::uint64_t syncs() const noexcept { return syncs_; }

 private:
  AgentConfig cfg_;
  Net main_;
  Net target_;
  Adam<float> adam_;
  ReplayBuffer replay_;
  Rng action_rng_;
  Rng replay_rng_;
  std::uint64_t selections_ = 0;
  std::uint64_t train_steps_ = 0;
  std::uint64_t syncs_ = 0;
};

QNetShape network_shape(const EnvConfig& env, std::size_t actions);

struct StepLog {
  int episode = 0;
  int step = 0;
  std::size_t action = 0;
  std::string label;
  bool valid = true;
  bool injected = false;
  double reward = 0.0;
  double epsilon = 0.0;
  bool trained = false;
  double loss = 0.0;
  MetricsRecord metrics;
  double threshold = 0.0;
};

struct EpisodeLog {
  int episode = 0;
  std::size_t initial_index = 0;
  int steps = 0;
  double episode_return = 0.0;
  double mean_loss = 0.0;
  double epsilon = 0.0;
  double learning_rate = 0.0;
  double threshold = 0.0;  // after adjustment
  int invalid_actions = 0;
  int injections = 0;
  MetricsRecord initial;
  MetricsRecord final;
  std::uint64_t train_steps = 0;
  std::uint64_t syncs = 0;
};

struct RolloutResult {
  Circuit initial;
  MetricsRecord initial_metrics;
  /// Highest-reward circuit reached along the rollout (the initial one if nothing improves it).
  Circuit best;
  MetricsRecord best_metrics;
  double best_potential = 0.0;
  int best_step = 0;
  std::vector<std::size_t> actions;
};

/// Runs the greedy policy for one episode and keeps the best circuit seen.
RolloutResult greedy_rollout(const Agent& agent, CircuitEnv& env, const Circuit& initial, std::uint64_t seed);

struct TrainHooks {
  std::function<void(const StepLog&)> on_step;
  std::function<void(const EpisodeLog&)> on_episode;
  /// Polled once per step; training stops early when it becomes true.
  const std::atomic<bool>* stop = nullptr;
};

struct TrainResult {
  std::vector<EpisodeLog> episodes;
  bool interrupted = false;
};

/// Full training loop. Episode e starts from initials[e % size] with
/// environment seed derive_seed(seed, 1, e). Noise is switched off when
/// `env_cfg.sim.noise.during_training` is false.
TrainResult train(Agent& agent, const EnvConfig& env_cfg, std::span<const Circuit> initials, int episodes,
                  std::uint64_t seed, const TrainHooks& hooks = {});

}  // namespace qsopt
