#include "qsopt/agent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qsopt/error.hpp"

namespace qsopt {

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("agent.gamma must lie in (0, 1)");
  if (memory_size == 0) throw ConfigError("agent.memory_size must be positive");
  if (batch_size == 0) throw ConfigError("agent.batch_size must be positive");
  if (batch_size > memory_size) throw ConfigError("agent.batch_size may not exceed agent.memory_size");
  if (!(epsilon_start > 0.0 && epsilon_start <= 1.0)) throw ConfigError("agent.epsilon_start must lie in (0, 1]");
  if (!(epsilon_floor > 0.0 && epsilon_floor < epsilon_start)) {
    throw ConfigError("agent.epsilon_floor must be positive and below agent.epsilon_start");
  }
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) throw ConfigError("agent.epsilon_decay must lie in (0, 1]");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("agent.learning_rate must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ConfigError("agent.lr_decay must lie in (0, 1]");
  if (plateau_patience < 1) throw ConfigError("agent.plateau_patience must be positive");
  if (!(plateau_factor > 0.0 && plateau_factor <= 1.0)) throw ConfigError("agent.plateau_factor must lie in (0, 1]");
  if (plateau_window < 1) throw ConfigError("agent.plateau_window must be positive");
  if (target_sync_every < 1) throw ConfigError("agent.target_sync_every must be positive");
  if (!(entangling_weight > 0.0) || !std::isfinite(entangling_weight)) {
    throw ConfigError("agent.entangling_weight must be positive");
  }
}

double epsilon_at(const AgentConfig& cfg, std::uint64_t selections) {
  return std::max(cfg.epsilon_floor, cfg.epsilon_start * std::pow(cfg.epsilon_decay, static_cast<double>(selections)));
}

double LrSchedule::lr_at(int episode) const {
  return cfg_.learning_rate * std::pow(cfg_.lr_decay, episode) * std::pow(cfg_.plateau_factor, events_);
}

bool LrSchedule::record(double episode_return) {
  returns_.push_back(episode_return);
  const std::size_t window = std::min(returns_.size(), static_cast<std::size_t>(cfg_.plateau_window));
  const double average =
      std::accumulate(returns_.end() - static_cast<std::ptrdiff_t>(window), returns_.end(), 0.0) /
      static_cast<double>(window);
  if (!best_ || average > *best_) {
    best_ = average;
    stale_ = 0;
    return false;
  }
  if (++stale_ < cfg_.plateau_patience) return false;
  ++events_;
  stale_ = 0;
  return true;
}

template <class Scalar>
void stack_observations(std::span<const Observation* const> obs, typename QNet<Scalar>::Matrix& grid,
                        typename QNet<Scalar>::Matrix& aux) {
  if (obs.empty()) throw TrainingError("empty observation batch");
  const auto g = static_cast<Eigen::Index>(obs[0]->grid.size());
  const auto x = static_cast<Eigen::Index>(obs[0]->aux.size());
  const auto b = static_cast<Eigen::Index>(obs.size());
  grid.resize(g, b);
  aux.resize(x, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const Observation& o = *obs[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(o.grid.size()) != g || static_cast<Eigen::Index>(o.aux.size()) != x) {
      throw TrainingError("observations in a batch differ in shape");
    }
    for (Eigen::Index k = 0; k < g; ++k) grid(k, i) = static_cast<Scalar>(o.grid[static_cast<std::size_t>(k)]);
    for (Eigen::Index k = 0; k < x; ++k) aux(k, i) = static_cast<Scalar>(o.aux[static_cast<std::size_t>(k)]);
  }
}

template void stack_observations<float>(std::span<const Observation* const>, QNet<float>::Matrix&,
                                        QNet<float>::Matrix&);
template void stack_observations<double>(std::span<const Observation* const>, QNet<double>::Matrix&,
                                         QNet<double>::Matrix&);

namespace {

Net::Matrix q_values(const Net& net, const Observation& obs) {
  Net::Matrix grid, aux;
  const Observation* one[] = {&obs};
  stack_observations<float>(one, grid, aux);
  return net.forward(grid, aux);
}

}  // namespace

std::size_t select_action(const Net& net, const Observation& obs, double epsilon,
                          std::span<const std::uint8_t> mask, Rng& rng) {
  const auto valid = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
  if (valid == 0) throw TrainingError("no valid action to select");
  if (rng.uniform() < epsilon) {
    std::uint64_t pick = rng.below(valid);
    for (std::size_t a = 0; a < mask.size(); ++a) {
      if (mask[a] && pick-- == 0) return a;
    }
  }
  return static_cast<std::size_t>(masked_argmax(q_values(net, obs), 0, mask));
}

std::vector<double> td_targets(std::span<const Transition* const> batch, const Net& main, const Net& target,
                               double gamma) {
  std::vector<const Observation*> next;
  std::vector<double> rewards;
  std::vector<std::uint8_t> done;
  std::vector<std::vector<std::uint8_t>> masks;
  for (const Transition* t : batch) {
    next.push_back(&t->next);
    rewards.push_back(t->reward);
    done.push_back(t->done ? 1 : 0);
    masks.push_back(t->next_mask);
  }
  Net::Matrix grid, aux;
  stack_observations<float>(next, grid, aux);
  return td_targets(main.forward(grid, aux), target.forward(grid, aux), rewards, done, masks, gamma);
}

double train_step(Net& main, const Net& target, std::span<const Transition* const> batch, Adam<float>& adam,
                  double lr, double gamma) {
  const std::vector<double> y = td_targets(batch, main, target, gamma);
  std::vector<const Observation*> states;
  for (const Transition* t : batch) states.push_back(&t->state);
  Net::Matrix grid, aux;
  stack_observations<float>(states, grid, aux);
  Net::Cache cache;
  const Net::Matrix q = main.forward(grid, aux, &cache);

  const auto n = static_cast<double>(batch.size());
  Net::Matrix dq = Net::Matrix::Zero(q.rows(), q.cols());
  double loss = 0.0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto a = static_cast<Eigen::Index>(batch[b]->action);
    const auto col = static_cast<Eigen::Index>(b);
    const double err = static_cast<double>(q(a, col)) - y[b];
    loss += err * err / n;
    dq(a, col) = static_cast<float>(2.0 * err / n);
  }
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "non-finite loss " << loss << " (batch " << batch.size() << ", lr " << lr << ", max |param| "
        << main.parameters().cwiseAbs().maxCoeff() << ", max |Q| " << q.cwiseAbs().maxCoeff() << ")";
    throw TrainingError(msg.str());
  }
  const Net::Vector grad = main.gradient(cache, dq);
  adam.step(main.parameters(), grad, lr);
  return loss;
}

Agent::Agent(const AgentConfig& cfg, const QNetShape& shape, std::uint64_t seed)
    : cfg_(cfg),
      main_(shape, derive_seed(seed, 4)),
      target_(shape, derive_seed(seed, 5)),
      adam_(static_cast<Eigen::Index>(shape.parameter_count())),
      replay_(cfg.memory_size, cfg.entangling_weight),
      action_rng_(derive_seed(seed, 2)),
      replay_rng_(derive_seed(seed, 3)) {
  cfg_.validate();
  target_.copy_from(main_);
}

std::size_t Agent::act(const Observation& obs, std::span<const std::uint8_t> mask) {
  const double eps = epsilon();
  ++selections_;
  return select_action(main_, obs, eps, mask, action_rng_);
}

std::size_t Agent::greedy(const Observation& obs, std::span<const std::uint8_t> mask) const {
  return static_cast<std::size_t>(masked_argmax(q_values(main_, obs), 0, mask));
}

std::optional<double> Agent::learn(double lr) {
  if (replay_.size() < cfg_.batch_size) return std::nullopt;
  const auto picks = replay_.sample_indices(cfg_.batch_size, replay_rng_);
  std::vector<const Transition*> batch;
  batch.reserve(picks.size());
  for (std::size_t i : picks) batch.push_back(&replay_.at(i));
  const double loss = train_step(main_, target_, batch, adam_, lr, cfg_.gamma);
  ++train_steps_;
  if (train_steps_ % static_cast<std::uint64_t>(cfg_.target_sync_every) == 0) sync_target();
  return loss;
}

void Agent::sync_target() {
  target_.copy_from(main_);
  ++syncs_;
}

QNetShape network_shape(const EnvConfig& env, std::size_t actions) {
  QNetShape s;
  s.channels = kObservationChannels;
  s.rows = env.n_qubits;
  s.cols = env.max_gates;
  s.aux = observation_aux_size(env.n_qubits);
  s.actions = static_cast<int>(actions);
  return s;
}

RolloutResult greedy_rollout(const Agent& agent, CircuitEnv& env, const Circuit& initial, std::uint64_t seed) {
  Observation obs = env.reset(initial, seed);
  RolloutResult r{initial, env.baseline(), initial, env.baseline(), 0.0, 0, {}};
  std::vector<std::uint8_t> mask = env.valid_mask();
  for (int step = 1; step <= env.config().max_steps; ++step) {
    const std::size_t a = agent.greedy(obs, mask);
    r.actions.push_back(a);
    StepResult s = env.step(a);
    if (env.potential() > r.best_potential) {
      r.best_potential = env.potential();
      r.best = env.circuit();
      r.best_metrics = env.metrics();
      r.best_step = step;
    }
    obs = std::move(s.obs);
    mask = std::move(s.mask);
    if (s.done) break;
  }
  return r;
}

TrainResult train(Agent& agent, const EnvConfig& env_cfg, std::span<const Circuit> initials, int episodes,
                  std::uint64_t seed, const TrainHooks& hooks) {
  if (initials.empty()) throw ConfigError("training needs at least one initial circuit");
  EnvConfig cfg = env_cfg;
  if (!cfg.sim.noise.during_training) cfg.sim.noise.enabled = false;
  CircuitEnv env(cfg);
  LrSchedule schedule(agent.config());
  TrainResult result;

  for (int ep = 0; ep < episodes; ++ep) {
    EpisodeLog log;
    log.episode = ep;
    log.initial_index = static_cast<std::size_t>(ep) % initials.size();
    log.learning_rate = schedule.lr_at(ep);
    Observation obs = env.reset(initials[log.initial_index], derive_seed(seed, 1, static_cast<std::uint64_t>(ep)));
    log.initial = env.baseline();
    std::vector<std::uint8_t> mask = env.valid_mask();
    double loss_sum = 0.0;
    int losses = 0;

    bool done = false;
    while (!done) {
      if (hooks.stop && hooks.stop->load()) {
        result.interrupted = true;
        break;
      }
      StepLog step;
      step.episode = ep;
      step.epsilon = agent.epsilon();
      step.action = agent.act(obs, mask);
      step.label = action_label(env.catalog()[step.action]);
      StepResult s = env.step(step.action);
      done = s.done;

      Transition t;
      t.state = std::move(obs);
      t.action = static_cast<std::uint32_t>(step.action);
      t.reward = s.reward;
      t.next = s.obs;
      t.next_mask = s.mask;
      t.done = s.done;
      t.entangling = is_entangling(env.catalog()[step.action].kind);
      agent.remember(std::move(t));

      if (auto loss = agent.learn(log.learning_rate)) {
        step.trained = true;
        step.loss = *loss;
        loss_sum += *loss;
        ++losses;
      }

      step.step = env.steps_taken();
      step.valid = s.valid;
      step.injected = s.injected;
      step.reward = s.reward;
      step.metrics = s.metrics;
      step.threshold = env.threshold();
      log.episode_return += s.reward;
      log.invalid_actions += s.valid ? 0 : 1;
      log.injections += s.injected ? 1 : 0;
      if (hooks.on_step) hooks.on_step(step);

      obs = std::move(s.obs);
      mask = std::move(s.mask);
    }
    if (result.interrupted) break;

    log.steps = env.steps_taken();
    log.final = env.metrics();
    log.mean_loss = losses > 0 ? loss_sum / losses : 0.0;
    log.epsilon = agent.epsilon();
    log.threshold = env.end_episode();
    log.train_steps = agent.train_steps();
    log.syncs = agent.syncs();
    schedule.record(log.episode_return);
    if (hooks.on_episode) hooks.on_episode(log);
    result.episodes.push_back(std::move(log));
  }
  return result;
}

}  // namespace qsopt
