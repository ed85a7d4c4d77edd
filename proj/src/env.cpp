#include "qsopt/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qsopt/error.hpp"
#include "qsopt/random.hpp"

namespace qsopt {

std::string action_label(const Action& a) {
  auto with_qubit = [&](const char* name) { return std::string(name) + "(q" + std::to_string(a.qubit) + ")"; };
  auto with_pair = [&](const char* name) {
    return std::string(name) + "(q" + std::to_string(a.qubit) + ",q" + std::to_string(a.qubit + 1) + ")";
  };
  auto with_angle = [&](const char* name) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", a.angle);
    return std::string(name) + "(q" + std::to_string(a.qubit) + "," + buf + ")";
  };
  switch (a.kind) {
    case ActionKind::AddH: return with_qubit("ADD_H");
    case ActionKind::AddRX: return with_angle("ADD_RX");
    case ActionKind::AddRZ: return with_angle("ADD_RZ");
    case ActionKind::AddCX: return with_pair("ADD_CX");
    case ActionKind::AddCZ: return with_pair("ADD_CZ");
    case ActionKind::AddSwap: return with_pair("ADD_SWAP");
    case ActionKind::RemoveLast: return with_qubit("REMOVE_LAST");
    case ActionKind::SwapLastPair: return with_qubit("SWAP_LAST_PAIR");
    case ActionKind::ReplaceLast: return with_qubit("REPLACE_LAST");
    case ActionKind::CancelPass: return "CANCEL_PASS";
    case ActionKind::Inject: return "INJECT_ENTANGLEMENT";
    case ActionKind::Boost: return "BOOST_ENTANGLEMENT";
  }
  return "?";
}

std::vector<Action> action_catalog(int n, std::span<const double> angles) {
  std::vector<Action> out;
  for (int q = 0; q < n; ++q) out.push_back({ActionKind::AddH, q, 0.0});
  for (ActionKind k : {ActionKind::AddRX, ActionKind::AddRZ}) {
    for (int q = 0; q < n; ++q) {
      for (double t : angles) out.push_back({k, q, t});
    }
  }
  for (ActionKind k : {ActionKind::AddCX, ActionKind::AddCZ, ActionKind::AddSwap}) {
    for (int q = 0; q + 1 < n; ++q) out.push_back({k, q, 0.0});
  }
  for (ActionKind k : {ActionKind::RemoveLast, ActionKind::SwapLastPair, ActionKind::ReplaceLast}) {
    for (int q = 0; q < n; ++q) out.push_back({k, q, 0.0});
  }
  out.push_back({ActionKind::CancelPass, -1, 0.0});
  out.push_back({ActionKind::Inject, -1, 0.0});
  out.push_back({ActionKind::Boost, -1, 0.0});
  return out;
}

void EnvConfig::validate() const {
  if (n_qubits < 2) throw ConfigError("env.n_qubits must be at least 2");
  if (max_gates < 1) throw ConfigError("env.max_gates must be at least 1");
  if (max_steps < 1) throw ConfigError("env.max_steps must be at least 1");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("env.threshold must lie in [0, 1]");
  if (!std::isfinite(invalid_penalty)) throw ConfigError("env.invalid_penalty must be finite");
  for (double a : angles) {
    if (!std::isfinite(a)) throw ConfigError("env.angles must be finite");
  }
  if (n_qubits > kMaxPackedQubits) throw ConfigError("env.n_qubits exceeds 64");
  weights.validate();
  sim.noise.validate();
  if (sim.mps.chi_max < 1) throw ConfigError("mps.chi_max must be at least 1");
  if (!(sim.mps.trunc_tol >= 0.0)) throw ConfigError("mps.trunc_tol must be nonnegative");
  if (sim.max_dense_qubits < 1 || sim.max_dense_qubits > kStatevectorMaxCap) {
    throw ConfigError("max_dense_qubits must lie in [1, " + std::to_string(kStatevectorMaxCap) + "]");
  }
  if (sim.backend == Backend::Statevector && n_qubits > sim.max_dense_qubits) {
    throw ConfigError("statevector backend cap " + std::to_string(sim.max_dense_qubits) + " is below env.n_qubits");
  }
  if (sim.max_dense_qubits > kStatevectorMaxCap) {
    throw ConfigError("statevector cap may not exceed " + std::to_string(kStatevectorMaxCap));
  }
}

Observation encode_observation(const Circuit& c, const MetricsRecord& m, const EnvConfig& cfg) {
  Observation obs;
  obs.rows = cfg.n_qubits;
  obs.cols = cfg.max_gates;
  const std::size_t plane = static_cast<std::size_t>(obs.rows) * static_cast<std::size_t>(obs.cols);
  obs.grid.assign(plane * kObservationChannels, 0.0f);
  auto at = [&](int channel, int q, int col) -> float& {
    return obs.grid[static_cast<std::size_t>(channel) * plane + static_cast<std::size_t>(q * obs.cols + col)];
  };
  for (int q = 0; q < obs.rows; ++q) {
    for (int col = 0; col < obs.cols; ++col) at(kChanEmpty, q, col) = 1.0f;
  }

  const auto moment = moments(c);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Gate& g = c[i];
    const int col = moment[i];
    if (col >= obs.cols) throw EnvError("circuit deeper than max_gates");
    auto mark = [&](int channel, int q) {
      at(kChanEmpty, q, col) = 0.0f;
      at(channel, q, col) = 1.0f;
    };
    switch (g.kind) {
      case GateKind::H: mark(kChanH, g.q0); break;
      case GateKind::RX:
      case GateKind::RZ: {
        mark(g.kind == GateKind::RX ? kChanRX : kChanRZ, g.q0);
        constexpr double two_pi = 2.0 * std::numbers::pi;
        double r = std::fmod(g.angle, two_pi);
        if (r < 0.0) r += two_pi;
        at(kChanAngle, g.q0, col) = static_cast<float>(std::min(r / two_pi, 1.0));
        break;
      }
      case GateKind::CX:
        mark(kChanCxControl, g.q0);
        mark(kChanCxTarget, g.q1);
        break;
      case GateKind::CZ:
        mark(kChanCZ, g.q0);
        mark(kChanCZ, g.q1);
        break;
      case GateKind::SWAP:
        mark(kChanSwap, g.q0);
        mark(kChanSwap, g.q1);
        break;
    }
  }

  obs.aux.assign(static_cast<std::size_t>(observation_aux_size(cfg.n_qubits)), 0.0f);
  for (std::size_t k = 0; k < m.bond_entropies_norm.size() && k + 1 < static_cast<std::size_t>(cfg.n_qubits); ++k) {
    obs.aux[k] = static_cast<float>(m.bond_entropies_norm[k]);
  }
  const std::size_t tail = static_cast<std::size_t>(cfg.n_qubits - 1);
  obs.aux[tail] = static_cast<float>(m.qfi_norm);
  obs.aux[tail + 1] = static_cast<float>(static_cast<double>(m.depth) / cfg.max_gates);
  obs.aux[tail + 2] = static_cast<float>(static_cast<double>(m.gates) / cfg.max_gates);
  return obs;
}

double adjust_threshold(double threshold, double mean_entropy) {
  return std::clamp(0.9 * threshold + 0.1 * mean_entropy, 0.5, 0.95);
}

namespace {

// Index of the last gate satisfying `pred`, or -1.
template <class Pred>
long last_index(const Circuit& c, Pred pred) {
  for (long i = static_cast<long>(c.size()) - 1; i >= 0; --i) {
    if (pred(c[static_cast<std::size_t>(i)])) return i;
  }
  return -1;
}

}  // namespace

std::optional<Circuit> apply_action(const Circuit& c, const Action& a, std::span<const double> bond_norm,
                                    double threshold, int max_gates) {
  const int size = gate_count(c);
  const bool has_room = size < max_gates;
  switch (a.kind) {
    case ActionKind::AddH:
      if (!has_room) return std::nullopt;
      return append_gate(c, Gate::h(a.qubit));
    case ActionKind::AddRX:
    case ActionKind::AddRZ:
      if (!has_room) return std::nullopt;
      return append_gate(c, {a.kind == ActionKind::AddRX ? GateKind::RX : GateKind::RZ, a.qubit, -1, a.angle});
    case ActionKind::AddCX:
      if (!has_room) return std::nullopt;
      return append_gate(c, Gate::cx(a.qubit, a.qubit + 1));
    case ActionKind::AddCZ:
      if (!has_room) return std::nullopt;
      return append_gate(c, Gate::cz(a.qubit, a.qubit + 1));
    case ActionKind::AddSwap:
      if (!has_room) return std::nullopt;
      return append_gate(c, Gate::swap(a.qubit, a.qubit + 1));
    case ActionKind::RemoveLast: {
      const long i = last_index(c, [&](const Gate& g) { return g.touches(a.qubit); });
      if (i < 0) return std::nullopt;
      return remove_gate(c, static_cast<std::size_t>(i));
    }
    case ActionKind::SwapLastPair: {
      const long i = last_index(c, [&](const Gate& g) { return g.touches(a.qubit); });
      if (i < 1) return std::nullopt;
      const auto at = static_cast<std::size_t>(i);
      if (c[at].overlaps(c[at - 1])) return std::nullopt;
      return swap_adjacent(c, at - 1);
    }
    case ActionKind::ReplaceLast: {
      const long i = last_index(c, [&](const Gate& g) { return g.arity() == 1 && g.q0 == a.qubit; });
      if (i < 0 || c[static_cast<std::size_t>(i)].kind == GateKind::H) return std::nullopt;
      return replace_gate(c, static_cast<std::size_t>(i), Gate::h(a.qubit));
    }
    case ActionKind::CancelPass:
      return cancel_pairs(c);
    case ActionKind::Inject: {
      if (bond_norm.empty() || size + 2 > max_gates) return std::nullopt;
      const auto k = static_cast<int>(std::min_element(bond_norm.begin(), bond_norm.end()) - bond_norm.begin());
      return append_gate(append_gate(c, Gate::h(k)), Gate::cx(k, k + 1));
    }
    case ActionKind::Boost: {
      std::vector<Gate> gates(c.gates().begin(), c.gates().end());
      for (std::size_t k = 0; k < bond_norm.size(); ++k) {
        if (bond_norm[k] < threshold) gates.push_back(Gate::cz(static_cast<int>(k), static_cast<int>(k) + 1));
      }
      const auto added = static_cast<int>(gates.size()) - size;
      if (added == 0 || size + added > max_gates) return std::nullopt;
      return Circuit(c.n_qubits(), std::move(gates));
    }
  }
  return std::nullopt;
}

CircuitEnv::CircuitEnv(EnvConfig cfg) : cfg_(std::move(cfg)), threshold_(cfg_.threshold) {
  cfg_.validate();
  catalog_ = action_catalog(cfg_.n_qubits, cfg_.angles);
}

const Circuit& CircuitEnv::circuit() const {
  require_reset();
  return *circuit_;
}

void CircuitEnv::require_reset() const {
  if (!circuit_) throw EnvError("environment used before reset");
}

MetricsRecord CircuitEnv::measure(const Circuit& c, std::uint64_t seed) const {
  MetricsRecord r = evaluate(c, {cfg_.sim, cfg_.shots}, seed);
  r.deltas = deltas_between(baseline_, r, &r.flags);
  return r;
}

Observation CircuitEnv::reset(const Circuit& initial, std::uint64_t seed) {
  if (initial.n_qubits() != cfg_.n_qubits) {
    throw EnvError("initial circuit has " + std::to_string(initial.n_qubits()) + " qubits, env expects " +
                   std::to_string(cfg_.n_qubits));
  }
  if (gate_count(initial) > cfg_.max_gates) {
    throw EnvError("initial circuit has " + std::to_string(gate_count(initial)) + " gates, above max_gates " +
                   std::to_string(cfg_.max_gates));
  }
  seed_ = seed;
  steps_ = 0;
  entropy_sum_ = 0.0;
  circuit_ = initial;
  baseline_ = MetricsRecord{};
  baseline_ = measure(initial, derive_seed(seed_, 0));
  baseline_.deltas = {};
  current_ = baseline_;
  potential_ = 0.0;
  return encode_observation(*circuit_, current_, cfg_);
}

std::vector<std::uint8_t> CircuitEnv::valid_mask() const {
  std::vector<std::uint8_t> mask(catalog_.size());
  for (std::size_t i = 0; i < catalog_.size(); ++i) mask[i] = is_valid(i) ? 1 : 0;
  return mask;
}

bool CircuitEnv::is_valid(std::size_t action) const {
  require_reset();
  if (action >= catalog_.size()) return false;
  const Action& a = catalog_[action];
  if (a.kind == ActionKind::CancelPass) return true;
  return apply_action(*circuit_, a, current_.bond_entropies_norm, threshold_, cfg_.max_gates).has_value();
}

StepResult CircuitEnv::step(std::size_t action) {
  require_reset();
  if (action >= catalog_.size()) {
    throw EnvError("action id " + std::to_string(action) + " out of range [0, " + std::to_string(catalog_.size()) +
                   ")");
  }
  ++steps_;
  StepResult out;
  auto next = apply_action(*circuit_, catalog_[action], current_.bond_entropies_norm, threshold_, cfg_.max_gates);
  if (!next) {
    out.valid = false;
    out.reward = cfg_.invalid_penalty;
  } else {
    Circuit c = std::move(*next);
    if (cfg_.auto_inject) {
      const MetricsRecord s = evaluate_structure(c, cfg_.sim);
      if (s.entropy_norm < threshold_) {
        const Action inject{ActionKind::Inject, -1, 0.0};
        if (auto injected = apply_action(c, inject, s.bond_entropies_norm, threshold_, cfg_.max_gates)) {
          c = std::move(*injected);
          out.injected = true;
        }
      }
    }
    current_ = measure(c, derive_seed(seed_, static_cast<std::uint64_t>(steps_)));
    circuit_ = std::move(c);
    const double potential = reward(current_.deltas, cfg_.weights);
    out.reward = potential - potential_;
    potential_ = potential;
  }
  entropy_sum_ += current_.entropy_norm;
  out.done = steps_ >= cfg_.max_steps;
  out.metrics = current_;
  out.obs = encode_observation(*circuit_, current_, cfg_);
  out.mask = valid_mask();
  return out;
}

double CircuitEnv::episode_mean_entropy() const {
  return steps_ > 0 ? entropy_sum_ / steps_ : baseline_.entropy_norm;
}

double CircuitEnv::end_episode() {
  threshold_ = adjust_threshold(threshold_, episode_mean_entropy());
  return threshold_;
}

}  // namespace qsopt
