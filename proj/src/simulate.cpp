#include "qsopt/simulate.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "qsopt/error.hpp"

namespace qsopt {

std::string_view backend_name(Backend b) noexcept { return b == Backend::Mps ? "mps" : "statevector"; }

Backend parse_backend(std::string_view name) {
  if (name == "mps") return Backend::Mps;
  if (name == "statevector") return Backend::Statevector;
  throw ConfigError("unknown backend '" + std::string(name) + "' (expected mps or statevector)");
}

int effective_chi(const SimulatorConfig& cfg) {
  return cfg.backend == Backend::Mps ? cfg.mps.chi_max : kUnboundedChi;
}

std::vector<TrajectoryOp> sample_trajectory(const Circuit& c, const NoiseParams& p, Rng& rng) {
  std::vector<TrajectoryOp> ops;
  ops.reserve(c.size() * 2);
  if (!p.enabled) {
    for (const Gate& g : c.gates()) ops.emplace_back(g);
    return ops;
  }
  const auto m = moments(c);
  const int layers = m.empty() ? 0 : *std::max_element(m.begin(), m.end()) + 1;
  std::vector<std::vector<std::size_t>> by_moment(static_cast<std::size_t>(layers));
  for (std::size_t i = 0; i < m.size(); ++i) by_moment[static_cast<std::size_t>(m[i])].push_back(i);

  std::vector<int> all(static_cast<std::size_t>(c.n_qubits()));
  std::iota(all.begin(), all.end(), 0);
  for (const auto& layer : by_moment) {
    double duration = 0.0;
    for (std::size_t i : layer) {
      const Gate& g = c[i];
      ops.emplace_back(g);
      const int qs[2] = {g.q0, g.q1};
      for (const NoiseEvent& e : depolarizing_insertions(p, g.kind, std::span<const int>(qs, g.arity()), rng)) {
        ops.emplace_back(e);
      }
      duration = std::max(duration, g.arity() == 2 ? p.dur_2q_us : p.dur_1q_us);
    }
    for (const NoiseEvent& e : relaxation_insertions(all, duration, p, rng)) ops.emplace_back(e);
  }
  return ops;
}

namespace {

template <class State>
void run_ops(State& s, const std::vector<TrajectoryOp>& ops, Rng& rng) {
  for (const TrajectoryOp& op : ops) {
    if (const Gate* g = std::get_if<Gate>(&op)) {
      s.apply(*g);
      continue;
    }
    const NoiseEvent& e = std::get<NoiseEvent>(op);
    switch (e.kind) {
      case NoiseEventKind::PauliX: s.apply_pauli(Pauli::X, e.qubit); break;
      case NoiseEventKind::PauliY: s.apply_pauli(Pauli::Y, e.qubit); break;
      case NoiseEventKind::PauliZ: s.apply_pauli(Pauli::Z, e.qubit); break;
      case NoiseEventKind::Reset: s.reset(e.qubit, rng); break;
    }
  }
}

OutcomeCounts sample_ops(const Circuit& c, const SimulatorConfig& cfg, const std::vector<TrajectoryOp>& ops,
                         std::uint64_t shots, Rng& rng) {
  if (cfg.backend == Backend::Statevector) {
    if (c.n_qubits() > cfg.max_dense_qubits) {
      throw SimulationError("statevector backend refuses " + std::to_string(c.n_qubits()) + " qubits (cap " +
                            std::to_string(cfg.max_dense_qubits) + ")");
    }
    DenseState s(c.n_qubits());
    run_ops(s, ops, rng);
    return sample_dense(s, shots, rng);
  }
  MpsState s(c.n_qubits(), cfg.mps);
  run_ops(s, ops, rng);
  return s.sample(shots, rng);
}

}  // namespace

OutcomeCounts sample_circuit(const Circuit& c, const SimulatorConfig& cfg, std::uint64_t shots, std::uint64_t seed) {
  if (c.n_qubits() > kMaxPackedQubits) throw SimulationError("sampling supports at most 64 qubits");
  const NoiseParams& noise = cfg.noise;
  if (!noise.enabled) {
    Rng rng(seed);
    Rng unused(0);
    return sample_ops(c, cfg, sample_trajectory(c, noise, unused), shots, rng);
  }

  OutcomeCounts total{c.n_qubits(), shots, {}};
  if (shots == 0) return total;
  const std::uint64_t trajectories = noise.trajectories == 0 ? shots : std::min(shots, noise.trajectories);
  const std::uint64_t base = shots / trajectories;
  const std::uint64_t extra = shots % trajectories;
  for (std::uint64_t t = 0; t < trajectories; ++t) {
    Rng rng(derive_seed(seed, t));
    const auto ops = sample_trajectory(c, noise, rng);
    const OutcomeCounts part = sample_ops(c, cfg, ops, base + (t < extra ? 1 : 0), rng);
    for (const auto& [b, n] : part.counts) total.counts[b] += n;
  }

  if (noise.p_meas == 0.0) return total;
  Rng readout(derive_seed(seed, ~std::uint64_t{0}));
  OutcomeCounts flipped{c.n_qubits(), shots, {}};
  for (const auto& [b, n] : total.counts) {
    for (std::uint64_t k = 0; k < n; ++k) ++flipped.counts[measurement_flips(b, c.n_qubits(), noise, readout)];
  }
  return flipped;
}

Distribution exact_circuit_distribution(const Circuit& c, const SimulatorConfig& cfg) {
  if (cfg.backend == Backend::Statevector) return exact_distribution(run_statevector(c, cfg.max_dense_qubits));
  return run_mps(c, cfg.mps).exact_distribution();
}

std::vector<double> circuit_bond_entropies(const Circuit& c, const SimulatorConfig& cfg) {
  if (cfg.backend == Backend::Statevector) {
    const DenseState s = run_statevector(c, cfg.max_dense_qubits);
    std::vector<double> out;
    for (int k = 1; k < c.n_qubits(); ++k) out.push_back(exact_bond_entropy(s, k));
    return out;
  }
  MpsState s = run_mps(c, cfg.mps);
  return s.bond_entropies();
}

}  // namespace qsopt
