#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "qsopt/circuit.hpp"
#include "qsopt/mps.hpp"
#include "qsopt/noise.hpp"
#include "qsopt/sampling.hpp"
#include "qsopt/statevector.hpp"

namespace qsopt {

enum class Backend : std::uint8_t { Mps, Statevector };

std::string_view backend_name(Backend b) noexcept;
/// Accepts "mps" and "statevector". Throws ConfigError otherwise.
Backend parse_backend(std::string_view name);

struct SimulatorConfig {
  Backend backend = Backend::Mps;
  MpsOptions mps;
  int max_dense_qubits = kStatevectorDefaultCap;
  NoiseParams noise;
};

/// One gate or one noise event of a sampled trajectory.
using TrajectoryOp = std::variant<Gate, NoiseEvent>;

/// Gates in moment order, each followed by its depolarizing insertions, and
/// relaxation on every qubit after each moment for the moment's longest gate.
std::vector<TrajectoryOp> sample_trajectory(const Circuit& c, const NoiseParams& p, Rng& rng);

/// Measurement outcomes over `shots`. Without noise the circuit is simulated
/// once; with noise each trajectory is simulated separately and its shots are
/// drawn from it, then readout flips are applied per shot. Deterministic in `seed`.
OutcomeCounts sample_circuit(const Circuit& c, const SimulatorConfig& cfg, std::uint64_t shots, std::uint64_t seed);

/// Noiseless outcome probabilities (noise settings are ignored).
Distribution exact_circuit_distribution(const Circuit& c, const SimulatorConfig& cfg);

/// Noiseless per-bond entropies in bits, bonds 1..n-1.
std::vector<double> circuit_bond_entropies(const Circuit& c, const SimulatorConfig& cfg);

/// Bond-dimension cap used to normalize entropies: chi_max for MPS, unbounded for dense.
int effective_chi(const SimulatorConfig& cfg);

}  // namespace qsopt
