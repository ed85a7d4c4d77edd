#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qsopt/circuit.hpp"
#include "qsopt/sampling.hpp"
#include "qsopt/simulate.hpp"

namespace qsopt {

/// Largest value of the parameter-shift statistic for one parameter:
/// 4 (a - b)^2 / (a + b) <= 4 (a + b), summed over two distributions gives 8.
inline constexpr double kQfiUpperBound = 8.0;

/// sum_i 4 (P+_i - P-_i)^2 / (P+_i + P-_i) over outcomes present in either
/// distribution; outcomes with P+_i + P-_i = 0 contribute nothing.
double parameter_shift_qfi(const Distribution& plus, const Distribution& minus);

struct QfiOptions {
  SimulatorConfig sim;
  /// Shots per shifted circuit. 0 selects exact distributions (statevector, noiseless).
  std::uint64_t shots = 5000;
};

/// Parameter-shift QFI averaged over every RX/RZ gate and divided by
/// kQfiUpperBound, so the result lies in [0, 1]. Each rotation angle is
/// shifted by +-pi/2 and all qubits are measured in the Z basis.
/// Throws MetricError when `c` has no rotation gates.
double qfi(const Circuit& c, const QfiOptions& opt, std::uint64_t seed);

/// Per-bond entropy divided by the largest value the bond can hold,
/// min(k, n-k, log2 chi_max); zero where that bound is zero.
std::vector<double> normalized_bond_entropies(std::span<const double> bits, int n_qubits, int chi_max);

/// Mean of normalized_bond_entropies. Zero when n < 2.
double entropy_norm(std::span<const double> bits, int n_qubits, int chi_max);

/// (d_in - d_out) / d_in; 0 when d_in == 0.
double depth_ratio(int d_in, int d_out);
/// (g_in - g_out) / g_in; 0 when g_in == 0.
double gate_ratio(int g_in, int g_out);

struct RewardWeights {
  double qfi = 0.4;
  double depth = 0.2;
  double entropy = 0.3;
  double gates = 0.1;

  void validate() const;
};

struct Deltas {
  double qfi = 0.0;
  double depth = 0.0;
  double entropy = 0.0;
  double gates = 0.0;
};

/// w1 dQFI + w2 dDepth + w3 dEntropy + w4 dGates.
double reward(const Deltas& d, const RewardWeights& w);

enum MetricFlag : unsigned {
  kQfiUndefined = 1U << 0,      // no rotation gates
  kEntropyUndefined = 1U << 1,  // fewer than two qubits
  kDepthUndefined = 1U << 2,    // reference depth is zero
  kGatesUndefined = 1U << 3,    // reference gate count is zero
};

struct MetricsRecord {
  double qfi_norm = 0.0;
  double entropy_norm = 0.0;
  std::vector<double> bond_entropies;       // bits
  std::vector<double> bond_entropies_norm;  // in [0, 1]
  int depth = 0;
  int gates = 0;
  /// Relative to a reference record; zero until set by with_deltas.
  Deltas deltas;
  unsigned flags = 0;
};

/// Structure and entropies only (qfi_norm left at zero).
MetricsRecord evaluate_structure(const Circuit& c, const SimulatorConfig& sim);
/// Structure, entropies and QFI. An undefined QFI is recorded as 0 with kQfiUndefined.
MetricsRecord evaluate(const Circuit& c, const QfiOptions& opt, std::uint64_t seed);

/// dQFI and dEntropy as plain differences; dDepth and dGates as ratios against `reference`.
Deltas deltas_between(const MetricsRecord& reference, const MetricsRecord& current, unsigned* flags = nullptr);

}  // namespace qsopt
