#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qsopt/circuit.hpp"
#include "qsopt/random.hpp"
#include "qsopt/sampling.hpp"

namespace qsopt {

/// Stochastic noise model realized as per-trajectory gate insertions.
///
/// Thermal relaxation is Pauli-twirled: per qubit and moment an
/// amplitude-damping event becomes a reset to |0> with probability
/// 1 - exp(-t/T1), and dephasing becomes a Z with probability
/// 1 - exp(-t/T_phi), where 1/T_phi = 1/T2 - 1/(2 T1).
struct NoiseParams {
  bool enabled = false;
  double p_meas = 0.02;
  double p_1q = 0.01;
  double p_2q = 0.03;
  double t1_us = 50.0;
  double t2_us = 70.0;
  double dur_1q_us = 0.05;
  double dur_2q_us = 0.3;
  /// Whether the environment applies noise while training (it always may at evaluation).
  bool during_training = true;
  /// Independent noise realizations per sampled distribution; 0 means one per shot.
  std::uint64_t trajectories = 0;

  /// Defaults with `enabled = true`.
  static NoiseParams standard() {
    NoiseParams p;
    p.enabled = true;
    return p;
  }

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
  /// T_phi in microseconds; +inf when T2 == 2 T1.
  double dephasing_time_us() const;
};

enum class NoiseEventKind : std::uint8_t { PauliX, PauliY, PauliZ, Reset };

struct NoiseEvent {
  NoiseEventKind kind;
  int qubit;
  friend bool operator==(const NoiseEvent&, const NoiseEvent&) = default;
};

/// With probability p_1q or p_2q (by arity), one uniformly chosen non-identity
/// Pauli on one uniformly chosen operand qubit.
std::vector<NoiseEvent> depolarizing_insertions(const NoiseParams& p, GateKind kind, std::span<const int> qubits,
                                                Rng& rng);

double amplitude_damping_probability(double duration_us, const NoiseParams& p);
double dephasing_probability(double duration_us, const NoiseParams& p);

/// Independent reset and Z events per qubit for an interval of `duration_us`.
std::vector<NoiseEvent> relaxation_insertions(std::span<const int> qubits, double duration_us, const NoiseParams& p,
                                              Rng& rng);

int measurement_flip(int bit, const NoiseParams& p, Rng& rng);
/// Flips each of the n bits independently with probability p_meas.
Bits measurement_flips(Bits outcome, int n, const NoiseParams& p, Rng& rng);

}  // namespace qsopt
