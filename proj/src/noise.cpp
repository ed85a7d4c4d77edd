#include "qsopt/noise.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qsopt/error.hpp"

namespace qsopt {

void NoiseParams::validate() const {
  auto prob = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string("noise.") + name + " must lie in [0, 1]");
  };
  prob(p_meas, "p_meas");
  prob(p_1q, "p_1q");
  prob(p_2q, "p_2q");
  if (!(t1_us > 0.0)) throw ConfigError("noise.t1_us must be positive");
  if (!(t2_us > 0.0)) throw ConfigError("noise.t2_us must be positive");
  if (t2_us > 2.0 * t1_us) {
    throw ConfigError("noise: t2_us <= 2 * t1_us violated (T_phi would be nonpositive)");
  }
  if (!(dur_1q_us > 0.0) || !(dur_2q_us > 0.0)) throw ConfigError("noise: gate durations must be positive");
}

double NoiseParams::dephasing_time_us() const {
  const double rate = 1.0 / t2_us - 1.0 / (2.0 * t1_us);
  return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

std::vector<NoiseEvent> depolarizing_insertions(const NoiseParams& p, GateKind kind, std::span<const int> qubits,
                                                Rng& rng) {
  const int arity = is_two_qubit(kind) ? 2 : 1;
  if (static_cast<int>(qubits.size()) != arity) throw SimulationError("depolarizing_insertions: arity mismatch");
  if (!p.enabled) return {};
  const double prob = arity == 2 ? p.p_2q : p.p_1q;
  if (!rng.bernoulli(prob)) return {};
  const int q = qubits[rng.below(qubits.size())];
  const auto pauli = static_cast<NoiseEventKind>(rng.below(3));
  return {NoiseEvent{pauli, q}};
}

double amplitude_damping_probability(double duration_us, const NoiseParams& p) {
  return -std::expm1(-duration_us / p.t1_us);
}

double dephasing_probability(double duration_us, const NoiseParams& p) {
  const double tphi = p.dephasing_time_us();
  return std::isinf(tphi) ? 0.0 : -std::expm1(-duration_us / tphi);
}

std::vector<NoiseEvent> relaxation_insertions(std::span<const int> qubits, double duration_us, const NoiseParams& p,
                                              Rng& rng) {
  if (duration_us < 0.0) throw SimulationError("relaxation_insertions: negative duration");
  if (!p.enabled || duration_us == 0.0) return {};
  const double p_amp = amplitude_damping_probability(duration_us, p);
  const double p_phase = dephasing_probability(duration_us, p);
  std::vector<NoiseEvent> out;
  for (int q : qubits) {
    if (rng.bernoulli(p_amp)) out.push_back({NoiseEventKind::Reset, q});
    if (rng.bernoulli(p_phase)) out.push_back({NoiseEventKind::PauliZ, q});
  }
  return out;
}

int measurement_flip(int bit, const NoiseParams& p, Rng& rng) {
  if (!p.enabled) return bit;
  return rng.bernoulli(p.p_meas) ? 1 - bit : bit;
}

Bits measurement_flips(Bits outcome, int n, const NoiseParams& p, Rng& rng) {
  if (!p.enabled || p.p_meas == 0.0) return outcome;
  for (int q = 0; q < n; ++q) {
    if (rng.bernoulli(p.p_meas)) outcome ^= Bits{1} << (n - 1 - q);
  }
  return outcome;
}

}  // namespace qsopt
