#include "qsopt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qsopt/error.hpp"
#include "qsopt/parallel.hpp"
#include "qsopt/random.hpp"

namespace qsopt {

double parameter_shift_qfi(const Distribution& plus, const Distribution& minus) {
  double sum = 0.0;
  auto term = [&](double a, double b) {
    const double s = a + b;
    if (s > 0.0) sum += 4.0 * (a - b) * (a - b) / s;
  };
  auto i = plus.begin();
  auto j = minus.begin();
  while (i != plus.end() || j != minus.end()) {
    if (j == minus.end() || (i != plus.end() && i->first < j->first)) {
      term(i->second, 0.0);
      ++i;
    } else if (i == plus.end() || j->first < i->first) {
      term(0.0, j->second);
      ++j;
    } else {
      term(i->second, j->second);
      ++i;
      ++j;
    }
  }
  return sum;
}

double qfi(const Circuit& c, const QfiOptions& opt, std::uint64_t seed) {
  std::vector<std::size_t> params;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (is_parameterized(c[i].kind)) params.push_back(i);
  }
  if (params.empty()) throw MetricError("QFI is undefined for a circuit without rotation gates");
  if (opt.shots == 0) {
    if (opt.sim.backend != Backend::Statevector) throw MetricError("exact-mode QFI requires the statevector backend");
    if (opt.sim.noise.enabled) throw MetricError("exact-mode QFI is noiseless; disable noise");
  }

  constexpr double shift = std::numbers::pi / 2.0;
  std::vector<Distribution> dists(2 * params.size());
  parallel_for(dists.size(), [&](std::size_t task) {
    const std::size_t j = task / 2;
    const double sign = task % 2 == 0 ? 1.0 : -1.0;
    Gate g = c[params[j]];
    g.angle += sign * shift;
    const Circuit shifted = replace_gate(c, params[j], g);
    dists[task] = opt.shots == 0 ? exact_circuit_distribution(shifted, opt.sim)
                                 : sample_circuit(shifted, opt.sim, opt.shots, derive_seed(seed, j, task % 2))
                                       .distribution();
  });

  double total = 0.0;
  for (std::size_t j = 0; j < params.size(); ++j) total += parameter_shift_qfi(dists[2 * j], dists[2 * j + 1]);
  return total / static_cast<double>(params.size()) / kQfiUpperBound;
}

std::vector<double> normalized_bond_entropies(std::span<const double> bits, int n_qubits, int chi_max) {
  const double chi_bits = std::log2(static_cast<double>(chi_max));
  std::vector<double> out(bits.size(), 0.0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    const double bound = std::min({static_cast<double>(k), static_cast<double>(n_qubits - k), chi_bits});
    out[i] = bound > 0.0 ? std::clamp(bits[i] / bound, 0.0, 1.0) : 0.0;
  }
  return out;
}

double entropy_norm(std::span<const double> bits, int n_qubits, int chi_max) {
  if (n_qubits < 2 || bits.empty()) return 0.0;
  const auto norm = normalized_bond_entropies(bits, n_qubits, chi_max);
  return std::accumulate(norm.begin(), norm.end(), 0.0) / static_cast<double>(norm.size());
}

double depth_ratio(int d_in, int d_out) {
  if (d_in == 0) return 0.0;
  return static_cast<double>(d_in - d_out) / static_cast<double>(d_in);
}

double gate_ratio(int g_in, int g_out) {
  if (g_in == 0) return 0.0;
  return static_cast<double>(g_in - g_out) / static_cast<double>(g_in);
}

void RewardWeights::validate() const {
  if (!std::isfinite(qfi) || !std::isfinite(depth) || !std::isfinite(entropy) || !std::isfinite(gates)) {
    throw ConfigError("reward weights must be finite");
  }
}

double reward(const Deltas& d, const RewardWeights& w) {
  return w.qfi * d.qfi + w.depth * d.depth + w.entropy * d.entropy + w.gates * d.gates;
}

MetricsRecord evaluate_structure(const Circuit& c, const SimulatorConfig& sim) {
  MetricsRecord r;
  r.depth = depth(c);
  r.gates = gate_count(c);
  if (c.n_qubits() < 2) {
    r.flags |= kEntropyUndefined;
    return r;
  }
  r.bond_entropies = circuit_bond_entropies(c, sim);
  const int chi = effective_chi(sim);
  r.bond_entropies_norm = normalized_bond_entropies(r.bond_entropies, c.n_qubits(), chi);
  r.entropy_norm = entropy_norm(r.bond_entropies, c.n_qubits(), chi);
  return r;
}

MetricsRecord evaluate(const Circuit& c, const QfiOptions& opt, std::uint64_t seed) {
  MetricsRecord r = evaluate_structure(c, opt.sim);
  if (parameter_count(c) == 0) {
    r.flags |= kQfiUndefined;
  } else {
    r.qfi_norm = qfi(c, opt, seed);
  }
  return r;
}

Deltas deltas_between(const MetricsRecord& reference, const MetricsRecord& current, unsigned* flags) {
  if (flags) {
    if (reference.depth == 0) *flags |= kDepthUndefined;
    if (reference.gates == 0) *flags |= kGatesUndefined;
  }
  return {current.qfi_norm - reference.qfi_norm, depth_ratio(reference.depth, current.depth),
          current.entropy_norm - reference.entropy_norm, gate_ratio(reference.gates, current.gates)};
}

}  // namespace qsopt
