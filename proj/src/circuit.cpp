#include "qsopt/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qsopt/error.hpp"
#include "qsopt/random.hpp"

namespace qsopt {

std::string_view gate_name(GateKind k) noexcept {
  switch (k) {
    case GateKind::H: return "h";
    case GateKind::RX: return "rx";
    case GateKind::RZ: return "rz";
    case GateKind::CX: return "cx";
    case GateKind::CZ: return "cz";
    case GateKind::SWAP: return "swap";
  }
  return "?";
}

void validate_gate(const Gate& g, int n_qubits) {
  auto bad = [&](const std::string& why) {
    throw CircuitError(std::string(gate_name(g.kind)) + ": " + why);
  };
  if (g.q0 < 0 || g.q0 >= n_qubits) bad("qubit index " + std::to_string(g.q0) + " out of range");
  if (is_two_qubit(g.kind)) {
    if (g.q1 < 0 || g.q1 >= n_qubits) bad("qubit index " + std::to_string(g.q1) + " out of range");
    if (g.q0 == g.q1) bad("duplicate qubit " + std::to_string(g.q0));
  } else if (g.q1 != -1) {
    bad("single-qubit gate carries a second qubit");
  }
  if (!std::isfinite(g.angle)) bad("angle is not finite");
  if (!is_parameterized(g.kind) && g.angle != 0.0) bad("angle on a fixed gate");
}

Circuit::Circuit(int n_qubits, std::vector<Gate> gates) : n_qubits_(n_qubits), gates_(std::move(gates)) {
  if (n_qubits_ < 1) throw CircuitError("circuit needs at least one qubit");
  for (const Gate& g : gates_) validate_gate(g, n_qubits_);
}

std::vector<int> moments(const Circuit& c) {
  std::vector<int> frontier(static_cast<std::size_t>(c.n_qubits()), 0);
  std::vector<int> out;
  out.reserve(c.size());
  for (const Gate& g : c.gates()) {
    int m = frontier[g.q0];
    if (g.q1 >= 0) m = std::max(m, frontier[g.q1]);
    out.push_back(m);
    frontier[g.q0] = m + 1;
    if (g.q1 >= 0) frontier[g.q1] = m + 1;
  }
  return out;
}

int depth(const Circuit& c) {
  const auto m = moments(c);
  return m.empty() ? 0 : *std::max_element(m.begin(), m.end()) + 1;
}

std::size_t parameter_count(const Circuit& c) {
  return static_cast<std::size_t>(std::count_if(c.gates().begin(), c.gates().end(),
                                                [](const Gate& g) { return is_parameterized(g.kind); }));
}

namespace {

std::vector<Gate> copy_gates(const Circuit& c) { return {c.gates().begin(), c.gates().end()}; }

void check_position(std::size_t position, std::size_t limit, const char* op) {
  if (position >= limit) {
    throw CircuitError(std::string(op) + ": position " + std::to_string(position) + " out of range [0, " +
                       std::to_string(limit) + ")");
  }
}

bool same_support(const Gate& a, const Gate& b) {
  if (a.arity() != b.arity()) return false;
  if (a.arity() == 1) return a.q0 == b.q0;
  return (a.q0 == b.q0 && a.q1 == b.q1) || (a.q0 == b.q1 && a.q1 == b.q0);
}

bool is_identity_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double r = std::fabs(std::fmod(theta, two_pi));
  return r < kRotationIdentityTol || r > two_pi - kRotationIdentityTol;
}

// Next gate after `i` sharing a qubit with gates[i], or npos.
std::size_t next_on_support(const std::vector<Gate>& gates, std::size_t i) {
  for (std::size_t j = i + 1; j < gates.size(); ++j) {
    if (gates[j].overlaps(gates[i])) return j;
  }
  return std::string::npos;
}

// Attempts one reduction anchored at gate i. Returns true if `gates` changed.
bool reduce_at(std::vector<Gate>& gates, std::size_t i) {
  const std::size_t j = next_on_support(gates, i);
  if (j == std::string::npos) return false;
  const Gate& a = gates[i];
  const Gate& b = gates[j];
  if (a.kind != b.kind || !same_support(a, b)) return false;

  switch (a.kind) {
    case GateKind::H:
    case GateKind::CZ:
    case GateKind::SWAP:
      break;
    case GateKind::CX:
      if (a.q0 != b.q0) return false;  // reversed control/target is not an inverse
      break;
    case GateKind::RX:
    case GateKind::RZ: {
      const double merged = a.angle + b.angle;
      if (!is_identity_angle(merged)) {
        gates[i].angle = merged;
        gates.erase(gates.begin() + static_cast<std::ptrdiff_t>(j));
        return true;
      }
      break;
    }
  }
  gates.erase(gates.begin() + static_cast<std::ptrdiff_t>(j));
  gates.erase(gates.begin() + static_cast<std::ptrdiff_t>(i));
  return true;
}

}  // namespace

Circuit append_gate(const Circuit& c, const Gate& g) {
  auto gates = copy_gates(c);
  gates.push_back(g);
  return Circuit(c.n_qubits(), std::move(gates));
}

Circuit insert_gate(const Circuit& c, const Gate& g, std::size_t position) {
  check_position(position, c.size() + 1, "insert_gate");
  auto gates = copy_gates(c);
  gates.insert(gates.begin() + static_cast<std::ptrdiff_t>(position), g);
  return Circuit(c.n_qubits(), std::move(gates));
}

Circuit remove_gate(const Circuit& c, std::size_t position) {
  check_position(position, c.size(), "remove_gate");
  auto gates = copy_gates(c);
  gates.erase(gates.begin() + static_cast<std::ptrdiff_t>(position));
  return Circuit(c.n_qubits(), std::move(gates));
}

Circuit replace_gate(const Circuit& c, std::size_t position, const Gate& g) {
  check_position(position, c.size(), "replace_gate");
  auto gates = copy_gates(c);
  gates[position] = g;
  return Circuit(c.n_qubits(), std::move(gates));
}

Circuit swap_adjacent(const Circuit& c, std::size_t position) {
  check_position(position, c.size() > 0 ? c.size() - 1 : 0, "swap_adjacent");
  if (c[position].overlaps(c[position + 1])) {
    throw CircuitError("swap_adjacent: gates at " + std::to_string(position) + " and " +
                       std::to_string(position + 1) + " share a qubit");
  }
  auto gates = copy_gates(c);
  std::swap(gates[position], gates[position + 1]);
  return Circuit(c.n_qubits(), std::move(gates));
}

Circuit cancel_pairs(const Circuit& c) {
  auto gates = copy_gates(c);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < gates.size(); ++i) {
      if (reduce_at(gates, i)) {
        changed = true;
        break;
      }
    }
  }
  return Circuit(c.n_qubits(), std::move(gates));
}

GateComposition composition(const Circuit& c) {
  GateComposition out;
  for (const Gate& g : c.gates()) ++out.counts[static_cast<std::size_t>(g.kind)];
  out.total = c.size();
  if (out.total > 0) {
    for (std::size_t k = 0; k < kGateKindCount; ++k) {
      out.fractions[k] = static_cast<double>(out.counts[k]) / static_cast<double>(out.total);
    }
  }
  return out;
}

Circuit ghz_circuit(int n) {
  std::vector<Gate> gates{Gate::h(0)};
  for (int q = 0; q + 1 < n; ++q) gates.push_back(Gate::cx(q, q + 1));
  return Circuit(n, std::move(gates));
}

Circuit brickwork_circuit(int n, int layers) {
  std::vector<Gate> gates;
  for (int q = 0; q < n; ++q) gates.push_back(Gate::h(q));
  for (int layer = 0; layer < layers; ++layer) {
    for (int q = layer % 2; q + 1 < n; q += 2) gates.push_back(Gate::cx(q, q + 1));
  }
  return Circuit(n, std::move(gates));
}

Circuit random_circuit(int n, int count, std::uint64_t seed) {
  Rng rng(seed);
  const std::uint64_t kinds = n >= 2 ? kGateKindCount : 3;
  std::vector<Gate> gates;
  gates.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto kind = kAllGateKinds[rng.below(kinds)];
    const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    if (is_two_qubit(kind)) {
      int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (b >= a) ++b;
      gates.push_back({kind, a, b, 0.0});
    } else if (is_parameterized(kind)) {
      gates.push_back({kind, a, -1, rng.uniform() * 2.0 * std::numbers::pi});
    } else {
      gates.push_back(Gate::h(a));
    }
  }
  return Circuit(n, std::move(gates));
}

Circuit sensor_circuit(int n, int count, std::uint64_t seed) {
  if (count < n) throw CircuitError("sensor_circuit needs at least one gate per qubit");
  Rng rng(seed);
  std::vector<Gate> gates;
  for (int q = 0; q < n; ++q) gates.push_back(Gate::h(q));
  // Cumulative weights over H, RX, RZ, CX, CZ.
  constexpr double cumulative[] = {0.25, 0.40, 0.60, 0.85, 1.0};
  constexpr GateKind kinds[] = {GateKind::H, GateKind::RX, GateKind::RZ, GateKind::CX, GateKind::CZ};
  while (static_cast<int>(gates.size()) < count) {
    const double u = rng.uniform();
    GateKind kind = GateKind::CZ;
    for (int i = 0; i < 5; ++i) {
      if (u < cumulative[i]) {
        kind = kinds[i];
        break;
      }
    }
    if (n < 2 && is_two_qubit(kind)) kind = GateKind::H;
    Gate g;
    if (is_two_qubit(kind)) {
      const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
      g = {kind, q, q + 1, 0.0};
    } else {
      const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      const double angle = is_parameterized(kind) ? static_cast<double>(1 + rng.below(4)) * std::numbers::pi / 4 : 0.0;
      g = {kind, q, -1, angle};
    }
    gates.push_back(g);
    if (static_cast<int>(gates.size()) < count && rng.bernoulli(0.15)) gates.push_back(g);
  }
  return Circuit(n, std::move(gates));
}

Circuit ghz_sensor_circuit(int n, int count, std::uint64_t seed) {
  if (n < 2) throw CircuitError("ghz_sensor_circuit needs at least two qubits");
  if (count < n) throw CircuitError("ghz_sensor_circuit needs room for the GHZ preparation");
  Rng rng(seed);
  const Circuit prep = ghz_circuit(n);
  std::vector<Gate> gates(prep.gates().begin(), prep.gates().end());
  while (static_cast<int>(gates.size()) < count) {
    // All three draws happen every iteration so the stream does not depend on the kind.
    const double u = rng.uniform();
    const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const double angle = static_cast<double>(1 + rng.below(4)) * std::numbers::pi / 4;
    Gate g;
    if (u < 0.20) {
      g = Gate::h(q);
    } else if (u < 0.45) {
      g = Gate::rx(q, angle);
    } else if (u < 0.80) {
      g = Gate::rz(q, angle);
    } else {
      const int a = std::min(q, n - 2);
      g = Gate::cz(a, a + 1);
    }
    gates.push_back(g);
    if (static_cast<int>(gates.size()) < count && rng.bernoulli(0.15)) gates.push_back(g);
  }
  return Circuit(n, std::move(gates));
}

}  // namespace qsopt
