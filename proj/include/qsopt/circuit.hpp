#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace qsopt {

enum class GateKind : std::uint8_t { H, RX, RZ, CX, CZ, SWAP };

inline constexpr std::size_t kGateKindCount = 6;
inline constexpr std::array<GateKind, kGateKindCount> kAllGateKinds = {
    GateKind::H, GateKind::RX, GateKind::RZ, GateKind::CX, GateKind::CZ, GateKind::SWAP};

constexpr bool is_two_qubit(GateKind k) noexcept {
  return k == GateKind::CX || k == GateKind::CZ || k == GateKind::SWAP;
}
constexpr bool is_parameterized(GateKind k) noexcept {
  return k == GateKind::RX || k == GateKind::RZ;
}

/// Lowercase mnemonic used by the text format ("h", "rx", "cx", ...).
std::string_view gate_name(GateKind k) noexcept;

/// A single gate. For CX, `q0` is the control and `q1` the target.
/// Single-qubit gates have `q1 == -1`; `angle` is zero unless the gate is RX/RZ.
struct Gate {
  GateKind kind = GateKind::H;
  int q0 = 0;
  int q1 = -1;
  double angle = 0.0;

  static Gate h(int q) { return {GateKind::H, q, -1, 0.0}; }
  static Gate rx(int q, double theta) { return {GateKind::RX, q, -1, theta}; }
  static Gate rz(int q, double theta) { return {GateKind::RZ, q, -1, theta}; }
  static Gate cx(int control, int target) { return {GateKind::CX, control, target, 0.0}; }
  static Gate cz(int a, int b) { return {GateKind::CZ, a, b, 0.0}; }
  static Gate swap(int a, int b) { return {GateKind::SWAP, a, b, 0.0}; }

  int arity() const noexcept { return is_two_qubit(kind) ? 2 : 1; }
  bool touches(int q) const noexcept { return q0 == q || q1 == q; }
  bool overlaps(const Gate& other) const noexcept {
    return touches(other.q0) || (other.q1 >= 0 && touches(other.q1));
  }

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Throws CircuitError if `g` is malformed or does not fit in `n_qubits`.
void validate_gate(const Gate& g, int n_qubits);

/// Ordered gate list over a fixed qubit register. Immutable after construction;
/// edit functions below return new circuits.
class Circuit {
 public:
  explicit Circuit(int n_qubits, std::vector<Gate> gates = {});

  int n_qubits() const noexcept { return n_qubits_; }
  std::span<const Gate> gates() const noexcept { return gates_; }
  std::size_t size() const noexcept { return gates_.size(); }
  bool empty() const noexcept { return gates_.empty(); }
  const Gate& operator[](std::size_t i) const { return gates_[i]; }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int n_qubits_;
  std::vector<Gate> gates_;
};

/// Moment index of every gate under as-soon-as-possible scheduling.
std::vector<int> moments(const Circuit& c);

/// Number of ASAP moments.
int depth(const Circuit& c);

inline int gate_count(const Circuit& c) { return static_cast<int>(c.size()); }

std::size_t parameter_count(const Circuit& c);

// Structural edits. Positions are indices into the gate list.
Circuit append_gate(const Circuit& c, const Gate& g);
Circuit insert_gate(const Circuit& c, const Gate& g, std::size_t position);
Circuit remove_gate(const Circuit& c, std::size_t position);
Circuit replace_gate(const Circuit& c, std::size_t position, const Gate& g);
/// Exchanges gates at `position` and `position + 1`; they must act on disjoint qubits.
Circuit swap_adjacent(const Circuit& c, std::size_t position);

/// Removes self-inverse pairs and merges same-axis rotations until nothing changes.
Circuit cancel_pairs(const Circuit& c);

/// Angle tolerance used to decide that a merged rotation is the identity.
inline constexpr double kRotationIdentityTol = 1e-12;

struct GateComposition {
  std::array<std::size_t, kGateKindCount> counts{};
  /// All zero for an empty circuit.
  std::array<double, kGateKindCount> fractions{};
  std::size_t total = 0;

  std::size_t count(GateKind k) const { return counts[static_cast<std::size_t>(k)]; }
  double fraction(GateKind k) const { return fractions[static_cast<std::size_t>(k)]; }
};

GateComposition composition(const Circuit& c);

// Builders.
Circuit ghz_circuit(int n);
/// H on every qubit, then `layers` alternating even/odd CX brickwork layers.
Circuit brickwork_circuit(int n, int layers);
/// Uniformly random gates over the full gate set; angles uniform in [0, 2pi).
Circuit random_circuit(int n, int gates, std::uint64_t seed);
/// Unoptimized sensor-style circuit: a Hadamard layer, then random H/RX/RZ/CX/CZ
/// gates (two-qubit gates on neighbours) with a few immediately repeated gates.
/// Angles are multiples of pi/4. `gates` must be at least n.
Circuit sensor_circuit(int n, int gates, std::uint64_t seed);
/// GHZ preparation (H, CX chain) followed by random H/RX/RZ/CZ gates with the
/// same angle set and repeat rule. `gates` must be at least n.
Circuit ghz_sensor_circuit(int n, int gates, std::uint64_t seed);

}  // namespace qsopt
