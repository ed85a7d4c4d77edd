#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace qsopt {

/// Computational-basis outcome packed with qubit 0 as the most significant
/// of `n` bits, so that numeric order equals bitstring order ("q0 q1 ...").
using Bits = std::uint64_t;

inline constexpr int kMaxPackedQubits = 64;

std::string bits_to_string(Bits b, int n);
/// Throws SimulationError on characters other than '0'/'1' or more than 64 bits.
Bits bits_from_string(std::string_view s);

inline int bit_of(Bits b, int qubit, int n) { return static_cast<int>((b >> (n - 1 - qubit)) & 1U); }

/// Probability per outcome; outcomes with zero probability may be absent.
using Distribution = std::map<Bits, double>;

struct OutcomeCounts {
  int n_qubits = 0;
  std::uint64_t shots = 0;
  std::map<Bits, std::uint64_t> counts;

  std::uint64_t count(Bits b) const {
    auto it = counts.find(b);
    return it == counts.end() ? 0 : it->second;
  }
  double frequency(Bits b) const { return shots ? static_cast<double>(count(b)) / static_cast<double>(shots) : 0.0; }
  Distribution distribution() const;
};

double total_variation(const Distribution& p, const Distribution& q);

}  // namespace qsopt
