#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "qsopt/circuit.hpp"

namespace qsopt {

// Line-oriented circuit text:
//
//   # comment
//   qubits 3
//   h q0
//   rx(1.5707963267948966) q2
//   cx q0 q1
//
// The `qubits` header must be the first non-comment line. Angles are emitted
// with 17 significant digits so that parse(emit(c)) == c.

Circuit parse_circuit(std::string_view text);
std::string emit_circuit(const Circuit& c);

Circuit load_circuit(const std::filesystem::path& path);
void save_circuit(const Circuit& c, const std::filesystem::path& path);

}  // namespace qsopt
