#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Core>

#include "qsopt/circuit.hpp"
#include "qsopt/statevector.hpp"

namespace qsopt::testing {

/// Runs `c` on the dense oracle from computational basis state `input`.
DenseState run_from_basis(const Circuit& c, Bits input);

/// Full 2^n x 2^n unitary of a circuit, column j = circuit applied to |j>.
Eigen::MatrixXcd circuit_unitary(const Circuit& c);

/// max over entries of |U1 - e^{i phi} U2| with phi chosen from the largest entry of U1.
double unitary_distance_up_to_phase(const Eigen::MatrixXcd& u1, const Eigen::MatrixXcd& u2);

/// |<a|b>|.
double overlap(const DenseState& a, const DenseState& b);

/// Random circuit seeded with many cancellable pairs and mergeable rotations.
Circuit redundant_circuit(int n, int gates, std::uint64_t seed);

}  // namespace qsopt::testing
