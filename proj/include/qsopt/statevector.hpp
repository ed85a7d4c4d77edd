#pragma once

#include <complex>
#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "qsopt/circuit.hpp"
#include "qsopt/gates.hpp"
#include "qsopt/random.hpp"
#include "qsopt/sampling.hpp"

namespace qsopt {

/// Default qubit cap of the dense backend.
inline constexpr int kStatevectorDefaultCap = 14;
/// Largest cap a caller may request.
inline constexpr int kStatevectorMaxCap = 20;

/// Dense 2^n amplitude vector. Basis index uses qubit 0 as the most significant bit.
template <class Real>
class DenseStateT {
 public:
  using Complex = std::complex<Real>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  /// |0...0> on n qubits.
  explicit DenseStateT(int n_qubits);
  static DenseStateT from_basis(std::string_view bitstring);

  int n_qubits() const noexcept { return n_; }
  const Vector& amplitudes() const noexcept { return amps_; }
  Complex amplitude(Bits b) const { return amps_(static_cast<Eigen::Index>(b)); }
  Real norm() const { return amps_.norm(); }
  std::size_t memory_bytes() const { return static_cast<std::size_t>(amps_.size()) * sizeof(Complex); }

  void apply(const Gate& g);
  void apply_1q(const Matrix2<Real>& u, int q);
  /// `u` acts on |b_a b_b> with index 2*b_a + b_b.
  void apply_2q(const Matrix4<Real>& u, int a, int b);
  void apply_pauli(Pauli p, int q) { apply_1q(pauli_matrix<Real>(p), q); }
  /// Projective reset of qubit q to |0>, drawing the collapse from `rng`.
  void reset(int q, Rng& rng);

 private:
  void check_qubit(int q) const;

  int n_;
  Vector amps_;
};

using DenseState = DenseStateT<double>;

/// Runs `c` from |0...0>. Throws SimulationError when c.n_qubits() > max_qubits.
template <class Real = double>
DenseStateT<Real> run_statevector(const Circuit& c, int max_qubits = kStatevectorDefaultCap);

/// P(b) = |a_b|^2 for every basis state with nonzero probability.
Distribution exact_distribution(const DenseState& s);

/// Singular values of the amplitudes reshaped to 2^cut x 2^(n-cut), descending.
Eigen::VectorXd exact_schmidt(const DenseState& s, int cut);
double exact_bond_entropy(const DenseState& s, int cut);

/// Inverse-CDF sampling of `shots` computational-basis outcomes.
OutcomeCounts sample_dense(const DenseState& s, std::uint64_t shots, Rng& rng);

}  // namespace qsopt
