#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "qsopt/circuit.hpp"
#include "qsopt/gates.hpp"
#include "qsopt/random.hpp"
#include "qsopt/sampling.hpp"

namespace qsopt {

inline constexpr int kUnboundedChi = std::numeric_limits<int>::max();

struct MpsOptions {
  /// Bond dimension cap.
  int chi_max = 64;
  /// Largest total squared singular-value weight discarded per two-site update.
  double trunc_tol = 1e-10;

  /// No truncation beyond numerically-zero singular values.
  static MpsOptions exact() { return {kUnboundedChi, 0.0}; }
};

struct PeakStats {
  int max_bond = 1;
  std::size_t memory_estimate_bytes = 0;
};

/// Matrix product state over n qubits.
///
/// Site k holds two matrices A_k[0], A_k[1] of shape (left_bond x right_bond);
/// boundary bonds have dimension 1. The state is kept in mixed-canonical form
/// around `center()`: sites left of it are left-orthonormal and sites right of
/// it are right-orthonormal. The center moves lazily, only when an operation
/// needs it. Two-qubit gates on non-neighbours are routed through SWAPs.
///
/// Singular values below kZeroSingular are always dropped; beyond that,
/// truncation keeps at most chi_max values and discards at most trunc_tol of
/// squared weight, after which the kept values are renormalized.
class MpsState {
 public:
  using Complex = std::complex<double>;
  using Matrix = Eigen::MatrixXcd;

  static constexpr double kZeroSingular = 1e-14;

  /// |0...0>.
  explicit MpsState(int n_qubits, MpsOptions options = {});
  static MpsState from_basis(std::string_view bitstring, MpsOptions options = {});

  int n_qubits() const noexcept { return static_cast<int>(sites_.size()); }
  const MpsOptions& options() const noexcept { return options_; }
  int center() const noexcept { return center_; }
  /// Dimension of bond k (between qubits k-1 and k), 1 <= k <= n-1.
  int bond_dimension(int bond) const;
  /// Site tensor slice A_k[s].
  const Matrix& site(int k, int s) const { return sites_[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)]; }

  void apply(const Gate& g);
  void apply_1q(const Matrix2<double>& u, int q);
  /// `u` acts on |b_a b_b> with index 2*b_a + b_b.
  void apply_2q(const Matrix4<double>& u, int a, int b);
  void apply_pauli(Pauli p, int q) { apply_1q(pauli_matrix<double>(p), q); }
  /// Projective reset of qubit q to |0>, drawing the collapse from `rng`.
  void reset(int q, Rng& rng);

  /// Schmidt coefficients across bond k, descending and strictly positive.
  /// Re-gauges the state (moves the center) but leaves it unchanged.
  Eigen::VectorXd schmidt(int bond);
  double bond_entropy(int bond);
  /// Entropy in bits at bonds 1..n-1.
  std::vector<double> bond_entropies();

  Complex amplitude(Bits b) const;
  Complex amplitude(std::string_view bitstring) const;
  /// <psi|psi> by full contraction.
  double norm_squared() const;
  /// Exact outcome probabilities by pruned enumeration. Intended for n <= 24.
  Distribution exact_distribution() const;

  /// Exact multinomial sampling: outcomes are drawn qubit by qubit from the
  /// chain's conditional marginals, splitting shot counts binomially.
  OutcomeCounts sample(std::uint64_t shots, Rng& rng);

  /// Largest bond dimension and largest total tensor memory (16 B per element)
  /// reached over the state's lifetime.
  PeakStats peak_stats() const noexcept { return peak_; }
  double last_discarded_weight() const noexcept { return last_discarded_; }
  double total_discarded_weight() const noexcept { return total_discarded_; }

 private:
  using Site = std::array<Matrix, 2>;

  void check_qubit(int q) const;
  void move_center(int k);
  void shift_center_right();
  void shift_center_left();
  /// Applies `u` (index 2*s_i + s_{i+1}) to sites i and i+1 and truncates.
  void update_pair(int i, const Matrix4<double>& u);
  void track_peak();
  void sample_branch(int k, const Eigen::RowVectorXcd& env, Bits prefix, std::uint64_t count, Rng& rng,
                     OutcomeCounts& out) const;

  MpsOptions options_;
  std::vector<Site> sites_;
  int center_ = 0;
  PeakStats peak_;
  double last_discarded_ = 0.0;
  double total_discarded_ = 0.0;
};

/// Runs `c` from |0...0>.
MpsState run_mps(const Circuit& c, MpsOptions options = {});

}  // namespace qsopt
