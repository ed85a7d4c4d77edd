#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qsopt/error.hpp"
#include "qsopt/mps.hpp"
#include "qsopt/statevector.hpp"

using namespace qsopt;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

MpsOptions exact_for(int n) { return {1 << (n / 2), 0.0}; }

MpsState bell() {
  MpsState s(2);
  s.apply(Gate::h(0));
  s.apply(Gate::cx(0, 1));
  return s;
}

double max_amplitude_error(const MpsState& m, const DenseState& d) {
  double worst = 0.0;
  for (Bits b = 0; b < (Bits{1} << d.n_qubits()); ++b) worst = std::max(worst, std::abs(m.amplitude(b) - d.amplitude(b)));
  return worst;
}

double fidelity(const MpsState& m, const DenseState& d) {
  std::complex<double> ov = 0.0;
  for (Bits b = 0; b < (Bits{1} << d.n_qubits()); ++b) ov += std::conj(d.amplitude(b)) * m.amplitude(b);
  return std::norm(ov);
}

}  // namespace

TEST(MpsFromBasis, Examples) {
  MpsState a = MpsState::from_basis("00");
  EXPECT_EQ(a.amplitude("00"), std::complex<double>(1.0));
  EXPECT_EQ(a.bond_entropy(1), 0.0);

  const MpsState b = MpsState::from_basis("10101");
  EXPECT_EQ(b.amplitude("10101"), std::complex<double>(1.0));
  EXPECT_EQ(b.amplitude("10100"), std::complex<double>(0.0));

  MpsState c = MpsState::from_basis("0");
  c.apply(Gate::h(0));
  const Distribution p = c.exact_distribution();
  EXPECT_NEAR(p.at(0), 0.5, 1e-15);
  EXPECT_NEAR(p.at(1), 0.5, 1e-15);
}

TEST(MpsFromBasis, Errors) {
  EXPECT_THROW(MpsState::from_basis("01x"), SimulationError);
  EXPECT_THROW(MpsState(3).amplitude("01"), SimulationError);
  EXPECT_THROW(MpsState(0), SimulationError);
}

TEST(MpsSingleQubit, Examples) {
  MpsState h(1);
  h.apply(Gate::h(0));
  EXPECT_NEAR(h.amplitude(Bits{0}).real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(h.amplitude(Bits{1}).real(), kInvSqrt2, 1e-15);

  MpsState rz(1);
  rz.apply(Gate::rz(0, 0.9));
  EXPECT_NEAR(rz.exact_distribution().at(0), 1.0, 1e-15);

  MpsState rx(1);
  rx.apply(Gate::rx(0, std::numbers::pi));
  EXPECT_NEAR(std::norm(rx.amplitude(Bits{1})), 1.0, 1e-12);

  EXPECT_THROW(rx.apply_1q(single_qubit_unitary<double>(GateKind::H, 0.0), 1), SimulationError);
}

TEST(MpsSingleQubit, BondDimensionsUnchanged) {
  MpsState s(4);
  s.apply(Gate::h(1));
  s.apply(Gate::rx(3, 0.3));
  for (int k = 1; k < 4; ++k) EXPECT_EQ(s.bond_dimension(k), 1);
}

TEST(MpsTwoQubit, BellSchmidt) {
  MpsState s = bell();
  const Eigen::VectorXd l = s.schmidt(1);
  ASSERT_EQ(l.size(), 2);
  EXPECT_NEAR(l(0), kInvSqrt2, 1e-12);
  EXPECT_NEAR(l(1), kInvSqrt2, 1e-12);
  EXPECT_NEAR(s.bond_entropy(1), 1.0, 1e-12);
  EXPECT_NEAR(s.amplitude("00").real(), kInvSqrt2, 1e-12);
  EXPECT_NEAR(std::abs(s.amplitude("01")), 0.0, 1e-12);
  EXPECT_EQ(s.peak_stats().max_bond, 2);
}

TEST(MpsTwoQubit, NonAdjacentMatchesOracle) {
  const Circuit c(3, {Gate::h(0), Gate::cx(0, 2), Gate::rx(1, 0.3), Gate::cz(2, 0), Gate::swap(0, 2)});
  EXPECT_LT(max_amplitude_error(run_mps(c), run_statevector(c)), 1e-10);
  MpsState idle(3);
  idle.apply(Gate::cx(0, 2));
  EXPECT_NEAR(std::abs(idle.amplitude("000")), 1.0, 1e-12);
}

TEST(MpsTwoQubit, CzOnPlusPlusEntangles) {
  const Circuit c(2, {Gate::h(0), Gate::h(1), Gate::cz(0, 1)});
  MpsState s = run_mps(c);
  const double oracle = exact_bond_entropy(run_statevector(c), 1);
  EXPECT_GT(oracle, 0.5);
  EXPECT_NEAR(s.bond_entropy(1), oracle, 1e-12);
}

TEST(MpsTwoQubit, Errors) {
  MpsState s(3);
  EXPECT_THROW(s.apply_2q(two_qubit_unitary<double>(GateKind::CX), 1, 1), SimulationError);
  EXPECT_THROW(s.apply_2q(two_qubit_unitary<double>(GateKind::CX), 0, 3), SimulationError);
  EXPECT_THROW(s.schmidt(0), SimulationError);
  EXPECT_THROW(s.schmidt(3), SimulationError);
}

TEST(MpsOracle, RandomCircuitsExactCapacity) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const int n = 2 + static_cast<int>(seed % 9);
    const Circuit c = random_circuit(n, 40, seed);
    MpsState m = run_mps(c, exact_for(n));
    const DenseState d = run_statevector(c);
    EXPECT_LT(max_amplitude_error(m, d), 1e-10) << "seed " << seed;
    EXPECT_LT(total_variation(m.exact_distribution(), exact_distribution(d)), 1e-10);
    for (int k = 1; k < n; ++k) EXPECT_NEAR(m.bond_entropy(k), exact_bond_entropy(d, k), 1e-9);
  }
}

TEST(MpsOracle, SchmidtMatchesDenseSvd) {
  const Circuit c = random_circuit(6, 50, 77);
  MpsState m = run_mps(c, MpsOptions::exact());
  const DenseState d = run_statevector(c);
  for (int k = 1; k < 6; ++k) {
    const Eigen::VectorXd a = m.schmidt(k);
    const Eigen::VectorXd b = exact_schmidt(d, k);
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      const double ai = i < a.size() ? a(i) : 0.0;
      EXPECT_NEAR(ai, b(i), 1e-9) << "bond " << k << " index " << i;
    }
  }
}

TEST(MpsEntropy, ZeroAndGhz) {
  MpsState zero(6);
  for (double s : zero.bond_entropies()) EXPECT_EQ(s, 0.0);
  MpsState ghz = run_mps(ghz_circuit(8));
  for (double s : ghz.bond_entropies()) EXPECT_NEAR(s, 1.0, 1e-9);
}

TEST(MpsInvariants, NormAndSpectrumAfterEveryGate) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Circuit c = random_circuit(7, 60, 100 + seed);
    MpsState s(7, {4, 1e-10});
    for (const Gate& g : c.gates()) {
      s.apply(g);
      ASSERT_NEAR(s.norm_squared(), 1.0, 1e-9);
      for (int k = 1; k < 7; ++k) ASSERT_LE(s.bond_dimension(k), 4);
    }
    for (int k = 1; k < 7; ++k) {
      const Eigen::VectorXd l = s.schmidt(k);
      EXPECT_NEAR(l.squaredNorm(), 1.0, 1e-9);
      for (Eigen::Index i = 0; i < l.size(); ++i) {
        EXPECT_GT(l(i), 0.0);
        if (i > 0) EXPECT_LE(l(i), l(i - 1));
      }
      const double bound = std::min({double(k), double(7 - k), std::log2(4.0)});
      EXPECT_LE(s.bond_entropy(k), bound + 1e-9);
    }
  }
}

TEST(MpsInvariants, TruncationMonotone) {
  const Circuit c = random_circuit(10, 120, 31337);
  const DenseState d = run_statevector(c);
  double previous = 2.0;
  for (int chi : {32, 16, 8, 4, 2, 1}) {
    const double f = fidelity(run_mps(c, {chi, 0.0}), d);
    EXPECT_LE(f, previous + 1e-12) << "chi " << chi;
    previous = f;
  }
  EXPECT_NEAR(fidelity(run_mps(c, {32, 0.0}), d), 1.0, 1e-10);
  EXPECT_LT(previous, 0.99);
}

TEST(MpsSample, Examples) {
  Rng rng(1);
  MpsState zero(5);
  const OutcomeCounts z = zero.sample(100, rng);
  EXPECT_EQ(z.count(0), 100u);

  MpsState h(1);
  h.apply(Gate::h(0));
  const OutcomeCounts counts = h.sample(5000, rng);
  EXPECT_EQ(counts.count(0) + counts.count(1), 5000u);
  EXPECT_NEAR(counts.frequency(0), 0.5, 0.03);
}

TEST(MpsSample, RandomCircuitTotalVariation) {
  const Circuit c = random_circuit(8, 40, 8);
  MpsState m = run_mps(c);
  Rng rng(99);
  const OutcomeCounts counts = m.sample(100000, rng);
  EXPECT_EQ(counts.shots, 100000u);
  EXPECT_LT(total_variation(counts.distribution(), exact_distribution(run_statevector(c))), 0.02);
}

TEST(MpsSample, Reproducible) {
  const Circuit c = random_circuit(6, 40, 4);
  MpsState a = run_mps(c);
  MpsState b = run_mps(c);
  Rng r1(17), r2(17);
  EXPECT_EQ(a.sample(3000, r1).counts, b.sample(3000, r2).counts);
}

TEST(MpsPeakStats, Examples) {
  const MpsState product(24);
  EXPECT_EQ(product.peak_stats().max_bond, 1);
  EXPECT_EQ(product.peak_stats().memory_estimate_bytes, 24u * 2u * 16u);

  EXPECT_EQ(bell().peak_stats().max_bond, 2);

  const MpsState ghz = run_mps(ghz_circuit(24));
  EXPECT_EQ(ghz.peak_stats().max_bond, 2);
  EXPECT_LT(ghz.peak_stats().memory_estimate_bytes, 10u * 1024u);
}

TEST(MpsReset, CollapsesToZero) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    MpsState s = run_mps(ghz_circuit(4));
    s.reset(2, rng);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
    const Distribution p = s.exact_distribution();
    // Either |0000> or |1101>, each with certainty after collapse.
    ASSERT_EQ(p.size(), 1u);
    EXPECT_TRUE(p.count(0b0000) || p.count(0b1101));
  }
}
