#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qsopt/error.hpp"
#include "qsopt/metrics.hpp"

using namespace qsopt;

namespace {

QfiOptions exact_mode() {
  QfiOptions o;
  o.sim.backend = Backend::Statevector;
  o.shots = 0;
  return o;
}

// Independent evaluation of the statistic straight from the dense oracle, one
// outcome index at a time over the full 2^n basis.
double oracle_qfi(const Circuit& c) {
  double total = 0.0;
  int params = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!is_parameterized(c[i].kind)) continue;
    ++params;
    Gate up = c[i], down = c[i];
    up.angle += std::numbers::pi / 2;
    down.angle -= std::numbers::pi / 2;
    const auto a = run_statevector(replace_gate(c, i, up)).amplitudes();
    const auto b = run_statevector(replace_gate(c, i, down)).amplitudes();
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      const double pa = std::norm(a(k)), pb = std::norm(b(k));
      if (pa + pb > 0.0) total += 4.0 * (pa - pb) * (pa - pb) / (pa + pb);
    }
  }
  return total / params / 8.0;
}

}  // namespace

TEST(Qfi, RxHalfPiExact) {
  const Circuit c(1, {Gate::rx(0, std::numbers::pi / 2)});
  EXPECT_NEAR(qfi(c, exact_mode(), 0), 1.0, 1e-12);
}

TEST(Qfi, RzOnlyIsZero) {
  const Circuit c(2, {Gate::h(0), Gate::rz(0, 0.4), Gate::cx(0, 1), Gate::rz(1, 1.1)});
  EXPECT_NEAR(qfi(c, exact_mode(), 0), 0.0, 1e-12);
}

TEST(Qfi, RxHalfPiShots) {
  const Circuit c(1, {Gate::rx(0, std::numbers::pi / 2)});
  QfiOptions o;
  o.shots = 5000;
  for (std::uint64_t seed = 0; seed < 20; ++seed) EXPECT_NEAR(qfi(c, o, seed), 1.0, 0.05);
}

TEST(Qfi, ExactMatchesOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Circuit c = random_circuit(4, 20, seed);
    if (parameter_count(c) == 0) continue;
    EXPECT_NEAR(qfi(c, exact_mode(), 0), oracle_qfi(c), 1e-12);
  }
}

TEST(Qfi, ShotModeConverges) {
  const Circuit circuits[] = {
      Circuit(2, {Gate::h(0), Gate::rx(0, 0.7), Gate::cx(0, 1), Gate::rz(1, 0.3), Gate::rx(1, 1.2)}),
      Circuit(3, {Gate::rx(0, 0.4), Gate::cx(0, 1), Gate::rx(2, 2.0), Gate::cz(1, 2), Gate::h(2)}),
      Circuit(1, {Gate::h(0), Gate::rz(0, 0.9), Gate::h(0)}),
  };
  for (const Circuit& c : circuits) {
    QfiOptions o;
    o.shots = 500000;
    EXPECT_NEAR(qfi(c, o, 12), qfi(c, exact_mode(), 0), 0.01);
  }
}

TEST(Qfi, BoundedAndDeterministic) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Circuit c = random_circuit(5, 25, 50 + seed);
    if (parameter_count(c) == 0) continue;
    QfiOptions o;
    o.shots = 1000;
    const double v = qfi(c, o, seed);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_EQ(v, qfi(c, o, seed));
    const double e = qfi(c, exact_mode(), 0);
    EXPECT_EQ(e, qfi(c, exact_mode(), 0));
    EXPECT_LE(e, 1.0);
  }
}

TEST(Qfi, Errors) {
  EXPECT_THROW(qfi(ghz_circuit(3), exact_mode(), 0), MetricError);
  QfiOptions mps_exact;
  mps_exact.shots = 0;
  EXPECT_THROW(qfi(Circuit(1, {Gate::rx(0, 1.0)}), mps_exact, 0), MetricError);
  QfiOptions noisy = exact_mode();
  noisy.sim.noise = NoiseParams::standard();
  EXPECT_THROW(qfi(Circuit(1, {Gate::rx(0, 1.0)}), noisy, 0), MetricError);
}

TEST(Qfi, StatisticHandlesDisjointSupports) {
  EXPECT_DOUBLE_EQ(parameter_shift_qfi({{1, 1.0}}, {{0, 1.0}}), 8.0);
  EXPECT_DOUBLE_EQ(parameter_shift_qfi({{0, 0.5}, {1, 0.5}}, {{0, 0.5}, {1, 0.5}}), 0.0);
  EXPECT_DOUBLE_EQ(parameter_shift_qfi({{0, 0.0}}, {{0, 0.0}}), 0.0);
}

TEST(EntropyNorm, Examples) {
  SimulatorConfig exact;
  exact.mps = MpsOptions::exact();
  const MetricsRecord ghz = evaluate_structure(ghz_circuit(4), exact);
  EXPECT_NEAR(ghz.entropy_norm, 5.0 / 6.0, 1e-9);
  EXPECT_EQ(evaluate_structure(Circuit(4, {Gate::h(1)}), exact).entropy_norm, 0.0);
  EXPECT_NEAR(evaluate_structure(Circuit(2, {Gate::h(0), Gate::cx(0, 1)}), exact).entropy_norm, 1.0, 1e-12);

  const MetricsRecord single = evaluate_structure(Circuit(1, {Gate::h(0)}), exact);
  EXPECT_EQ(single.entropy_norm, 0.0);
  EXPECT_TRUE(single.flags & kEntropyUndefined);
}

TEST(EntropyNorm, ChiBoundEntersNormalization) {
  const double bits[] = {1.0, 2.0, 1.0};
  const auto capped = normalized_bond_entropies(bits, 4, 2);
  EXPECT_EQ(capped, (std::vector<double>{1.0, 1.0, 1.0}));
  const auto wide = normalized_bond_entropies(bits, 4, 64);
  EXPECT_EQ(wide, (std::vector<double>{1.0, 1.0, 1.0}));
  EXPECT_NEAR(entropy_norm(std::vector<double>{0.5, 0.5, 0.5}, 4, 64), (0.5 + 0.25 + 0.5) / 3, 1e-15);
}

TEST(EntropyNorm, BackendsAgree) {
  const Circuit c = random_circuit(7, 40, 21);
  SimulatorConfig mps;
  mps.mps = MpsOptions::exact();
  SimulatorConfig dense;
  dense.backend = Backend::Statevector;
  EXPECT_NEAR(evaluate_structure(c, mps).entropy_norm, evaluate_structure(c, dense).entropy_norm, 1e-9);
}

TEST(EntropyNorm, InvariantUnderLocalGates) {
  Rng rng(6);
  SimulatorConfig sim;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Circuit c = random_circuit(6, 30, seed);
    const double before = evaluate_structure(c, sim).entropy_norm;
    for (int i = 0; i < 10; ++i) {
      const int q = static_cast<int>(rng.below(6));
      const GateKind kind = kAllGateKinds[rng.below(3)];
      c = append_gate(c, {kind, q, -1, is_parameterized(kind) ? rng.uniform() * 6.0 : 0.0});
    }
    EXPECT_NEAR(evaluate_structure(c, sim).entropy_norm, before, 1e-9);
  }
}

TEST(Ratios, Examples) {
  EXPECT_DOUBLE_EQ(depth_ratio(10, 8), 0.2);
  EXPECT_NEAR(depth_ratio(7, 5), 0.2857, 1e-4);
  EXPECT_EQ(depth_ratio(7, 5), 2.0 / 7.0);
  EXPECT_EQ(depth_ratio(9, 9), 0.0);
  EXPECT_LT(depth_ratio(5, 7), 0.0);
  EXPECT_EQ(depth_ratio(0, 3), 0.0);

  EXPECT_NEAR(gate_ratio(74, 68), 0.0811, 1e-4);
  EXPECT_EQ(gate_ratio(74, 68), 6.0 / 74.0);
  EXPECT_EQ(gate_ratio(12, 12), 0.0);
  EXPECT_EQ(gate_ratio(20, 0), 1.0);
  EXPECT_EQ(gate_ratio(0, 0), 0.0);
}

TEST(Ratios, ZeroReferenceIsFlagged) {
  MetricsRecord empty, some;
  some.depth = 3;
  some.gates = 4;
  unsigned flags = 0;
  const Deltas d = deltas_between(empty, some, &flags);
  EXPECT_EQ(d.depth, 0.0);
  EXPECT_EQ(d.gates, 0.0);
  EXPECT_TRUE(flags & kDepthUndefined);
  EXPECT_TRUE(flags & kGatesUndefined);
}

TEST(Reward, Examples) {
  const RewardWeights defaults;
  EXPECT_EQ(reward({}, defaults), 0.0);
  EXPECT_DOUBLE_EQ(reward({0.3, 0.7, 0.2, 0.1}, {1, 0, 0, 0}), 0.3);
  // 0.2 + 0.05714 + 0.123 + 0.00811
  EXPECT_NEAR(reward({0.5, 0.2857, 0.41, 0.0811}, defaults), 0.38825, 1e-12);
}

TEST(Reward, LinearInEachDelta) {
  const RewardWeights w{0.4, 0.2, 0.3, 0.1};
  const Deltas base{0.1, -0.2, 0.3, 0.05};
  const double h = 1e-3;
  double Deltas::*fields[] = {&Deltas::qfi, &Deltas::depth, &Deltas::entropy, &Deltas::gates};
  const double weights[] = {w.qfi, w.depth, w.entropy, w.gates};
  for (int i = 0; i < 4; ++i) {
    Deltas up = base, down = base;
    up.*fields[i] += h;
    down.*fields[i] -= h;
    EXPECT_NEAR((reward(up, w) - reward(down, w)) / (2 * h), weights[i], 1e-10);
  }
}

TEST(Reward, WeightValidation) {
  EXPECT_NO_THROW(RewardWeights{}.validate());
  EXPECT_THROW((RewardWeights{std::nan(""), 0, 0, 0}.validate()), ConfigError);
}

TEST(Evaluate, RecordsDeltasAgainstReference) {
  QfiOptions o = exact_mode();
  const Circuit before(3, {Gate::h(0), Gate::h(0), Gate::rx(1, 0.5), Gate::cx(1, 2), Gate::rz(2, 0.2)});
  const Circuit after = cancel_pairs(before);
  const MetricsRecord a = evaluate(before, o, 0);
  const MetricsRecord b = evaluate(after, o, 0);
  const Deltas d = deltas_between(a, b);
  EXPECT_EQ(d.gates, gate_ratio(5, 3));
  EXPECT_EQ(d.depth, depth_ratio(depth(before), depth(after)));
  EXPECT_NEAR(d.qfi, 0.0, 1e-12);
  EXPECT_TRUE(evaluate(ghz_circuit(3), o, 0).flags & kQfiUndefined);
}
