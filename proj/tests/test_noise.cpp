#include <gtest/gtest.h>

#include <cmath>

#include "qsopt/error.hpp"
#include "qsopt/noise.hpp"
#include "qsopt/simulate.hpp"

using namespace qsopt;

namespace {

double three_sigma(double p, double trials) { return 3.0 * std::sqrt(p * (1.0 - p) / trials); }

}  // namespace

TEST(NoiseParams, Validation) {
  EXPECT_NO_THROW(NoiseParams::standard().validate());
  NoiseParams p = NoiseParams::standard();
  p.t2_us = 2.0 * p.t1_us + 1.0;
  try {
    p.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("t2"), std::string::npos) << e.what();
  }
  p = NoiseParams::standard();
  p.p_1q = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
  p = NoiseParams::standard();
  p.dur_2q_us = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Depolarizing, ForcedBranches) {
  NoiseParams p = NoiseParams::standard();
  p.p_1q = 0.0;
  Rng rng(1);
  const int q[] = {3};
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(depolarizing_insertions(p, GateKind::H, q, rng).empty());
  p.p_1q = 1.0;
  int seen[3] = {0, 0, 0};
  for (int i = 0; i < 3000; ++i) {
    const auto ev = depolarizing_insertions(p, GateKind::RX, q, rng);
    ASSERT_EQ(ev.size(), 1u);
    EXPECT_EQ(ev[0].qubit, 3);
    ASSERT_NE(ev[0].kind, NoiseEventKind::Reset);
    ++seen[static_cast<int>(ev[0].kind)];
  }
  for (int s : seen) EXPECT_NEAR(s, 1000, 3 * std::sqrt(3000 * (1.0 / 3) * (2.0 / 3)));
}

TEST(Depolarizing, TwoQubitFrequency) {
  const NoiseParams p = NoiseParams::standard();
  Rng rng(2024);
  const int q[] = {0, 1};
  int hits = 0, on_first = 0;
  const int trials = 100000;
  for (int i = 0; i < trials; ++i) {
    const auto ev = depolarizing_insertions(p, GateKind::CX, q, rng);
    if (!ev.empty()) {
      ++hits;
      if (ev[0].qubit == 0) ++on_first;
    }
  }
  EXPECT_NEAR(hits / double(trials), 0.03, 0.002);
  EXPECT_NEAR(on_first / double(hits), 0.5, three_sigma(0.5, hits));
}

TEST(Disabled, IsIdentity) {
  NoiseParams p;  // disabled
  Rng rng(0);
  const int q[] = {0, 1};
  for (int i = 0; i < 100; ++i) {
    EXPECT_TRUE(depolarizing_insertions(p, GateKind::CX, q, rng).empty());
    EXPECT_TRUE(relaxation_insertions(q, 100.0, p, rng).empty());
    EXPECT_EQ(measurement_flip(1, p, rng), 1);
  }
}

TEST(Relaxation, ClosedForms) {
  const NoiseParams p = NoiseParams::standard();
  EXPECT_EQ(amplitude_damping_probability(0.0, p), 0.0);
  EXPECT_NEAR(amplitude_damping_probability(50.0 * std::log(2.0), p), 0.5, 1e-15);
  EXPECT_NEAR(amplitude_damping_probability(0.1, p), 1.0 - std::exp(-0.002), 1e-15);
  const double tphi = 1.0 / (1.0 / 70.0 - 1.0 / 100.0);
  EXPECT_NEAR(p.dephasing_time_us(), tphi, 1e-9);
  EXPECT_NEAR(dephasing_probability(0.1, p), 1.0 - std::exp(-0.1 / tphi), 1e-15);
  NoiseParams edge = p;
  edge.t2_us = 2.0 * edge.t1_us;
  EXPECT_TRUE(std::isinf(edge.dephasing_time_us()));
  EXPECT_EQ(dephasing_probability(1.0, edge), 0.0);
}

TEST(Relaxation, ZeroDurationEmitsNothing) {
  const NoiseParams p = NoiseParams::standard();
  Rng rng(3);
  const int q[] = {0, 1, 2, 3};
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(relaxation_insertions(q, 0.0, p, rng).empty());
}

TEST(Relaxation, MonteCarloFrequency) {
  const NoiseParams p = NoiseParams::standard();
  Rng rng(77);
  const int q[] = {0};
  const int trials = 100000;
  int resets = 0, phases = 0;
  for (int i = 0; i < trials; ++i) {
    for (const NoiseEvent& e : relaxation_insertions(q, 0.1, p, rng)) {
      (e.kind == NoiseEventKind::Reset ? resets : phases) += 1;
    }
  }
  const double pa = amplitude_damping_probability(0.1, p);
  const double pz = dephasing_probability(0.1, p);
  EXPECT_NEAR(resets / double(trials), pa, three_sigma(pa, trials));
  EXPECT_NEAR(phases / double(trials), pz, three_sigma(pz, trials));
}

TEST(Measurement, ForcedBranches) {
  NoiseParams p = NoiseParams::standard();
  Rng rng(4);
  p.p_meas = 0.0;
  for (int i = 0; i < 100; ++i) EXPECT_EQ(measurement_flip(i % 2, p, rng), i % 2);
  p.p_meas = 1.0;
  for (int i = 0; i < 100; ++i) EXPECT_EQ(measurement_flip(i % 2, p, rng), 1 - i % 2);
  EXPECT_EQ(measurement_flips(0b10110, 5, p, rng), Bits{0b01001});
}

TEST(Measurement, AllZerosProbability) {
  SimulatorConfig cfg;
  cfg.noise = NoiseParams::standard();
  const OutcomeCounts counts = sample_circuit(Circuit(5), cfg, 5000, 10);
  const double expected = std::pow(0.98, 5);
  EXPECT_NEAR(counts.frequency(0), expected, three_sigma(expected, 5000));
}

TEST(Trajectories, SameSeedSameInsertions) {
  const NoiseParams p = NoiseParams::standard();
  const Circuit c = random_circuit(5, 40, 1);
  Rng a(9), b(9);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(sample_trajectory(c, p, a), sample_trajectory(c, p, b));
}

TEST(Trajectories, RelaxationFollowsEveryMoment) {
  NoiseParams p = NoiseParams::standard();
  p.p_1q = p.p_2q = 0.0;
  p.t1_us = 1e-3;  // resets are certain
  p.t2_us = 2e-3;
  Rng rng(0);
  const Circuit c(2, {Gate::h(0), Gate::cx(0, 1), Gate::h(1)});
  const auto ops = sample_trajectory(c, p, rng);
  int resets = 0;
  for (const auto& op : ops) {
    if (const auto* e = std::get_if<NoiseEvent>(&op)) resets += e->kind == NoiseEventKind::Reset;
  }
  EXPECT_EQ(resets, depth(c) * 2);
  const OutcomeCounts counts = sample_circuit(c, SimulatorConfig{Backend::Mps, {}, 14, [&] {
                                                auto q = p;
                                                q.p_meas = 0.0;
                                                return q;
                                              }()},
                                              200, 1);
  EXPECT_EQ(counts.count(0), 200u);
}

TEST(Sampling, DeterministicWithAndWithoutNoise) {
  const Circuit c = random_circuit(6, 30, 5);
  for (bool noisy : {false, true}) {
    SimulatorConfig cfg;
    if (noisy) {
      cfg.noise = NoiseParams::standard();
      cfg.noise.trajectories = 64;
    }
    EXPECT_EQ(sample_circuit(c, cfg, 2000, 3).counts, sample_circuit(c, cfg, 2000, 3).counts);
  }
}

TEST(Sampling, NoiseShiftsDistributionOnlyWhenEnabled) {
  const Circuit c = ghz_circuit(4);
  SimulatorConfig clean;
  const OutcomeCounts a = sample_circuit(c, clean, 5000, 8);
  EXPECT_EQ(a.count(0b0000) + a.count(0b1111), 5000u);
  SimulatorConfig noisy;
  noisy.noise = NoiseParams::standard();
  const OutcomeCounts b = sample_circuit(c, noisy, 5000, 8);
  EXPECT_LT(b.count(0b0000) + b.count(0b1111), 5000u);
  EXPECT_EQ(b.shots, 5000u);
}
