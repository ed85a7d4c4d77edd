#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qsopt/env.hpp"
#include "qsopt/error.hpp"

using namespace qsopt;

namespace {

constexpr double kPi = std::numbers::pi;

EnvConfig small_config(int n = 5) {
  EnvConfig cfg;
  cfg.n_qubits = n;
  cfg.max_gates = 30;
  cfg.max_steps = 50;
  cfg.shots = 500;
  return cfg;
}

std::size_t find_action(const std::vector<Action>& catalog, ActionKind kind, int qubit = -1, double angle = 0.0) {
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const Action& a = catalog[i];
    if (a.kind == kind && a.qubit == qubit && a.angle == angle) return i;
  }
  ADD_FAILURE() << "action not in catalog";
  return 0;
}

std::vector<double> flat_bonds(int n) { return std::vector<double>(static_cast<std::size_t>(n - 1), 0.0); }

}  // namespace

TEST(ActionCatalog, FiveQubitsTwoAnglesHas55) {
  const std::vector<double> angles{kPi / 4, kPi / 2};
  EXPECT_EQ(action_catalog(5, angles).size(), 55u);
}

TEST(ActionCatalog, SizeFormula) {
  for (int n = 2; n <= 9; ++n) {
    for (int a = 1; a <= 3; ++a) {
      const std::vector<double> angles(static_cast<std::size_t>(a), 0.5);
      const std::size_t expected = static_cast<std::size_t>(n + 2 * n * a + 3 * (n - 1) + 3 * n + 3);
      EXPECT_EQ(action_catalog(n, angles).size(), expected) << "n=" << n << " angles=" << a;
    }
  }
}

TEST(ActionCatalog, FirstIsAddHOnQubitZero) {
  const std::vector<double> angles{kPi / 4, kPi / 2};
  const auto cat = action_catalog(5, angles);
  EXPECT_EQ(cat[0].kind, ActionKind::AddH);
  EXPECT_EQ(cat[0].qubit, 0);
  EXPECT_EQ(action_label(cat[0]), "ADD_H(q0)");
  EXPECT_EQ(action_label(cat.back()), "BOOST_ENTANGLEMENT");
}

TEST(ActionCatalog, TwoQubitsHasOneCx) {
  const std::vector<double> angles{kPi / 4, kPi / 2};
  const auto cat = action_catalog(2, angles);
  EXPECT_EQ(std::count_if(cat.begin(), cat.end(), [](const Action& a) { return a.kind == ActionKind::AddCX; }), 1);
}

TEST(ActionCatalog, LabelsAreDistinct) {
  const std::vector<double> angles{kPi / 4, kPi / 2};
  const auto cat = action_catalog(6, angles);
  std::vector<std::string> labels;
  for (const auto& a : cat) labels.push_back(action_label(a));
  std::sort(labels.begin(), labels.end());
  EXPECT_EQ(std::adjacent_find(labels.begin(), labels.end()), labels.end());
}

TEST(Threshold, Examples) {
  EXPECT_NEAR(adjust_threshold(0.7, 0.7), 0.7, 1e-15);
  EXPECT_NEAR(adjust_threshold(0.7, 1.0), 0.73, 1e-15);
  EXPECT_DOUBLE_EQ(adjust_threshold(0.95, 1.0), 0.95);
  double t = 0.7;
  for (int i = 0; i < 200; ++i) t = adjust_threshold(t, 0.0);
  EXPECT_DOUBLE_EQ(t, 0.5);
}

TEST(Reset, EmptyCircuitObservation) {
  CircuitEnv env(small_config());
  const Observation obs = env.reset(Circuit(5), 1);
  ASSERT_EQ(obs.rows, 5);
  ASSERT_EQ(obs.cols, 30);
  ASSERT_EQ(obs.grid.size(), static_cast<std::size_t>(kObservationChannels * 5 * 30));
  const std::size_t plane = 5 * 30;
  for (std::size_t i = 0; i < obs.grid.size(); ++i) EXPECT_EQ(obs.grid[i], i < plane ? 1.0f : 0.0f);
  ASSERT_EQ(obs.aux.size(), static_cast<std::size_t>(observation_aux_size(5)));
  for (int b = 0; b < 4; ++b) EXPECT_EQ(obs.aux[static_cast<std::size_t>(b)], 0.0f);
}

// GHZ spectra are one bit across every cut. Normalizing by the per-bond
// maximum min(k, n-k, log2 chi) gives 1, 1/2, 1/2, 1 for five qubits.
TEST(Reset, GhzFiveEntropies) {
  CircuitEnv env(small_config());
  const Observation obs = env.reset(ghz_circuit(5), 1);
  for (double s : env.baseline().bond_entropies) EXPECT_NEAR(s, 1.0, 1e-9);
  const float expected[] = {1.0f, 0.5f, 0.5f, 1.0f};
  for (int b = 0; b < 4; ++b) EXPECT_NEAR(obs.aux[static_cast<std::size_t>(b)], expected[b], 1e-6);
}

TEST(Reset, SameSeedSameObservation) {
  const Circuit c = sensor_circuit(5, 15, 3);
  CircuitEnv a(small_config()), b(small_config());
  EXPECT_EQ(a.reset(c, 11), b.reset(c, 11));
  EXPECT_EQ(a.metrics().qfi_norm, b.metrics().qfi_norm);
}

TEST(Reset, Errors) {
  CircuitEnv env(small_config());
  EXPECT_THROW(env.step(0), EnvError);
  EXPECT_THROW(env.reset(Circuit(4), 1), EnvError);
  EXPECT_THROW(env.reset(random_circuit(5, 31, 1), 1), EnvError);
  env.reset(Circuit(5), 1);
  EXPECT_THROW(env.step(env.action_count()), EnvError);
}

TEST(Step, CancelPassRemovesPair) {
  EnvConfig cfg = small_config();
  cfg.auto_inject = false;
  CircuitEnv env(cfg);
  env.reset(Circuit(5, {Gate::h(0), Gate::h(0)}), 1);
  const StepResult r = env.step(find_action(env.catalog(), ActionKind::CancelPass));
  EXPECT_TRUE(r.valid);
  EXPECT_EQ(r.metrics.gates, 0);
  EXPECT_DOUBLE_EQ(r.metrics.deltas.gates, 1.0);
}

TEST(Step, InvalidRemoveOnEmptyCircuit) {
  CircuitEnv env(small_config());
  env.reset(Circuit(5), 1);
  const StepResult r = env.step(find_action(env.catalog(), ActionKind::RemoveLast, 2));
  EXPECT_FALSE(r.valid);
  EXPECT_DOUBLE_EQ(r.reward, -0.1);
  EXPECT_TRUE(env.circuit().empty());
}

TEST(Step, BellConstructionRewardsSumToOne) {
  EnvConfig cfg = small_config(2);
  cfg.threshold = 0.0;
  cfg.weights = {0.0, 0.0, 1.0, 0.0};
  CircuitEnv env(cfg);
  env.reset(Circuit(2), 1);
  const StepResult h = env.step(find_action(env.catalog(), ActionKind::AddH, 0));
  const StepResult cx = env.step(find_action(env.catalog(), ActionKind::AddCX, 0));
  EXPECT_NEAR(cx.metrics.entropy_norm, 1.0, 1e-12);
  EXPECT_NEAR(h.reward + cx.reward, 1.0, 1e-12);
  EXPECT_FALSE(h.injected);
}

TEST(Step, AutoInjectFiresBelowThreshold) {
  CircuitEnv env(small_config());
  env.reset(Circuit(5), 1);
  const StepResult r = env.step(find_action(env.catalog(), ActionKind::AddRZ, 0, kPi / 4));
  EXPECT_TRUE(r.injected);
  ASSERT_EQ(env.circuit().size(), 3u);
  EXPECT_EQ(env.circuit()[1], Gate::h(0));
  EXPECT_EQ(env.circuit()[2], Gate::cx(0, 1));
}

TEST(Step, DoneAtMaxSteps) {
  EnvConfig cfg = small_config();
  cfg.max_steps = 3;
  CircuitEnv env(cfg);
  env.reset(Circuit(5), 1);
  EXPECT_FALSE(env.step(0).done);
  EXPECT_FALSE(env.step(0).done);
  EXPECT_TRUE(env.step(0).done);
}

TEST(ApplyAction, RemoveLastTouchingQubit) {
  const Circuit c(3, {Gate::h(0), Gate::cx(0, 1), Gate::rx(2, 1.0)});
  const auto out = apply_action(c, {ActionKind::RemoveLast, 1}, flat_bonds(3), 0.7, 10);
  ASSERT_TRUE(out);
  EXPECT_EQ(*out, Circuit(3, {Gate::h(0), Gate::rx(2, 1.0)}));
}

TEST(ApplyAction, SwapLastPairNeedsDisjointSupports) {
  const Circuit c(3, {Gate::h(2), Gate::rx(0, 1.0)});
  const auto swapped = apply_action(c, {ActionKind::SwapLastPair, 0}, flat_bonds(3), 0.7, 10);
  ASSERT_TRUE(swapped);
  EXPECT_EQ(*swapped, Circuit(3, {Gate::rx(0, 1.0), Gate::h(2)}));

  const Circuit blocked(3, {Gate::h(0), Gate::rx(0, 1.0)});
  EXPECT_FALSE(apply_action(blocked, {ActionKind::SwapLastPair, 0}, flat_bonds(3), 0.7, 10));
}

TEST(ApplyAction, ReplaceLastSingleQubitGate) {
  const Circuit c(2, {Gate::rz(0, 0.5), Gate::cx(0, 1)});
  const auto out = apply_action(c, {ActionKind::ReplaceLast, 0}, flat_bonds(2), 0.7, 10);
  ASSERT_TRUE(out);
  EXPECT_EQ(*out, Circuit(2, {Gate::h(0), Gate::cx(0, 1)}));
  EXPECT_FALSE(apply_action(*out, {ActionKind::ReplaceLast, 0}, flat_bonds(2), 0.7, 10));
}

TEST(ApplyAction, InjectTargetsLowestBond) {
  const std::vector<double> bonds{0.9, 0.8, 0.1, 0.4};
  const auto out = apply_action(Circuit(5), {ActionKind::Inject}, bonds, 0.7, 10);
  ASSERT_TRUE(out);
  EXPECT_EQ(*out, Circuit(5, {Gate::h(2), Gate::cx(2, 3)}));
  EXPECT_FALSE(apply_action(Circuit(5, std::vector<Gate>(9, Gate::h(0))), {ActionKind::Inject}, bonds, 0.7, 10));
}

TEST(ApplyAction, BoostCoversBondsBelowThreshold) {
  const std::vector<double> bonds{0.9, 0.2, 0.69, 0.7};
  const auto out = apply_action(Circuit(5), {ActionKind::Boost}, bonds, 0.7, 10);
  ASSERT_TRUE(out);
  EXPECT_EQ(*out, Circuit(5, {Gate::cz(1, 2), Gate::cz(2, 3)}));
  const std::vector<double> high{0.9, 0.9, 0.9, 0.9};
  EXPECT_FALSE(apply_action(Circuit(5), {ActionKind::Boost}, high, 0.7, 10));
}

TEST(Observation, AnglesAndEntriesInUnitInterval) {
  EnvConfig cfg = small_config();
  CircuitEnv env(cfg);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Observation obs = env.reset(random_circuit(5, 30, s), s);
    for (float v : obs.grid) EXPECT_TRUE(v >= 0.0f && v <= 1.0f);
    for (float v : obs.aux) EXPECT_TRUE(v >= 0.0f && v <= 1.0f);
  }
}

TEST(Observation, DistinctLayoutsEncodeDifferently) {
  const EnvConfig cfg = small_config();
  const MetricsRecord m;
  const std::vector<Circuit> circuits = {
      Circuit(5, {Gate::h(0)}),           Circuit(5, {Gate::rx(0, kPi / 4)}), Circuit(5, {Gate::rx(0, kPi / 2)}),
      Circuit(5, {Gate::rz(0, kPi / 4)}), Circuit(5, {Gate::cx(0, 1)}),       Circuit(5, {Gate::cx(1, 0)}),
      Circuit(5, {Gate::cz(0, 1)}),       Circuit(5, {Gate::swap(0, 1)}),     Circuit(5, {Gate::h(1)}),
      Circuit(5, {Gate::h(0), Gate::h(0)}),
  };
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    for (std::size_t j = i + 1; j < circuits.size(); ++j) {
      EXPECT_NE(encode_observation(circuits[i], m, cfg), encode_observation(circuits[j], m, cfg)) << i << " vs " << j;
    }
  }
}

// Random walks over the MDP, checking the mask, the budget and telescoping.
class EnvWalk : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(EnvWalk, MaskBudgetTelescoping) {
  EnvConfig cfg = small_config();
  cfg.max_gates = 20;
  cfg.max_steps = 40;
  cfg.shots = 200;
  CircuitEnv env(cfg);
  std::mt19937_64 rng(GetParam());
  env.reset(sensor_circuit(5, 8, GetParam()), GetParam());
  double valid_sum = 0.0;
  int invalid = 0;
  double total = 0.0;
  for (int step = 0; step < cfg.max_steps; ++step) {
    const auto mask = env.valid_mask();
    for (std::size_t a = 0; a < mask.size(); ++a) {
      const Action& act = env.catalog()[a];
      const auto next = apply_action(env.circuit(), act, env.metrics().bond_entropies_norm, env.threshold(),
                                     cfg.max_gates);
      EXPECT_EQ(static_cast<bool>(mask[a]), next.has_value()) << action_label(act);
      if (next && act.kind != ActionKind::CancelPass) EXPECT_NE(*next, env.circuit()) << action_label(act);
      if (next) EXPECT_LE(static_cast<int>(next->size()), cfg.max_gates);
    }
    const std::size_t a = std::uniform_int_distribution<std::size_t>(0, mask.size() - 1)(rng);
    const Circuit before = env.circuit();
    const StepResult r = env.step(a);
    total += r.reward;
    EXPECT_EQ(r.valid, static_cast<bool>(mask[a]));
    if (r.valid) {
      valid_sum += r.reward;
    } else {
      ++invalid;
      EXPECT_EQ(env.circuit(), before);
      EXPECT_DOUBLE_EQ(r.reward, cfg.invalid_penalty);
    }
    EXPECT_LE(static_cast<int>(env.circuit().size()), cfg.max_gates);
    if (static_cast<int>(env.circuit().size()) == cfg.max_gates) {
      const auto m = env.valid_mask();
      for (std::size_t k = 0; k < m.size(); ++k) {
        const ActionKind kind = env.catalog()[k].kind;
        if (kind <= ActionKind::AddSwap) EXPECT_FALSE(m[k]);
      }
    }
  }
  const double episode_reward = reward(deltas_between(env.baseline(), env.metrics()), cfg.weights);
  EXPECT_NEAR(valid_sum, episode_reward, 1e-9);
  EXPECT_NEAR(total, episode_reward + invalid * cfg.invalid_penalty, 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Seeds, EnvWalk, ::testing::Values(1u, 2u, 3u, 4u, 5u, 6u));

TEST(Step, DeterministicGivenSeedAndActions) {
  const Circuit c = sensor_circuit(5, 10, 9);
  CircuitEnv a(small_config()), b(small_config());
  a.reset(c, 42);
  b.reset(c, 42);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const std::size_t act = std::uniform_int_distribution<std::size_t>(0, a.action_count() - 1)(rng);
    const StepResult ra = a.step(act), rb = b.step(act);
    EXPECT_EQ(ra.obs, rb.obs);
    EXPECT_EQ(ra.reward, rb.reward);
    EXPECT_EQ(ra.mask, rb.mask);
  }
}

TEST(EnvConfigValidation, RejectsBadValues) {
  EnvConfig cfg;
  cfg.n_qubits = 1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = EnvConfig{};
  cfg.threshold = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = EnvConfig{};
  cfg.max_gates = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
