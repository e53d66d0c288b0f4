#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "alselect/error.hpp"
#include "alselect/simulator.hpp"
#include "alselect/synthetic.hpp"
#include "fixtures.hpp"

namespace alselect {
namespace {

using testing::make_pair;

ExperimentInputs synthetic_inputs(std::size_t pairs, std::uint64_t seed, double test_fraction = 0.2) {
  SyntheticSpec spec;
  spec.pairs = pairs;
  spec.seed = seed;
  ExperimentInputs in;
  in.dataset = make_synthetic(spec);
  in.table = stub_scores(in.dataset, 16, 1);
  in.split = make_split(in.dataset, test_fraction, seed);
  return in;
}

ExperimentConfig small_config(StrategyKind kind, std::size_t n, std::size_t rounds) {
  ExperimentConfig c;
  c.strategy.kind = kind;
  c.n = n;
  c.rounds = rounds;
  c.hyper.epochs = 60;
  return c;
}

// A 1-d table whose A-side embedding is the only signal.
struct Toy {
  Dataset dataset;
  ScoreTable table{1};
};

Toy toy(const std::vector<double>& xs, const std::vector<Label>& labels) {
  std::vector<SentencePair> pairs;
  Toy t;
  for (InstanceId i = 0; i < xs.size(); ++i) {
    pairs.push_back(make_pair(i, "a", "b", labels[i]));
    InstanceScores s;
    s.id = i;
    s.loss_a = {1};
    s.emb_a = {{xs[i]}};
    s.loss_b = {1};
    s.emb_b = {{0}};
    t.table.insert(s);
  }
  t.dataset = Dataset(std::move(pairs), 2);
  return t;
}

TEST(Evaluate, UniformModelPredictsClassZero) {
  const auto t = toy({1, 2, 3, 4}, {0, 1, 0, 1});
  const std::vector<InstanceId> test = {0, 1, 2, 3};
  EXPECT_EQ(evaluate(Model(2, 4), test, t.dataset, t.table), 0.5);
}

TEST(Evaluate, PerfectAndThreeOfFour) {
  const auto t = toy({-2, -1, 1, 2}, {0, 0, 1, 1});
  Model m(2, 4);
  m.weights()[4] = 1.0;  // class 1 logit = mean_a
  const std::vector<InstanceId> all = {0, 1, 2, 3};
  EXPECT_EQ(evaluate(m, all, t.dataset, t.table), 1.0);
  const auto u = toy({-2, -1, 1, 2}, {0, 1, 1, 1});
  EXPECT_EQ(evaluate(m, all, u.dataset, u.table), 0.75);
  try {
    evaluate(m, std::vector<InstanceId>{}, t.dataset, t.table);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyTestSet);
  }
}

TEST(RunExperiment, LabeledTrajectoryAndConservation) {
  const auto in = synthetic_inputs(400, 3);
  for (auto kind : {StrategyKind::kRandom, StrategyKind::kEntropy, StrategyKind::kLmCascade,
                    StrategyKind::kEgl}) {
    const auto cfg = small_config(kind, 20, 6);
    const auto r = run_experiment(in, cfg);
    ASSERT_EQ(r.rounds.size(), 6u);
    EXPECT_FALSE(r.pool_exhausted);
    std::set<InstanceId> seen;
    const std::set<InstanceId> pool(in.split.pool.begin(), in.split.pool.end());
    for (std::size_t i = 0; i < r.rounds.size(); ++i) {
      EXPECT_EQ(r.rounds[i].round, i + 1);
      EXPECT_EQ(r.rounds[i].labeled, 20 * (i + 1));
      EXPECT_EQ(r.rounds[i].selected.size(), 20u);
      EXPECT_GE(r.rounds[i].accuracy, 0.0);
      EXPECT_LE(r.rounds[i].accuracy, 1.0);
      for (auto id : r.rounds[i].selected) {
        EXPECT_TRUE(pool.count(id)) << id;
        EXPECT_TRUE(seen.insert(id).second) << "reselected " << id;
      }
    }
    EXPECT_EQ(r.final_accuracy, r.rounds.back().accuracy);
    EXPECT_EQ(r.traces.size(), 6u);
  }
}

TEST(RunExperiment, PoolExhaustion) {
  const auto in = synthetic_inputs(50, 2);
  const std::size_t q = in.split.pool.size();
  ASSERT_EQ(q, 40u);
  auto cfg = small_config(StrategyKind::kLmCascade, 15, 10);
  const auto r = run_experiment(in, cfg);
  EXPECT_TRUE(r.pool_exhausted);
  ASSERT_EQ(r.rounds.size(), 3u);
  EXPECT_EQ(r.rounds[0].labeled, 15u);
  EXPECT_EQ(r.rounds[1].labeled, 30u);
  EXPECT_EQ(r.rounds[2].labeled, 40u);
}

TEST(RunExperiment, WholePoolInOneRoundMatchesFullTraining) {
  const auto in = synthetic_inputs(200, 4);
  auto cfg = small_config(StrategyKind::kRandom, in.split.pool.size(), 1);
  const auto r = run_experiment(in, cfg);
  ASSERT_EQ(r.rounds.size(), 1u);
  EXPECT_FALSE(r.pool_exhausted);
  const auto full = train(in.dataset, in.split.pool, in.table, cfg.hyper);
  EXPECT_EQ(r.final_accuracy, evaluate(full, in.split.test, in.dataset, in.table));
}

TEST(RunExperiment, DeterministicSerialization) {
  const auto in = synthetic_inputs(300, 5);
  const auto cfg = small_config(StrategyKind::kLmCascade, 10, 4);
  const auto a = run_experiment(in, cfg).to_json();
  EXPECT_EQ(a, run_experiment(in, cfg).to_json());
  auto other = cfg;
  other.seed = 9;
  EXPECT_NE(a, run_experiment(in, other).to_json());
  EXPECT_NE(config_digest(cfg), config_digest(other));
}

TEST(RunExperiment, ColdStartModes) {
  const auto in = synthetic_inputs(300, 6);
  auto cfg = small_config(StrategyKind::kEntropy, 10, 1);
  cfg.cold_start = ColdStart::kTieRule;
  const auto tie = run_experiment(in, cfg);
  // Untrained model: every entropy ties, so the lowest pool ids are taken.
  EXPECT_EQ(tie.rounds[0].selected,
            std::vector<InstanceId>(in.split.pool.begin(), in.split.pool.begin() + 10));
  cfg.cold_start = ColdStart::kRandom;
  const auto rnd = run_experiment(in, cfg);
  EXPECT_NE(rnd.rounds[0].selected, tie.rounds[0].selected);
  EXPECT_EQ(rnd.traces[0].stages[0].stage, "random");
}

TEST(RunExperiment, UnlabeledPoolInstance) {
  auto t = toy({1, 2, 3, 4, 5}, {0, 1, 0, 1, 0});
  std::vector<SentencePair> pairs(t.dataset.pairs().begin(), t.dataset.pairs().end());
  pairs[2].label.reset();
  ExperimentInputs in{Dataset(std::move(pairs), 2), t.table, SplitState{{1, 2, 3}, {}, {0, 4}}};
  try {
    run_experiment(in, small_config(StrategyKind::kRandom, 1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnlabeledPoolInstance);
  }
}

TEST(ExperimentConfig, Validation) {
  auto c = small_config(StrategyKind::kRandom, 0, 1);
  EXPECT_THROW(validate(c), Error);
  c.n = 1;
  c.rounds = 0;
  EXPECT_THROW(validate(c), Error);
  c.rounds = 1;
  c.test_fraction = 1.0;
  EXPECT_THROW(validate(c), Error);
}

TEST(CompareStrategies, SharedSplitDifferentSelections) {
  const auto in = synthetic_inputs(300, 7);
  const auto cfg = small_config(StrategyKind::kRandom, 10, 3);
  const std::vector<StrategyConfig> strategies = {cfg.strategy};
  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  const auto cmp = compare_strategies(in, cfg, strategies, seeds);
  ASSERT_EQ(cmp.runs.size(), 3u);
  EXPECT_NE(cmp.runs[0].rounds[0].selected, cmp.runs[1].rounds[0].selected);
  EXPECT_NE(cmp.runs[1].rounds[0].selected, cmp.runs[2].rounds[0].selected);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(cmp.runs[i].seed, seeds[i]);
  ASSERT_EQ(cmp.curves.size(), 1u);
  const auto& pt = cmp.curves[0].points.back();
  double mean = 0.0;
  for (const auto& r : cmp.runs) mean += r.final_accuracy / 3.0;
  EXPECT_NEAR(pt.mean, mean, 1e-12);
  EXPECT_NEAR(cmp.curves[0].final_mean, mean, 1e-12);
}

TEST(CompareStrategies, SingleRunTableEqualsCurve) {
  const auto in = synthetic_inputs(300, 8);
  const auto cfg = small_config(StrategyKind::kEntropy, 10, 3);
  const std::vector<StrategyConfig> strategies = {cfg.strategy};
  const std::vector<std::uint64_t> seeds = {4};
  const auto cmp = compare_strategies(in, cfg, strategies, seeds);
  ASSERT_EQ(cmp.curves[0].points.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(cmp.curves[0].points[i].mean, cmp.runs[0].rounds[i].accuracy);
    EXPECT_EQ(cmp.curves[0].points[i].stdev, 0.0);
    EXPECT_EQ(cmp.curves[0].points[i].labeled, cmp.runs[0].rounds[i].labeled);
  }
}

TEST(CompareStrategies, JobsDoNotChangeResults) {
  const auto in = synthetic_inputs(300, 9);
  const auto cfg = small_config(StrategyKind::kRandom, 10, 3);
  StrategyConfig lm;
  std::vector<StrategyConfig> strategies = {cfg.strategy, lm};
  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  const auto a = compare_strategies(in, cfg, strategies, seeds, 1);
  const auto b = compare_strategies(in, cfg, strategies, seeds, 4);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) EXPECT_EQ(a.runs[i].to_json(), b.runs[i].to_json());
}

}  // namespace
}  // namespace alselect
