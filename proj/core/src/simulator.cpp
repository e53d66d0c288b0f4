#include "alselect/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "alselect/error.hpp"
#include "alselect/random.hpp"

namespace alselect {
namespace {

nlohmann::json strategy_json(const StrategyConfig& s) {
  nlohmann::json stages = nlohmann::json::array();
  for (auto c : s.stages) stages.push_back(std::string(to_string(c)));
  return {{"kind", std::string(to_string(s.kind))},
          {"name", s.name},
          {"stages", stages},
          {"beta", s.beta},
          {"diversity",
           {{"weighting", s.diversity.weighting},
            {"symmetrize", std::string(to_string(s.diversity.symmetrize))},
            {"combine", std::string(to_string(s.diversity.combine))}}}};
}

nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json scores;
  if (c.scores.kind == ScoreSource::Kind::kStub) {
    scores = {{"source", "stub"}, {"dim", c.scores.dim}, {"seed", c.scores.seed}};
  } else {
    scores = {{"source", "file"}, {"path", c.scores.path.generic_string()}};
  }
  return {{"dataset",
           {{"path", c.dataset_path.generic_string()},
            {"format", std::string(to_string(c.dataset_format))}}},
          {"scores", scores},
          {"strategy", strategy_json(c.strategy)},
          {"n", c.n},
          {"rounds", c.rounds},
          {"test_fraction", c.test_fraction},
          {"cold_start", std::string(to_string(c.cold_start))},
          {"seed", c.seed},
          {"matcher",
           {{"learning_rate", c.hyper.learning_rate},
            {"epochs", c.hyper.epochs},
            {"l2", c.hyper.l2},
            {"seed", c.hyper.seed}}}};
}

}  // namespace

std::string_view to_string(ColdStart cold_start) {
  return cold_start == ColdStart::kRandom ? "random" : "tie_rule";
}

ColdStart parse_cold_start(std::string_view name) {
  if (name == "random") return ColdStart::kRandom;
  if (name == "tie_rule") return ColdStart::kTieRule;
  throw Error(ErrorCode::kConfig, "unknown cold_start '" + std::string(name) + "'");
}

void validate(const ExperimentConfig& config) {
  if (config.n < 1) throw Error(ErrorCode::kConfig, "n must be >= 1");
  if (config.rounds < 1) throw Error(ErrorCode::kConfig, "rounds must be >= 1");
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    throw Error(ErrorCode::kConfig, "test_fraction must lie in (0, 1)");
  }
  if (config.scores.kind == ScoreSource::Kind::kStub && config.scores.dim < 2) {
    throw Error(ErrorCode::kConfig, "stub score dimension must be >= 2");
  }
  if (!(config.hyper.learning_rate > 0.0) || !(config.hyper.l2 >= 0.0)) {
    throw Error(ErrorCode::kConfig, "matcher learning_rate must be > 0 and l2 >= 0");
  }
  validate(config.strategy);
}

std::string canonical_json(const ExperimentConfig& config) { return config_json(config).dump(); }

std::string config_digest(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_json(config))));
  return buf;
}

std::string ExperimentResult::to_json() const {
  nlohmann::json j;
  j["config_digest"] = config_digest;
  j["strategy"] = strategy;
  j["seed"] = seed;
  j["final_accuracy"] = final_accuracy;
  j["pool_exhausted"] = pool_exhausted;
  j["rounds"] = nlohmann::json::array();
  for (const auto& r : rounds) {
    j["rounds"].push_back({{"round", r.round},
                           {"selected", r.selected},
                           {"labeled", r.labeled},
                           {"accuracy", r.accuracy}});
  }
  return j.dump();
}

ExperimentInputs prepare_inputs(const ExperimentConfig& config) {
  validate(config);
  ExperimentInputs inputs;
  inputs.dataset = load_dataset(config.dataset_path, config.dataset_format);
  if (config.scores.kind == ScoreSource::Kind::kStub) {
    inputs.table = stub_scores(inputs.dataset, config.scores.dim, config.scores.seed);
  } else {
    inputs.table = load_scores(config.scores.path, inputs.dataset);
  }
  inputs.split = split_for_experiment(inputs.dataset, config.test_fraction, config.seed);
  return inputs;
}

double evaluate(const Model& model, std::span<const InstanceId> test, const Dataset& dataset,
                const ScoreTable& table) {
  if (test.empty()) throw Error(ErrorCode::kEmptyTestSet, "no test instances");
  std::size_t correct = 0;
  for (InstanceId id : test) {
    const auto& pair = dataset.at(id);
    if (!pair.label) {
      throw Error(ErrorCode::kEmptyTestSet, "test instance " + std::to_string(id) + " is unlabeled");
    }
    if (predict_label(model, featurize(table.at(id))) == *pair.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

ExperimentResult run_experiment(const ExperimentInputs& inputs, const ExperimentConfig& config) {
  validate(config);
  const auto& dataset = inputs.dataset;
  const auto& table = inputs.table;
  if (inputs.split.test.empty()) throw Error(ErrorCode::kEmptyTestSet, "split has no test set");
  for (InstanceId id : inputs.split.pool) {
    if (!dataset.at(id).label) {
      throw Error(ErrorCode::kUnlabeledPoolInstance,
                  "pool instance " + std::to_string(id) + " has no gold label");
    }
  }

  ExperimentResult result;
  result.config_digest = config_digest(config);
  result.strategy = config.strategy.display_name();
  result.seed = config.seed;

  std::set<InstanceId> pool(inputs.split.pool.begin(), inputs.split.pool.end());
  std::vector<InstanceId> labeled = inputs.split.labeled;
  Model model(dataset.num_classes(), 4 * table.dim(), config.hyper);

  for (std::size_t round = 1; round <= config.rounds; ++round) {
    if (pool.empty()) {
      result.pool_exhausted = true;
      break;
    }
    if (pool.size() < config.n) result.pool_exhausted = true;
    const auto start = std::chrono::steady_clock::now();
    const std::vector<InstanceId> q(pool.begin(), pool.end());
    const std::uint64_t round_seed = derive_seed(config.seed, round);

    Selection sel;
    if (round == 1 && config.cold_start == ColdStart::kRandom &&
        config.strategy.kind != StrategyKind::kRandom) {
      StrategyConfig cold;
      cold.kind = StrategyKind::kRandom;
      sel = select(q, config.n, {dataset, table, model}, cold, round_seed);
    } else {
      sel = select(q, config.n, {dataset, table, model}, config.strategy, round_seed);
    }

    for (InstanceId id : sel.ids) {
      if (pool.erase(id) != 1) {
        throw Error(ErrorCode::kMissingInstance,
                    "strategy selected id " + std::to_string(id) + " outside the pool");
      }
      labeled.push_back(id);
    }
    model = train(dataset, labeled, table, config.hyper);

    RoundRecord rec;
    rec.round = round;
    rec.selected = sel.ids;
    rec.labeled = labeled.size();
    rec.accuracy = evaluate(model, inputs.split.test, dataset, table);
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                      .count();
    result.rounds.push_back(std::move(rec));
    result.traces.push_back(std::move(sel.trace));
  }
  if (!result.rounds.empty()) result.final_accuracy = result.rounds.back().accuracy;
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_experiment(prepare_inputs(config), config);
}

std::vector<StrategyCurve> aggregate_curves(std::span<const ExperimentResult> runs) {
  std::vector<StrategyCurve> curves;
  std::map<std::string, std::vector<const ExperimentResult*>> by_strategy;
  for (const auto& r : runs) {
    if (by_strategy.find(r.strategy) == by_strategy.end()) {
      curves.push_back({r.strategy, {}, 0.0, 0.0});
    }
    by_strategy[r.strategy].push_back(&r);
  }
  auto mean_stdev = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return std::pair{mean, sd};
  };
  for (auto& curve : curves) {
    const auto& group = by_strategy[curve.strategy];
    std::size_t max_rounds = 0;
    for (const auto* r : group) max_rounds = std::max(max_rounds, r->rounds.size());
    for (std::size_t i = 0; i < max_rounds; ++i) {
      std::vector<double> acc;
      std::size_t labeled = 0;
      for (const auto* r : group) {
        if (i < r->rounds.size()) {
          acc.push_back(r->rounds[i].accuracy);
          labeled = r->rounds[i].labeled;
        }
      }
      auto [m, sd] = mean_stdev(acc);
      curve.points.push_back({i + 1, labeled, m, sd});
    }
    std::vector<double> finals;
    for (const auto* r : group) finals.push_back(r->final_accuracy);
    std::tie(curve.final_mean, curve.final_stdev) = mean_stdev(finals);
  }
  return curves;
}

Comparison compare_strategies(const ExperimentInputs& inputs, const ExperimentConfig& config,
                              std::span<const StrategyConfig> strategies,
                              std::span<const std::uint64_t> seeds, std::size_t jobs) {
  if (seeds.empty()) throw Error(ErrorCode::kConfig, "compare_strategies needs at least one seed");
  if (strategies.empty()) throw Error(ErrorCode::kConfig, "compare_strategies needs a strategy");
  std::vector<ExperimentConfig> configs;
  for (const auto& s : strategies) {
    for (auto seed : seeds) {
      ExperimentConfig c = config;
      c.strategy = s;
      c.seed = seed;
      validate(c);
      configs.push_back(std::move(c));
    }
  }

  Comparison out;
  out.runs.resize(configs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        out.runs[i] = run_experiment(inputs, configs[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, configs.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  out.curves = aggregate_curves(out.runs);
  return out;
}

}  // namespace alselect
