#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "alselect/corpus.hpp"
#include "alselect/lm_scores.hpp"
#include "alselect/matcher.hpp"
#include "alselect/strategies.hpp"

namespace alselect {

enum class ColdStart { kRandom, kTieRule };

std::string_view to_string(ColdStart cold_start);
ColdStart parse_cold_start(std::string_view name);

struct ScoreSource {
  enum class Kind { kStub, kFile };
  Kind kind = Kind::kStub;
  std::filesystem::path path;  // file
  std::size_t dim = kDefaultStubDim;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::filesystem::path dataset_path;
  DatasetFormat dataset_format = DatasetFormat::kTsv;
  ScoreSource scores;
  StrategyConfig strategy;
  std::size_t n = 100;
  std::size_t rounds = 25;
  double test_fraction = 0.2;
  ColdStart cold_start = ColdStart::kRandom;
  std::uint64_t seed = 0;
  TrainHyper hyper;
};

/// Throws Config on n == 0, rounds == 0, bad fraction or strategy.
void validate(const ExperimentConfig& config);

/// Canonical JSON of the config (sorted keys, no whitespace).
std::string canonical_json(const ExperimentConfig& config);

/// Hex FNV-1a digest of canonical_json.
std::string config_digest(const ExperimentConfig& config);

struct RoundRecord {
  std::size_t round = 0;  // 1-based
  std::vector<InstanceId> selected;
  std::size_t labeled = 0;
  double accuracy = 0.0;
  double wall_ms = 0.0;
};

struct ExperimentResult {
  std::string config_digest;
  std::string strategy;
  std::uint64_t seed = 0;
  std::vector<RoundRecord> rounds;
  double final_accuracy = 0.0;
  bool pool_exhausted = false;
  std::vector<SelectionTrace> traces;  // one per round

  /// Deterministic JSON; timing omitted.
  std::string to_json() const;
};

/// Everything an experiment reads, shared across runs.
struct ExperimentInputs {
  Dataset dataset;
  ScoreTable table;
  SplitState split;
};

/// Loads the dataset, builds or loads scores, and splits with config.seed.
ExperimentInputs prepare_inputs(const ExperimentConfig& config);

/// Fraction of argmax-correct predictions.
double evaluate(const Model& model, std::span<const InstanceId> test, const Dataset& dataset,
                const ScoreTable& table);

/// Select, label from gold, retrain from scratch, evaluate; config.rounds times
/// or until the pool runs out.
ExperimentResult run_experiment(const ExperimentInputs& inputs, const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config);

struct CurvePoint {
  std::size_t round = 0;
  std::size_t labeled = 0;
  double mean = 0.0;
  double stdev = 0.0;  // sample stdev across seeds; 0 for one seed
};

struct StrategyCurve {
  std::string strategy;
  std::vector<CurvePoint> points;
  double final_mean = 0.0;
  double final_stdev = 0.0;
};

struct Comparison {
  std::vector<ExperimentResult> runs;  // strategy-major, then seed
  std::vector<StrategyCurve> curves;
};

/// Runs every (strategy, seed) pair over shared inputs. The split and score
/// table come from config; each run takes its seed from the list. Up to `jobs`
/// runs execute concurrently; output order is independent of jobs.
Comparison compare_strategies(const ExperimentInputs& inputs, const ExperimentConfig& config,
                              std::span<const StrategyConfig> strategies,
                              std::span<const std::uint64_t> seeds, std::size_t jobs = 1);

/// Aggregates runs already computed (same layout as Comparison::runs).
std::vector<StrategyCurve> aggregate_curves(std::span<const ExperimentResult> runs);

}  // namespace alselect
