#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alselect/corpus.hpp"
#include "alselect/criteria.hpp"
#include "alselect/lm_scores.hpp"
#include "alselect/matcher.hpp"

namespace alselect {

enum class Criterion { kUncertainty, kDiversity, kCoverage, kNoise };

std::string_view to_string(Criterion criterion);
/// Throws BadStageList on unknown names.
Criterion parse_criterion(std::string_view name);

enum class StrategyKind { kRandom, kEntropy, kEgl, kLmCascade, kCustom };

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy_kind(std::string_view name);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::kLmCascade;
  std::vector<Criterion> stages;  // custom only
  double beta = kDefaultBeta;
  DiversityOptions diversity;
  /// Display name; defaults to the kind (or the joined stage list).
  std::string name;

  std::string display_name() const;
};

/// Throws BadStageList when a custom config has no stages.
void validate(const StrategyConfig& config);

/// The lm_cascade order: uncertainty, diversity, coverage, noise.
std::span<const Criterion> lm_cascade_stages();

struct StageRecord {
  /// Criterion name, or "random" / "egl" for the single-stage baselines.
  std::string stage;
  std::size_t input_size = 0;
  std::vector<InstanceId> kept;
  /// Aligned with kept. Diversity stages record 0 for representatives and
  /// the stage size for top-up picks.
  std::vector<double> scores;
};

struct SelectionTrace {
  std::vector<StageRecord> stages;
};

struct Selection {
  std::vector<InstanceId> ids;
  SelectionTrace trace;
};

/// Read-only inputs every model-based strategy needs.
struct SelectionContext {
  const Dataset& dataset;
  const ScoreTable& table;
  const Model& model;
};

/// Stage sizes n * 2^(c-1), ..., 2n, n for c stages (before clamping).
std::vector<std::size_t> stage_sizes(std::size_t stage_count, std::size_t n);

/// Generic cascade: each stage keeps min(|current|, size) ids under its
/// criterion, ties by ascending id.
Selection select_cascade(std::span<const InstanceId> pool, std::size_t n,
                         std::span<const Criterion> stages, const SelectionContext& ctx,
                         const StrategyConfig& config, std::uint64_t seed);

Selection select_lm_cascade(std::span<const InstanceId> pool, std::size_t n,
                            const SelectionContext& ctx, const StrategyConfig& config,
                            std::uint64_t seed);

Selection select_ablation(std::span<const InstanceId> pool, std::size_t n,
                          std::span<const Criterion> stages, const SelectionContext& ctx,
                          const StrategyConfig& config, std::uint64_t seed);

std::vector<InstanceId> select_entropy(std::span<const InstanceId> pool, std::size_t n,
                                       const Model& model, const ScoreTable& table);

/// Expected gradient length: sum_k P(k|x) * ||d(-ln P(k|x))/d embeddings||.
double expected_gradient_length(const Model& model, const InstanceScores& scores);

std::vector<InstanceId> select_egl(std::span<const InstanceId> pool, std::size_t n,
                                   const Model& model, const ScoreTable& table);

std::vector<InstanceId> select_random(std::span<const InstanceId> pool, std::size_t n,
                                      std::uint64_t seed);

/// Dispatches on config.kind.
Selection select(std::span<const InstanceId> pool, std::size_t n,
                 const SelectionContext& ctx, const StrategyConfig& config,
                 std::uint64_t seed);

/// One JSONL line per stage: round, stage, input_size, kept, scores.
void write_trace_jsonl(const SelectionTrace& trace, std::size_t round, std::ostream& out);

}  // namespace alselect
