#include "alselect/strategies.hpp"

#include <algorithm>
#include <array>
#include <ostream>

#include "alselect/error.hpp"
#include "alselect/random.hpp"
#include "alselect/report.hpp"

namespace alselect {
namespace {

constexpr std::array kLmCascade = {Criterion::kUncertainty, Criterion::kDiversity,
                                   Criterion::kCoverage, Criterion::kNoise};

std::vector<CriterionScore> ranked(Criterion criterion, std::span<const InstanceId> ids,
                                   const SelectionContext& ctx, const StrategyConfig& config) {
  std::vector<CriterionScore> scores;
  switch (criterion) {
    case Criterion::kUncertainty: scores = uncertainty_scores(ids, ctx.model, ctx.table); break;
    case Criterion::kCoverage: scores = coverage_scores(ids, ctx.table, config.beta); break;
    case Criterion::kNoise: scores = noise_scores(ids, ctx.table); break;
    case Criterion::kDiversity: break;
  }
  sort_scores(scores);
  return scores;
}

StageRecord keep_top(std::string stage, std::vector<CriterionScore> sorted, std::size_t keep) {
  StageRecord rec;
  rec.stage = std::move(stage);
  rec.input_size = sorted.size();
  keep = std::min(keep, sorted.size());
  rec.kept.reserve(keep);
  rec.scores.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    rec.kept.push_back(sorted[i].id);
    rec.scores.push_back(sorted[i].score);
  }
  return rec;
}

std::vector<InstanceId> sorted_copy(std::span<const InstanceId> pool) {
  std::vector<InstanceId> ids(pool.begin(), pool.end());
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

std::string_view to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::kUncertainty: return "uncertainty";
    case Criterion::kDiversity: return "diversity";
    case Criterion::kCoverage: return "coverage";
    case Criterion::kNoise: return "noise";
  }
  return "?";
}

Criterion parse_criterion(std::string_view name) {
  for (auto c : kLmCascade) {
    if (to_string(c) == name) return c;
  }
  throw Error(ErrorCode::kBadStageList, "unknown criterion '" + std::string(name) + "'");
}

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kRandom: return "random";
    case StrategyKind::kEntropy: return "entropy";
    case StrategyKind::kEgl: return "egl";
    case StrategyKind::kLmCascade: return "lm_cascade";
    case StrategyKind::kCustom: return "custom";
  }
  return "?";
}

StrategyKind parse_strategy_kind(std::string_view name) {
  for (auto k : {StrategyKind::kRandom, StrategyKind::kEntropy, StrategyKind::kEgl,
                 StrategyKind::kLmCascade, StrategyKind::kCustom}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::kConfig, "unknown strategy kind '" + std::string(name) + "'");
}

std::string StrategyConfig::display_name() const {
  if (!name.empty()) return name;
  if (kind != StrategyKind::kCustom) return std::string(to_string(kind));
  std::string out = "custom:";
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (i) out += '+';
    out += to_string(stages[i]);
  }
  return out;
}

void validate(const StrategyConfig& config) {
  if (config.kind == StrategyKind::kCustom && config.stages.empty()) {
    throw Error(ErrorCode::kBadStageList, "custom strategy needs at least one stage");
  }
  if (config.kind != StrategyKind::kCustom && !config.stages.empty()) {
    throw Error(ErrorCode::kConfig, "stages are only allowed with kind=custom, not kind=" +
                                        std::string(to_string(config.kind)));
  }
  if (!(config.beta > 0.0)) throw Error(ErrorCode::kConfig, "beta must be > 0");
}

std::span<const Criterion> lm_cascade_stages() { return kLmCascade; }

std::vector<std::size_t> stage_sizes(std::size_t stage_count, std::size_t n) {
  std::vector<std::size_t> sizes(stage_count);
  for (std::size_t i = 0; i < stage_count; ++i) {
    sizes[i] = n << (stage_count - 1 - i);
  }
  return sizes;
}

Selection select_cascade(std::span<const InstanceId> pool, std::size_t n,
                         std::span<const Criterion> stages, const SelectionContext& ctx,
                         const StrategyConfig& config, std::uint64_t seed) {
  if (stages.empty()) throw Error(ErrorCode::kBadStageList, "empty stage list");
  Selection out;
  std::vector<InstanceId> current = sorted_copy(pool);
  if (current.empty() || n == 0) return out;
  const auto sizes = stage_sizes(stages.size(), n);
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const std::size_t keep = std::min(current.size(), sizes[s]);
    StageRecord rec;
    if (stages[s] == Criterion::kDiversity) {
      std::vector<InstanceVector> vectors;
      vectors.reserve(current.size());
      for (InstanceId id : current) {
        vectors.push_back(diversity_vector(ctx.dataset.at(id), ctx.table.at(id), config.diversity));
      }
      const auto pick = diversity_select(vectors, keep, derive_seed(seed, s));
      rec.stage = std::string(to_string(Criterion::kDiversity));
      rec.input_size = current.size();
      rec.kept = pick.ids;
      rec.scores.assign(pick.ids.size(), static_cast<double>(keep));
      std::fill_n(rec.scores.begin(), pick.representatives, 0.0);
    } else {
      rec = keep_top(std::string(to_string(stages[s])), ranked(stages[s], current, ctx, config),
                     keep);
    }
    current = rec.kept;
    std::sort(current.begin(), current.end());
    out.trace.stages.push_back(std::move(rec));
  }
  out.ids = out.trace.stages.back().kept;
  return out;
}

Selection select_lm_cascade(std::span<const InstanceId> pool, std::size_t n,
                            const SelectionContext& ctx, const StrategyConfig& config,
                            std::uint64_t seed) {
  return select_cascade(pool, n, kLmCascade, ctx, config, seed);
}

Selection select_ablation(std::span<const InstanceId> pool, std::size_t n,
                          std::span<const Criterion> stages, const SelectionContext& ctx,
                          const StrategyConfig& config, std::uint64_t seed) {
  return select_cascade(pool, n, stages, ctx, config, seed);
}

std::vector<InstanceId> select_entropy(std::span<const InstanceId> pool, std::size_t n,
                                       const Model& model, const ScoreTable& table) {
  const auto ids = sorted_copy(pool);
  auto scores = uncertainty_scores(ids, model, table);
  sort_scores(scores);
  return keep_top("uncertainty", std::move(scores), n).kept;
}

double expected_gradient_length(const Model& model, const InstanceScores& scores) {
  const auto p = predict_proba(model, scores);
  double egl = 0.0;
  for (int k = 0; k < model.num_classes(); ++k) {
    egl += p[k] * embedding_gradient_norm(model, scores, k);
  }
  return egl;
}

std::vector<InstanceId> select_egl(std::span<const InstanceId> pool, std::size_t n,
                                   const Model& model, const ScoreTable& table) {
  const auto ids = sorted_copy(pool);
  std::vector<CriterionScore> scores;
  scores.reserve(ids.size());
  for (InstanceId id : ids) scores.push_back({id, -expected_gradient_length(model, table.at(id))});
  sort_scores(scores);
  return keep_top("egl", std::move(scores), n).kept;
}

std::vector<InstanceId> select_random(std::span<const InstanceId> pool, std::size_t n,
                                      std::uint64_t seed) {
  auto ids = sorted_copy(pool);
  n = std::min(n, ids.size());
  Rng rng(derive_seed(seed, 0x7a4d));
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.index(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(n);
  return ids;
}

Selection select(std::span<const InstanceId> pool, std::size_t n, const SelectionContext& ctx,
                 const StrategyConfig& config, std::uint64_t seed) {
  auto single = [&](std::string stage, std::vector<InstanceId> ids) {
    Selection s;
    StageRecord rec;
    rec.stage = std::move(stage);
    rec.input_size = pool.size();
    rec.kept = ids;
    s.ids = std::move(ids);
    s.trace.stages.push_back(std::move(rec));
    return s;
  };
  switch (config.kind) {
    case StrategyKind::kRandom: return single("random", select_random(pool, n, seed));
    case StrategyKind::kEgl: return single("egl", select_egl(pool, n, ctx.model, ctx.table));
    case StrategyKind::kEntropy: {
      const std::array stages = {Criterion::kUncertainty};
      return select_cascade(pool, n, stages, ctx, config, seed);
    }
    case StrategyKind::kLmCascade: return select_lm_cascade(pool, n, ctx, config, seed);
    case StrategyKind::kCustom: return select_ablation(pool, n, config.stages, ctx, config, seed);
  }
  throw Error(ErrorCode::kConfig, "unhandled strategy kind");
}

void write_trace_jsonl(const SelectionTrace& trace, std::size_t round, std::ostream& out) {
  for (const auto& st : trace.stages) {
    out << "{\"round\":" << round << ",\"stage\":\"" << st.stage
        << "\",\"input_size\":" << st.input_size << ",\"kept\":[";
    for (std::size_t i = 0; i < st.kept.size(); ++i) out << (i ? "," : "") << st.kept[i];
    out << "],\"scores\":[";
    for (std::size_t i = 0; i < st.scores.size(); ++i) {
      out << (i ? "," : "") << format_double(st.scores[i]);
    }
    out << "]}\n";
  }
}

}  // namespace alselect
