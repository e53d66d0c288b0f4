#include "alselect/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "alselect/clustering.hpp"
#include "alselect/editseq.hpp"
#include "alselect/error.hpp"
#include "alselect/log.hpp"

namespace alselect {
namespace {

double sum_of(std::span<const double> xs) { return std::accumulate(xs.begin(), xs.end(), 0.0); }

// Clean-probability term l / sum(s) of one sentence.
double fluency_term(std::span<const double> losses, InstanceId id, char side) {
  const double total = sum_of(losses);
  if (total <= 0.0) {
    warn("ZeroLossSum: instance " + std::to_string(id) + " sentence " + side +
         " has zero total loss");
    return 1.0 / kZeroLossEpsilon;
  }
  return static_cast<double>(losses.size()) / total;
}

std::vector<double> token_weights(std::span<const double> losses, bool weighting, InstanceId id,
                                  char side) {
  const double n = static_cast<double>(losses.size());
  std::vector<double> w(losses.size(), n > 0 ? 1.0 / n : 0.0);
  if (!weighting) return w;
  const double total = sum_of(losses);
  if (total <= 0.0) {
    warn("ZeroLossSum: instance " + std::to_string(id) + " sentence " + side +
         " has zero total loss; using uniform weights");
    return w;
  }
  for (std::size_t i = 0; i < losses.size(); ++i) w[i] = losses[i] / total;
  return w;
}

void accumulate(std::vector<double>& v, double scale, const Embedding& e) {
  for (std::size_t j = 0; j < v.size(); ++j) v[j] += scale * e[j];
}

}  // namespace

std::string_view to_string(Combine combine) {
  switch (combine) {
    case Combine::kEditSub: return "editsub";
    case Combine::kSub: return "sub";
    case Combine::kSum: return "sum";
  }
  return "?";
}

std::string_view to_string(Symmetrize symmetrize) {
  switch (symmetrize) {
    case Symmetrize::kSquare: return "square";
    case Symmetrize::kAbs: return "abs";
    case Symmetrize::kNone: return "none";
  }
  return "?";
}

double entropy(std::span<const double> dist) {
  double h = 0.0;
  for (double p : dist) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

void sort_scores(std::vector<CriterionScore>& scores) {
  std::sort(scores.begin(), scores.end(), [](const CriterionScore& x, const CriterionScore& y) {
    return x.score != y.score ? x.score < y.score : x.id < y.id;
  });
}

std::vector<CriterionScore> uncertainty_scores(std::span<const InstanceId> ids,
                                               const Model& model, const ScoreTable& table) {
  std::vector<CriterionScore> out;
  out.reserve(ids.size());
  for (InstanceId id : ids) {
    out.push_back({id, -entropy(predict_proba(model, table.at(id)))});
  }
  return out;
}

std::vector<CriterionScore> noise_scores(std::span<const InstanceId> ids,
                                         const ScoreTable& table) {
  std::vector<CriterionScore> out;
  out.reserve(ids.size());
  for (InstanceId id : ids) {
    const auto& s = table.at(id);
    out.push_back({id, -fluency_term(s.loss_a, id, 'A') - fluency_term(s.loss_b, id, 'B')});
  }
  return out;
}

double coverage_term(std::span<const double> losses, double beta) {
  double kept_sum = 0.0;
  std::size_t kept = 0;
  for (double s : losses) {
    if (s > beta) continue;
    kept_sum += s;
    ++kept;
  }
  return kept == 0 ? 0.0 : kept_sum / static_cast<double>(kept);
}

std::vector<CriterionScore> coverage_scores(std::span<const InstanceId> ids,
                                            const ScoreTable& table, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::kConfig, "coverage beta must be > 0");
  std::vector<CriterionScore> out;
  out.reserve(ids.size());
  for (InstanceId id : ids) {
    const auto& s = table.at(id);
    out.push_back({id, -coverage_term(s.loss_a, beta) - coverage_term(s.loss_b, beta)});
  }
  return out;
}

InstanceVector diversity_vector(const SentencePair& pair, const InstanceScores& scores,
                                const DiversityOptions& options) {
  if (scores.loss_a.size() != pair.tokens_a.size() || scores.loss_b.size() != pair.tokens_b.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "scores of instance " + std::to_string(pair.id) + " do not match its tokens");
  }
  // Equal token sequences fall back to the scores so the orientation is still
  // decided by content, not by which side came first.
  const bool swapped =
      pair.tokens_a != pair.tokens_b
          ? std::lexicographical_compare(pair.tokens_b.begin(), pair.tokens_b.end(),
                                         pair.tokens_a.begin(), pair.tokens_a.end())
          : std::tie(scores.loss_b, scores.emb_b) < std::tie(scores.loss_a, scores.emb_a);
  const auto& tok_a = swapped ? pair.tokens_b : pair.tokens_a;
  const auto& tok_b = swapped ? pair.tokens_a : pair.tokens_b;
  const auto& loss_a = swapped ? scores.loss_b : scores.loss_a;
  const auto& loss_b = swapped ? scores.loss_a : scores.loss_b;
  const auto& emb_a = swapped ? scores.emb_b : scores.emb_a;
  const auto& emb_b = swapped ? scores.emb_a : scores.emb_b;
  const char side_a = swapped ? 'B' : 'A';
  const char side_b = swapped ? 'A' : 'B';

  const std::size_t dim = !emb_a.empty() ? emb_a[0].size() : (!emb_b.empty() ? emb_b[0].size() : 0);
  const auto w_a = token_weights(loss_a, options.weighting, pair.id, side_a);
  const auto w_b = token_weights(loss_b, options.weighting, pair.id, side_b);

  InstanceVector out;
  out.id = pair.id;
  out.v.assign(dim, 0.0);
  switch (options.combine) {
    case Combine::kEditSub: {
      const auto script = edit_script(tok_a, tok_b);
      for (const auto& op : script.inserted) accumulate(out.v, w_b[op.position], emb_b[op.position]);
      for (const auto& op : script.deleted) accumulate(out.v, -w_a[op.position], emb_a[op.position]);
      break;
    }
    case Combine::kSub:
    case Combine::kSum: {
      const double sign_a = options.combine == Combine::kSub ? -1.0 : 1.0;
      for (std::size_t i = 0; i < emb_b.size(); ++i) accumulate(out.v, w_b[i], emb_b[i]);
      for (std::size_t i = 0; i < emb_a.size(); ++i) accumulate(out.v, sign_a * w_a[i], emb_a[i]);
      break;
    }
  }
  if (swapped) {
    for (auto& x : out.v) x = -x;
  }
  out.squared.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    switch (options.symmetrize) {
      case Symmetrize::kSquare: out.squared[j] = out.v[j] * out.v[j]; break;
      case Symmetrize::kAbs: out.squared[j] = std::abs(out.v[j]); break;
      case Symmetrize::kNone: out.squared[j] = out.v[j]; break;
    }
  }
  return out;
}

DiversityPick diversity_select(std::span<const InstanceVector> vectors, std::size_t m,
                               std::uint64_t seed) {
  if (m < 1 || m > vectors.size()) {
    throw Error(ErrorCode::kBadK, "diversity selection of " + std::to_string(m) + " from " +
                                      std::to_string(vectors.size()) + " instances");
  }
  std::vector<std::size_t> order(vectors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return vectors[x].id < vectors[y].id; });

  DiversityPick pick;
  if (m == vectors.size()) {
    for (auto i : order) pick.ids.push_back(vectors[i].id);
    pick.representatives = m;
    return pick;
  }

  std::vector<Point> points;
  points.reserve(order.size());
  for (auto i : order) points.push_back(vectors[i].squared);

  KMeansOptions opts;
  opts.k = m;
  opts.seed = seed;
  const auto clustering = kmeans(points, opts);
  const auto reps = representatives(points, clustering);

  std::vector<bool> chosen(points.size(), false);
  for (auto r : reps) {
    chosen[r] = true;
    pick.ids.push_back(vectors[order[r]].id);
  }
  pick.representatives = reps.size();

  // Farthest-point top-up; points are in id order so strict '>' keeps the lowest id.
  std::vector<double> gap(points.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (auto r : reps) gap[i] = std::min(gap[i], squared_distance(points[i], points[r]));
  }
  while (pick.ids.size() < m) {
    std::size_t best = points.size();
    double best_gap = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!chosen[i] && gap[i] > best_gap) {
        best_gap = gap[i];
        best = i;
      }
    }
    chosen[best] = true;
    pick.ids.push_back(vectors[order[best]].id);
    for (std::size_t i = 0; i < points.size(); ++i) {
      gap[i] = std::min(gap[i], squared_distance(points[i], points[best]));
    }
  }
  return pick;
}

}  // namespace alselect
