#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "alselect/corpus.hpp"
#include "alselect/lm_scores.hpp"
#include "alselect/matcher.hpp"

namespace alselect {

/// Smaller score means higher selection priority.
struct CriterionScore {
  InstanceId id = 0;
  double score = 0.0;

  friend bool operator==(const CriterionScore&, const CriterionScore&) = default;
};

inline constexpr double kDefaultBeta = 10.0;
inline constexpr double kZeroLossEpsilon = 1e-9;

/// -sum p ln p with 0 ln 0 = 0.
double entropy(std::span<const double> dist);

/// -Ent(x) under the model's predictive distribution.
std::vector<CriterionScore> uncertainty_scores(std::span<const InstanceId> ids,
                                               const Model& model,
                                               const ScoreTable& table);

/// -(l_A / sum s_a) - (l_B / sum s_b). A sentence whose losses sum to zero
/// contributes -1/epsilon and logs a ZeroLossSum warning.
std::vector<CriterionScore> noise_scores(std::span<const InstanceId> ids,
                                         const ScoreTable& table);

/// Negated clipped mean loss of each sentence, tokens above beta masked out.
/// A fully clipped sentence contributes 0.
std::vector<CriterionScore> coverage_scores(std::span<const InstanceId> ids,
                                            const ScoreTable& table,
                                            double beta = kDefaultBeta);

/// Clipped mean loss of one sentence (the coverage term before negation).
double coverage_term(std::span<const double> losses, double beta);

enum class Combine { kEditSub, kSub, kSum };

/// How the clustered representation is made swap-invariant.
enum class Symmetrize {
  kSquare,  // v * v elementwise
  kAbs,     // |v|, exploratory
  kNone,    // v itself
};

struct DiversityOptions {
  bool weighting = true;
  Symmetrize symmetrize = Symmetrize::kSquare;
  Combine combine = Combine::kEditSub;

  friend bool operator==(const DiversityOptions&, const DiversityOptions&) = default;
};

std::string_view to_string(Combine combine);
std::string_view to_string(Symmetrize symmetrize);

struct InstanceVector {
  InstanceId id = 0;
  std::vector<double> v;
  std::vector<double> squared;
};

/// Loss-weighted embedding difference between the insert and delete
/// sequences. The pair is put in lexicographic order first; when B precedes A
/// the result is computed on (B, A) and negated. Equal token sequences are
/// ordered by their losses, then embeddings.
InstanceVector diversity_vector(const SentencePair& pair, const InstanceScores& scores,
                                const DiversityOptions& options = {});

/// Runs k-means with k = m over the squared vectors and returns cluster
/// representatives, then tops up with farthest-point picks if duplicates left
/// fewer than m. Representatives come first in cluster order.
struct DiversityPick {
  std::vector<InstanceId> ids;
  std::size_t representatives = 0;
};
DiversityPick diversity_select(std::span<const InstanceVector> vectors, std::size_t m,
                               std::uint64_t seed);

/// Orders ascending by score, then id.
void sort_scores(std::vector<CriterionScore>& scores);

}  // namespace alselect
