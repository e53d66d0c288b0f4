#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "alselect/corpus.hpp"

namespace alselect {

using Embedding = std::vector<double>;

/// Per-token masked-LM reconstruction losses and contextual embeddings of one
/// sentence pair.
struct InstanceScores {
  InstanceId id = 0;
  std::vector<double> loss_a;
  std::vector<double> loss_b;
  std::vector<Embedding> emb_a;
  std::vector<Embedding> emb_b;
};

inline constexpr std::string_view kScoreSchema = "alselect-scores-v1";
inline constexpr std::size_t kDefaultStubDim = 32;

class ScoreTable {
 public:
  explicit ScoreTable(std::size_t dim = kDefaultStubDim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(InstanceId id) const { return entries_.count(id) != 0; }

  /// Throws MissingScores when the id is absent.
  const InstanceScores& at(InstanceId id) const;

  /// Checks internal consistency (finite, nonnegative losses, dimension)
  /// and inserts or replaces.
  void insert(InstanceScores scores);

  const std::map<InstanceId, InstanceScores>& entries() const { return entries_; }

 private:
  std::size_t dim_;
  std::map<InstanceId, InstanceScores> entries_;
};

/// Cross-checks token counts against the dataset and requires every dataset id.
void validate_against(const ScoreTable& table, const Dataset& dataset);

/// Reads the JSONL score file and validates it against the dataset.
ScoreTable load_scores(const std::filesystem::path& path, const Dataset& dataset);
ScoreTable parse_scores(std::istream& in);

/// Writes header plus one object per instance in id order. Doubles use the
/// shortest decimal that round-trips.
void write_scores(const ScoreTable& table, std::ostream& out);
void write_scores(const ScoreTable& table, const std::filesystem::path& path);

/// Hermetic scorer: unigram add-one surprisal as the loss and a seeded
/// token-hash unit vector as the embedding. Counts run over every sentence of
/// the dataset.
ScoreTable stub_scores(const Dataset& dataset, std::size_t dim, std::uint64_t seed);

/// Unit-norm embedding for a token under the stub scorer.
Embedding stub_embedding(std::string_view token, std::size_t dim, std::uint64_t seed);

}  // namespace alselect
