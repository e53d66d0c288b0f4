#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace alselect {

using Token = std::string;
using InstanceId = std::size_t;
using Label = int;

struct SentencePair {
  InstanceId id = 0;
  std::vector<Token> tokens_a;
  std::vector<Token> tokens_b;
  std::optional<Label> label;
  /// Set when the source file marks the record as part of its own test split.
  bool declared_test = false;
};

class Dataset {
 public:
  Dataset() = default;
  /// Validates ids (must equal position), token counts and labels.
  Dataset(std::vector<SentencePair> pairs, int num_classes);

  std::span<const SentencePair> pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  int num_classes() const { return num_classes_; }

  /// Throws MissingInstance for unknown ids.
  const SentencePair& at(InstanceId id) const;

  bool has_declared_test() const;

 private:
  std::vector<SentencePair> pairs_;
  int num_classes_ = 2;
};

enum class DatasetFormat { kTsv, kJsonl };

/// Parses "tsv" / "jsonl"; throws Config otherwise.
DatasetFormat parse_dataset_format(std::string_view name);
std::string_view to_string(DatasetFormat format);

/// Lowercases ASCII letters and splits on Unicode whitespace, collapsing runs.
std::vector<Token> tokenize(std::string_view text);

/// Joins tokens with single spaces.
std::string join(std::span<const Token> tokens);

/// TSV rows are `sentence_a<TAB>sentence_b[<TAB>label]`. A leading
/// `# num_classes=K` line declares K. JSONL rows are objects with
/// `sentence_a`, `sentence_b`, optional `label`, optional pre-tokenized
/// `tokens_a`/`tokens_b`, and optional `split` ("test" marks the record as
/// held out). A JSONL first line `{"num_classes": K}` declares K.
Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format);
Dataset parse_dataset(std::string_view content, DatasetFormat format);

struct SplitState {
  std::vector<InstanceId> pool;     // Q
  std::vector<InstanceId> labeled;  // P
  std::vector<InstanceId> test;
};

/// Samples ceil(test_fraction * |dataset|) labeled ids as test, the rest is the
/// pool, P is empty. All id lists are sorted ascending.
SplitState make_split(const Dataset& dataset, double test_fraction, std::uint64_t seed);

/// Uses the records flagged `declared_test` as test when any exist, otherwise
/// falls back to make_split.
SplitState split_for_experiment(const Dataset& dataset, double test_fraction,
                                std::uint64_t seed);

}  // namespace alselect
