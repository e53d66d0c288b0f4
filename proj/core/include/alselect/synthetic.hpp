#pragma once

#include <cstddef>
#include <cstdint>

#include "alselect/corpus.hpp"

namespace alselect {

/// Two-class sentence-matching corpus with topic-clustered vocabulary.
/// Label 1 pairs paraphrase A within its topic; label 0 pairs draw B from a
/// different topic. A fraction of pairs is noisy: rare junk tokens and a
/// coin-flip label.
struct SyntheticSpec {
  std::size_t pairs = 2500;
  std::size_t topics = 8;
  std::size_t words_per_topic = 40;
  std::size_t function_words = 12;
  std::size_t min_length = 5;
  std::size_t max_length = 10;
  double noise_fraction = 0.1;
  /// Fraction of tokens of a matching B drawn fresh from A's topic.
  double paraphrase_rate = 0.3;
  std::uint64_t seed = 0;
};

Dataset make_synthetic(const SyntheticSpec& spec);

}  // namespace alselect
