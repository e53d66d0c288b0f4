#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "alselect/corpus.hpp"
#include "alselect/lm_scores.hpp"
#include "alselect/random.hpp"

namespace alselect::testing {

inline SentencePair make_pair(InstanceId id, const std::string& a, const std::string& b,
                              std::optional<Label> label = std::nullopt) {
  SentencePair p;
  p.id = id;
  p.tokens_a = tokenize(a);
  p.tokens_b = tokenize(b);
  p.label = label;
  return p;
}

/// Scores with explicit losses and seeded random embeddings.
inline InstanceScores random_scores(InstanceId id, std::size_t la, std::size_t lb, std::size_t dim,
                                    std::uint64_t seed) {
  Rng rng(seed);
  InstanceScores s;
  s.id = id;
  for (std::size_t i = 0; i < la; ++i) {
    s.loss_a.push_back(0.1 + 5.0 * rng.uniform());
    Embedding e(dim);
    for (auto& x : e) x = rng.normal();
    s.emb_a.push_back(e);
  }
  for (std::size_t i = 0; i < lb; ++i) {
    s.loss_b.push_back(0.1 + 5.0 * rng.uniform());
    Embedding e(dim);
    for (auto& x : e) x = rng.normal();
    s.emb_b.push_back(e);
  }
  return s;
}

/// A pool of distinct random pairs with random scores.
struct RandomPool {
  Dataset dataset;
  ScoreTable table;
  std::vector<InstanceId> ids;
};

inline RandomPool random_pool(std::size_t size, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SentencePair> pairs;
  ScoreTable table(dim);
  std::vector<InstanceId> ids;
  for (std::size_t i = 0; i < size; ++i) {
    SentencePair p;
    p.id = i;
    const std::size_t la = 2 + rng.index(5);
    const std::size_t lb = 2 + rng.index(5);
    for (std::size_t k = 0; k < la; ++k) p.tokens_a.push_back("w" + std::to_string(rng.index(50)));
    for (std::size_t k = 0; k < lb; ++k) p.tokens_b.push_back("w" + std::to_string(rng.index(50)));
    p.label = static_cast<Label>(rng.index(2));
    table.insert(random_scores(i, la, lb, dim, rng.next()));
    pairs.push_back(std::move(p));
    ids.push_back(i);
  }
  return {Dataset(std::move(pairs), 2), std::move(table), std::move(ids)};
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("alselect_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace alselect::testing
