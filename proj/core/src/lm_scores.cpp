#include "alselect/lm_scores.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "alselect/error.hpp"
#include "alselect/random.hpp"
#include "alselect/report.hpp"

namespace alselect {
namespace {

std::string where(InstanceId id) { return "id " + std::to_string(id); }

void check_losses(InstanceId id, const std::vector<double>& losses, const char* side) {
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!std::isfinite(losses[i])) {
      throw Error(ErrorCode::kNonFiniteValue,
                  where(id) + " loss_" + side + "[" + std::to_string(i) + "]");
    }
    if (losses[i] < 0.0) {
      throw Error(ErrorCode::kNegativeLoss,
                  where(id) + " loss_" + side + "[" + std::to_string(i) + "]");
    }
  }
}

void check_embeddings(InstanceId id, const std::vector<Embedding>& emb, std::size_t dim,
                      const char* side) {
  for (std::size_t i = 0; i < emb.size(); ++i) {
    if (emb[i].size() != dim) {
      throw Error(ErrorCode::kDimMismatch, where(id) + " emb_" + side + "[" + std::to_string(i) +
                                               "] has dimension " +
                                               std::to_string(emb[i].size()) + ", expected " +
                                               std::to_string(dim));
    }
    for (std::size_t j = 0; j < dim; ++j) {
      if (!std::isfinite(emb[i][j])) {
        throw Error(ErrorCode::kNonFiniteValue, where(id) + " emb_" + side + "[" +
                                                    std::to_string(i) + "][" +
                                                    std::to_string(j) + "]");
      }
    }
  }
}

// Python's json module emits bare NaN/Infinity; quote them so the parser
// accepts the line and the value check can name the position.
std::string quote_nonfinite_literals(const std::string& line) {
  std::string out;
  out.reserve(line.size());
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      out.push_back(c);
      if (c == '\\' && i + 1 < line.size()) {
        out.push_back(line[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out.push_back(c);
      continue;
    }
    bool matched = false;
    for (std::string_view lit : {"-Infinity", "Infinity", "NaN"}) {
      if (line.compare(i, lit.size(), lit) == 0) {
        out += '"';
        out += lit;
        out += '"';
        i += lit.size() - 1;
        matched = true;
        break;
      }
    }
    if (!matched) out.push_back(c);
  }
  return out;
}

double number_at(const nlohmann::json& v, InstanceId id, const std::string& pos) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "NaN" || s == "Infinity" || s == "-Infinity") {
      throw Error(ErrorCode::kNonFiniteValue, where(id) + " " + pos);
    }
  }
  throw Error(ErrorCode::kSchemaMismatch, where(id) + " " + pos + " is not a number");
}

std::vector<double> number_array(const nlohmann::json& obj, const char* key, InstanceId id) {
  if (!obj.contains(key) || !obj[key].is_array()) {
    throw Error(ErrorCode::kSchemaMismatch, where(id) + " missing array '" + key + "'");
  }
  std::vector<double> out;
  out.reserve(obj[key].size());
  std::size_t i = 0;
  for (const auto& v : obj[key]) {
    out.push_back(number_at(v, id, std::string(key) + "[" + std::to_string(i++) + "]"));
  }
  return out;
}

std::vector<Embedding> matrix(const nlohmann::json& obj, const char* key, InstanceId id) {
  if (!obj.contains(key) || !obj[key].is_array()) {
    throw Error(ErrorCode::kSchemaMismatch, where(id) + " missing array '" + key + "'");
  }
  std::vector<Embedding> out;
  out.reserve(obj[key].size());
  std::size_t i = 0;
  for (const auto& row : obj[key]) {
    if (!row.is_array()) {
      throw Error(ErrorCode::kSchemaMismatch,
                  where(id) + " " + key + "[" + std::to_string(i) + "] is not an array");
    }
    Embedding e;
    e.reserve(row.size());
    std::size_t j = 0;
    for (const auto& v : row) {
      e.push_back(number_at(v, id,
                            std::string(key) + "[" + std::to_string(i) + "][" +
                                std::to_string(j++) + "]"));
    }
    out.push_back(std::move(e));
    ++i;
  }
  return out;
}

void write_vector(std::ostream& out, const std::vector<double>& values) {
  out << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_double(values[i]);
  }
  out << ']';
}

void write_matrix(std::ostream& out, const std::vector<Embedding>& rows) {
  out << '[';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out << ',';
    write_vector(out, rows[i]);
  }
  out << ']';
}

}  // namespace

const InstanceScores& ScoreTable::at(InstanceId id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kMissingScores, "no scores for " + where(id));
  }
  return it->second;
}

void ScoreTable::insert(InstanceScores scores) {
  const InstanceId id = scores.id;
  if (scores.loss_a.size() != scores.emb_a.size() || scores.loss_b.size() != scores.emb_b.size()) {
    throw Error(ErrorCode::kLengthMismatch, where(id) + " loss and embedding counts differ");
  }
  check_losses(id, scores.loss_a, "a");
  check_losses(id, scores.loss_b, "b");
  check_embeddings(id, scores.emb_a, dim_, "a");
  check_embeddings(id, scores.emb_b, dim_, "b");
  entries_.insert_or_assign(id, std::move(scores));
}

void validate_against(const ScoreTable& table, const Dataset& dataset) {
  for (const auto& pair : dataset.pairs()) {
    auto it = table.entries().find(pair.id);
    if (it == table.entries().end()) {
      throw Error(ErrorCode::kMissingInstance, "score file has no " + where(pair.id));
    }
    const auto& s = it->second;
    if (s.loss_a.size() != pair.tokens_a.size() || s.loss_b.size() != pair.tokens_b.size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  where(pair.id) + ": expected " + std::to_string(pair.tokens_a.size()) + "+" +
                      std::to_string(pair.tokens_b.size()) + " token scores, got " +
                      std::to_string(s.loss_a.size()) + "+" + std::to_string(s.loss_b.size()));
    }
  }
  if (table.size() > dataset.size()) {
    for (const auto& [id, s] : table.entries()) {
      if (id >= dataset.size()) {
        throw Error(ErrorCode::kMissingInstance, "score file has " + where(id) +
                                                     " which the dataset does not contain");
      }
    }
  }
}

ScoreTable parse_scores(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<ScoreTable> table;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(quote_nonfinite_literals(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object()) {
      throw Error(ErrorCode::kSchemaMismatch, "line " + std::to_string(line_no) + ": not an object");
    }
    if (!table) {
      if (!obj.contains("schema") || obj["schema"] != kScoreSchema) {
        throw Error(ErrorCode::kSchemaMismatch,
                    "header must declare schema \"" + std::string(kScoreSchema) + "\"");
      }
      if (!obj.contains("dim") || !obj["dim"].is_number_integer() || obj["dim"].get<long long>() < 1) {
        throw Error(ErrorCode::kSchemaMismatch, "header dim must be a positive integer");
      }
      table.emplace(obj["dim"].get<std::size_t>());
      continue;
    }
    if (!obj.contains("id") || !obj["id"].is_number_integer() || obj["id"].get<long long>() < 0) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "line " + std::to_string(line_no) + ": missing nonnegative integer id");
    }
    InstanceScores s;
    s.id = obj["id"].get<InstanceId>();
    s.loss_a = number_array(obj, "loss_a", s.id);
    s.loss_b = number_array(obj, "loss_b", s.id);
    s.emb_a = matrix(obj, "emb_a", s.id);
    s.emb_b = matrix(obj, "emb_b", s.id);
    table->insert(std::move(s));
  }
  if (!table) throw Error(ErrorCode::kSchemaMismatch, "empty score file (no header)");
  return std::move(*table);
}

ScoreTable load_scores(const std::filesystem::path& path, const Dataset& dataset) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open score file " + path.string());
  ScoreTable table = parse_scores(in);
  validate_against(table, dataset);
  return table;
}

void write_scores(const ScoreTable& table, std::ostream& out) {
  out << "{\"schema\":\"" << kScoreSchema << "\",\"dim\":" << table.dim() << "}\n";
  for (const auto& [id, s] : table.entries()) {
    out << "{\"id\":" << id << ",\"loss_a\":";
    write_vector(out, s.loss_a);
    out << ",\"loss_b\":";
    write_vector(out, s.loss_b);
    out << ",\"emb_a\":";
    write_matrix(out, s.emb_a);
    out << ",\"emb_b\":";
    write_matrix(out, s.emb_b);
    out << "}\n";
  }
}

void write_scores(const ScoreTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write score file " + path.string());
  write_scores(table, out);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

Embedding stub_embedding(std::string_view token, std::size_t dim, std::uint64_t seed) {
  Rng rng(derive_seed(seed, fnv1a64(token)));
  Embedding e(dim);
  double norm2 = 0.0;
  while (norm2 == 0.0) {
    norm2 = 0.0;
    for (auto& x : e) {
      x = rng.normal();
      norm2 += x * x;
    }
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : e) x *= inv;
  return e;
}

ScoreTable stub_scores(const Dataset& dataset, std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw Error(ErrorCode::kConfig, "stub dimension must be >= 2");
  std::unordered_map<std::string_view, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& p : dataset.pairs()) {
    for (const auto& t : p.tokens_a) ++counts[t];
    for (const auto& t : p.tokens_b) ++counts[t];
    total += p.tokens_a.size() + p.tokens_b.size();
  }
  const double denom = static_cast<double>(total + counts.size());
  std::unordered_map<std::string_view, Embedding> cache;
  auto embed = [&](const Token& t) -> const Embedding& {
    auto it = cache.find(t);
    if (it == cache.end()) it = cache.emplace(t, stub_embedding(t, dim, seed)).first;
    return it->second;
  };
  auto loss = [&](const Token& t) {
    return -std::log(static_cast<double>(counts[t] + 1) / denom);
  };
  ScoreTable table(dim);
  for (const auto& p : dataset.pairs()) {
    InstanceScores s;
    s.id = p.id;
    for (const auto& t : p.tokens_a) {
      s.loss_a.push_back(loss(t));
      s.emb_a.push_back(embed(t));
    }
    for (const auto& t : p.tokens_b) {
      s.loss_b.push_back(loss(t));
      s.emb_b.push_back(embed(t));
    }
    table.insert(std::move(s));
  }
  return table;
}

}  // namespace alselect
