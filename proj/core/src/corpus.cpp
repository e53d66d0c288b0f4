#include "alselect/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "alselect/error.hpp"
#include "alselect/random.hpp"

namespace alselect {
namespace {

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Decodes one UTF-8 sequence starting at text[pos]; returns its byte length.
// Invalid bytes decode as themselves with length 1.
std::size_t decode_utf8(std::string_view text, std::size_t pos, char32_t& cp) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  std::size_t len = 1;
  if (lead < 0x80) {
    cp = lead;
    return 1;
  }
  if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    cp = lead;
    return 1;
  }
  if (pos + len > text.size()) {
    cp = lead;
    return 1;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto c = static_cast<unsigned char>(text[pos + i]);
    if ((c & 0xC0) != 0x80) {
      cp = lead;
      return 1;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  return len;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kMalformedRecord, "line " + std::to_string(line) + ": " + what);
}

std::optional<Label> parse_label_field(std::string_view field, std::size_t line) {
  while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.remove_suffix(1);
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  if (field.empty()) return std::nullopt;
  Label value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || value < 0) {
    malformed(line, "label '" + std::string(field) + "' is not a nonnegative integer");
  }
  return value;
}

std::vector<Token> checked_tokens(const nlohmann::json& arr, std::size_t line,
                                  const char* key) {
  if (!arr.is_array()) malformed(line, std::string(key) + " must be an array of strings");
  std::vector<Token> tokens;
  tokens.reserve(arr.size());
  for (const auto& t : arr) {
    if (!t.is_string()) malformed(line, std::string(key) + " must be an array of strings");
    auto s = t.get<std::string>();
    auto retok = tokenize(s);
    if (retok.size() != 1 || s.empty()) {
      malformed(line, std::string(key) + " holds an empty or whitespace-bearing token");
    }
    tokens.push_back(std::move(s));
  }
  return tokens;
}

struct RawRecords {
  std::vector<SentencePair> pairs;
  std::vector<std::size_t> lines;
  std::optional<int> declared_k;
};

RawRecords parse_tsv(std::string_view content) {
  RawRecords out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (end == content.size()) break;
      continue;
    }
    if (line.front() == '#') {
      constexpr std::string_view kKey = "num_classes=";
      auto at = line.find(kKey);
      if (at != std::string_view::npos) {
        auto value = line.substr(at + kKey.size());
        int k = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), k);
        if (ec != std::errc() || k < 2) malformed(line_no, "bad num_classes header");
        out.declared_k = k;
      }
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t f = 0;
    while (true) {
      auto tab = line.find('\t', f);
      fields.push_back(line.substr(f, tab == std::string_view::npos ? line.npos : tab - f));
      if (tab == std::string_view::npos) break;
      f = tab + 1;
    }
    if (fields.size() < 2) malformed(line_no, "missing sentence_b");
    if (fields.size() > 3) malformed(line_no, "expected at most 3 tab-separated fields");
    SentencePair pair;
    pair.tokens_a = tokenize(fields[0]);
    pair.tokens_b = tokenize(fields[1]);
    if (pair.tokens_a.empty()) malformed(line_no, "empty sentence_a");
    if (pair.tokens_b.empty()) malformed(line_no, "empty sentence_b");
    if (fields.size() == 3) pair.label = parse_label_field(fields[2], line_no);
    out.pairs.push_back(std::move(pair));
    out.lines.push_back(line_no);
    if (end == content.size()) break;
  }
  return out;
}

RawRecords parse_jsonl(std::string_view content) {
  RawRecords out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool first_object = true;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      malformed(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) malformed(line_no, "expected a JSON object");
    const bool is_header = first_object && obj.contains("num_classes") &&
                           !obj.contains("sentence_a") && !obj.contains("tokens_a");
    first_object = false;
    if (is_header) {
      const auto& k = obj["num_classes"];
      if (!k.is_number_integer() || k.get<long long>() < 2) {
        malformed(line_no, "num_classes must be an integer >= 2");
      }
      out.declared_k = k.get<int>();
      continue;
    }
    SentencePair pair;
    auto sentence = [&](const char* text_key, const char* tok_key) {
      if (obj.contains(tok_key)) return checked_tokens(obj[tok_key], line_no, tok_key);
      if (!obj.contains(text_key)) malformed(line_no, std::string("missing ") + text_key);
      if (!obj[text_key].is_string()) malformed(line_no, std::string(text_key) + " must be a string");
      return tokenize(obj[text_key].get<std::string>());
    };
    pair.tokens_a = sentence("sentence_a", "tokens_a");
    pair.tokens_b = sentence("sentence_b", "tokens_b");
    if (pair.tokens_a.empty()) malformed(line_no, "empty sentence_a");
    if (pair.tokens_b.empty()) malformed(line_no, "empty sentence_b");
    if (obj.contains("label") && !obj["label"].is_null()) {
      const auto& l = obj["label"];
      if (!l.is_number_integer() || l.get<long long>() < 0) {
        malformed(line_no, "label must be a nonnegative integer");
      }
      pair.label = l.get<Label>();
    }
    if (obj.contains("split")) {
      if (!obj["split"].is_string()) malformed(line_no, "split must be a string");
      pair.declared_test = obj["split"].get<std::string>() == "test";
    }
    out.pairs.push_back(std::move(pair));
    out.lines.push_back(line_no);
  }
  return out;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  Token current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = 0;
    const std::size_t len = decode_utf8(text, pos, cp);
    if (is_unicode_space(cp)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (len == 1) {
      char c = text[pos];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      current.push_back(c);
    } else {
      current.append(text.substr(pos, len));
    }
    pos += len;
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string join(std::span<const Token> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Dataset::Dataset(std::vector<SentencePair> pairs, int num_classes)
    : pairs_(std::move(pairs)), num_classes_(num_classes) {
  if (num_classes_ < 2) {
    throw Error(ErrorCode::kConfig, "num_classes must be >= 2");
  }
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto& p = pairs_[i];
    if (p.id != i) {
      throw Error(ErrorCode::kMalformedRecord,
                  "pair ids must be sequential; expected " + std::to_string(i) + ", got " +
                      std::to_string(p.id));
    }
    if (p.tokens_a.empty() || p.tokens_b.empty()) {
      throw Error(ErrorCode::kMalformedRecord, "pair " + std::to_string(i) + " has an empty sentence");
    }
    if (p.label && (*p.label < 0 || *p.label >= num_classes_)) {
      throw Error(ErrorCode::kUnknownLabel, "pair " + std::to_string(i) + " label " +
                                                std::to_string(*p.label) + " >= K=" +
                                                std::to_string(num_classes_));
    }
  }
}

const SentencePair& Dataset::at(InstanceId id) const {
  if (id >= pairs_.size()) {
    throw Error(ErrorCode::kMissingInstance, "no pair with id " + std::to_string(id));
  }
  return pairs_[id];
}

bool Dataset::has_declared_test() const {
  return std::any_of(pairs_.begin(), pairs_.end(),
                     [](const SentencePair& p) { return p.declared_test; });
}

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "tsv") return DatasetFormat::kTsv;
  if (name == "jsonl") return DatasetFormat::kJsonl;
  throw Error(ErrorCode::kConfig, "unknown dataset format '" + std::string(name) + "'");
}

std::string_view to_string(DatasetFormat format) {
  return format == DatasetFormat::kTsv ? "tsv" : "jsonl";
}

Dataset parse_dataset(std::string_view content, DatasetFormat format) {
  RawRecords raw = format == DatasetFormat::kTsv ? parse_tsv(content) : parse_jsonl(content);
  int max_label = -1;
  for (std::size_t i = 0; i < raw.pairs.size(); ++i) {
    raw.pairs[i].id = i;
    if (raw.pairs[i].label) {
      const Label l = *raw.pairs[i].label;
      if (raw.declared_k && l >= *raw.declared_k) {
        throw Error(ErrorCode::kUnknownLabel,
                    "line " + std::to_string(raw.lines[i]) + ": label " + std::to_string(l) +
                        " >= declared num_classes " + std::to_string(*raw.declared_k));
      }
      max_label = std::max(max_label, l);
    }
  }
  const int k = raw.declared_k ? *raw.declared_k : std::max(2, max_label + 1);
  return Dataset(std::move(raw.pairs), k);
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open dataset " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), format);
}

SplitState make_split(const Dataset& dataset, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kConfig, "test_fraction must lie in (0, 1)");
  }
  std::vector<InstanceId> labeled;
  for (const auto& p : dataset.pairs()) {
    if (p.label) labeled.push_back(p.id);
  }
  if (labeled.size() < 2) {
    throw Error(ErrorCode::kInsufficientData, "need at least 2 labeled pairs to split");
  }
  // Guard against products like 0.3 * 10 landing a hair above an integer.
  const double raw = test_fraction * static_cast<double>(dataset.size());
  const auto test_count = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  if (test_count == 0) throw Error(ErrorCode::kInsufficientData, "test set would be empty");
  if (test_count > labeled.size()) {
    throw Error(ErrorCode::kInsufficientData, "test set needs " + std::to_string(test_count) +
                                                  " labeled pairs, have " +
                                                  std::to_string(labeled.size()));
  }
  if (test_count >= dataset.size()) {
    throw Error(ErrorCode::kInsufficientData, "pool would be empty");
  }
  Rng rng(derive_seed(seed, 0x5b11));
  rng.shuffle(labeled);
  SplitState split;
  split.test.assign(labeled.begin(), labeled.begin() + static_cast<std::ptrdiff_t>(test_count));
  std::sort(split.test.begin(), split.test.end());
  std::vector<bool> is_test(dataset.size(), false);
  for (auto id : split.test) is_test[id] = true;
  for (const auto& p : dataset.pairs()) {
    if (!is_test[p.id]) split.pool.push_back(p.id);
  }
  return split;
}

SplitState split_for_experiment(const Dataset& dataset, double test_fraction,
                                std::uint64_t seed) {
  if (!dataset.has_declared_test()) return make_split(dataset, test_fraction, seed);
  SplitState split;
  for (const auto& p : dataset.pairs()) {
    if (p.declared_test) {
      if (!p.label) {
        throw Error(ErrorCode::kInsufficientData,
                    "declared test pair " + std::to_string(p.id) + " has no label");
      }
      split.test.push_back(p.id);
    } else {
      split.pool.push_back(p.id);
    }
  }
  if (split.pool.empty()) throw Error(ErrorCode::kInsufficientData, "pool would be empty");
  return split;
}

}  // namespace alselect
