#include "alselect/synthetic.hpp"

#include <string>

#include "alselect/error.hpp"
#include "alselect/random.hpp"

namespace alselect {
namespace {

struct Generator {
  const SyntheticSpec& spec;
  Rng rng;

  Token function_word() { return "fw" + std::to_string(rng.index(spec.function_words)); }
  Token topic_word(std::size_t topic) {
    return "t" + std::to_string(topic) + "w" + std::to_string(rng.index(spec.words_per_topic));
  }
  Token junk_word() { return "zq" + std::to_string(rng.index(1'000'000)); }

  std::size_t length() {
    return spec.min_length + rng.index(spec.max_length - spec.min_length + 1);
  }

  std::vector<Token> sentence(std::size_t topic) {
    std::vector<Token> s;
    const std::size_t len = length();
    for (std::size_t i = 0; i < len; ++i) {
      s.push_back(rng.uniform() < 0.3 ? function_word() : topic_word(topic));
    }
    return s;
  }

  std::vector<Token> paraphrase(const std::vector<Token>& a, std::size_t topic) {
    std::vector<Token> b;
    for (const auto& t : a) {
      if (t.rfind("fw", 0) == 0) {
        if (rng.uniform() < 0.15) continue;  // dropped function word
        b.push_back(t);
      } else {
        b.push_back(rng.uniform() < spec.paraphrase_rate ? topic_word(topic) : t);
      }
    }
    if (b.empty()) b.push_back(topic_word(topic));
    return b;
  }

  std::vector<Token> junk() {
    std::vector<Token> s;
    const std::size_t len = length();
    for (std::size_t i = 0; i < len; ++i) s.push_back(junk_word());
    return s;
  }
};

}  // namespace

Dataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.topics < 2 || spec.words_per_topic < 1 || spec.function_words < 1 ||
      spec.min_length < 1 || spec.max_length < spec.min_length) {
    throw Error(ErrorCode::kConfig, "invalid synthetic corpus spec");
  }
  Generator gen{spec, Rng(derive_seed(spec.seed, 0x5e7))};
  std::vector<SentencePair> pairs;
  pairs.reserve(spec.pairs);
  for (std::size_t i = 0; i < spec.pairs; ++i) {
    SentencePair p;
    p.id = i;
    if (gen.rng.uniform() < spec.noise_fraction) {
      p.tokens_a = gen.junk();
      p.tokens_b = gen.junk();
      p.label = static_cast<Label>(gen.rng.index(2));
    } else {
      const std::size_t topic = gen.rng.index(spec.topics);
      p.tokens_a = gen.sentence(topic);
      if (gen.rng.uniform() < 0.5) {
        p.tokens_b = gen.paraphrase(p.tokens_a, topic);
        p.label = 1;
      } else {
        // Half of the negatives stay on topic.
        std::size_t other = topic;
        if (gen.rng.uniform() < 0.5) {
          other = (topic + 1 + gen.rng.index(spec.topics - 1)) % spec.topics;
        }
        p.tokens_b = gen.sentence(other);
        p.label = 0;
      }
    }
    pairs.push_back(std::move(p));
  }
  return Dataset(std::move(pairs), 2);
}

}  // namespace alselect
