#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "alselect/error.hpp"
#include "alselect/lm_scores.hpp"
#include "fixtures.hpp"

namespace alselect {
namespace {

Dataset small_dataset() {
  return parse_dataset("the cat sat\tthe dog sat\t1\na b\tc\t0\n", DatasetFormat::kTsv);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

std::string render(const ScoreTable& t) {
  std::ostringstream out;
  write_scores(t, out);
  return out.str();
}

TEST(StubScores, AddOneSurprisalHandValues) {
  // Corpus "a a b": N = 3 tokens, V = 2 types.
  const auto ds = parse_dataset("a a\tb\t0\n", DatasetFormat::kTsv);
  const auto t = stub_scores(ds, 4, 1);
  const auto& s = t.at(0);
  EXPECT_NEAR(s.loss_a[0], -std::log(3.0 / 5.0), 1e-15);
  EXPECT_NEAR(s.loss_a[0], 0.5108256, 1e-7);
  EXPECT_NEAR(s.loss_b[0], 0.9162907, 1e-7);
}

TEST(StubScores, FrequencyOrderingAndSharedEmbeddings) {
  const auto ds = small_dataset();
  const auto t = stub_scores(ds, 8, 3);
  // "the" and "sat" occur twice, "cat" once.
  EXPECT_LT(t.at(0).loss_a[0], t.at(0).loss_a[1]);
  EXPECT_EQ(t.at(0).loss_a[0], t.at(0).loss_b[0]);
  EXPECT_EQ(t.at(0).emb_a[0], t.at(0).emb_b[0]);
  EXPECT_EQ(t.at(0).emb_a[2], t.at(0).emb_b[2]);
  double norm2 = 0.0;
  for (double x : t.at(1).emb_a[0]) norm2 += x * x;
  EXPECT_NEAR(norm2, 1.0, 1e-12);
  EXPECT_EQ(render(t), render(stub_scores(ds, 8, 3)));
  EXPECT_NE(t.at(0).emb_a[0], stub_scores(ds, 8, 4).at(0).emb_a[0]);
}

TEST(StubScores, RarerTokensHaveLargerLoss) {
  const auto ds = parse_dataset("x x x y y z\tx y\t0\n", DatasetFormat::kTsv);
  const auto t = stub_scores(ds, 2, 0);
  const auto& l = t.at(0).loss_a;
  EXPECT_LT(l[0], l[3]);
  EXPECT_LT(l[3], l[5]);
}

TEST(ScoreFile, RoundTripIsIdentity) {
  const auto ds = small_dataset();
  const auto t = stub_scores(ds, 5, 9);
  std::stringstream buf;
  write_scores(t, buf);
  const auto back = parse_scores(buf);
  validate_against(back, ds);
  ASSERT_EQ(back.size(), t.size());
  for (const auto& [id, s] : t.entries()) {
    const auto& r = back.at(id);
    EXPECT_EQ(r.loss_a, s.loss_a);  // bit-exact
    EXPECT_EQ(r.emb_b, s.emb_b);
  }
  EXPECT_EQ(render(back), render(t));
}

TEST(ScoreFile, ValidationErrors) {
  const auto ds = small_dataset();
  const std::string header = R"({"schema":"alselect-scores-v1","dim":2})";
  const std::string ok1 =
      R"({"id":1,"loss_a":[1,1],"loss_b":[1],"emb_a":[[0,1],[1,0]],"emb_b":[[1,1]]})";
  auto parse = [&](const std::string& text) {
    std::istringstream in(text);
    auto t = parse_scores(in);
    validate_against(t, ds);
  };
  // Truncated loss_a for id 0 (three tokens, two losses + two embeddings).
  EXPECT_EQ(code_of([&] {
              parse(header + "\n" +
                    R"({"id":0,"loss_a":[1,1],"loss_b":[1,1,1],"emb_a":[[0,1],[1,0]],"emb_b":[[1,1],[1,1],[1,1]]})" +
                    "\n" + ok1 + "\n");
            }),
            ErrorCode::kLengthMismatch);
  EXPECT_EQ(code_of([&] {
              parse(header + "\n" +
                    R"({"id":0,"loss_a":[1,1,1],"loss_b":[1,1,1],"emb_a":[[0,1],[1],[1,0]],"emb_b":[[1,1],[1,1],[1,1]]})" +
                    "\n" + ok1 + "\n");
            }),
            ErrorCode::kDimMismatch);
  EXPECT_EQ(code_of([&] { parse(header + "\n" + ok1 + "\n"); }), ErrorCode::kMissingInstance);
  EXPECT_EQ(code_of([&] {
              parse(header + "\n" +
                    R"({"id":0,"loss_a":[1,NaN,1],"loss_b":[1,1,1],"emb_a":[[0,1],[1,1],[1,0]],"emb_b":[[1,1],[1,1],[1,1]]})" +
                    "\n" + ok1 + "\n");
            }),
            ErrorCode::kNonFiniteValue);
  EXPECT_EQ(code_of([&] { parse(R"({"schema":"other","dim":2})" "\n" + ok1 + "\n"); }),
            ErrorCode::kSchemaMismatch);
  EXPECT_EQ(code_of([&] { parse(""); }), ErrorCode::kSchemaMismatch);
  EXPECT_EQ(code_of([&] {
              parse(header + "\n" +
                    R"({"id":1,"loss_a":[-1,1],"loss_b":[1],"emb_a":[[0,1],[1,0]],"emb_b":[[1,1]]})");
            }),
            ErrorCode::kNegativeLoss);
}

TEST(ScoreFile, HeaderMayCarryExporterMetadata) {
  std::istringstream in(
      R"({"schema":"alselect-scores-v1","dim":1,"exporter":{"model":"m","aggregation":"sum"}})"
      "\n"
      R"({"id":0,"loss_a":[0.5],"loss_b":[0.25],"emb_a":[[1]],"emb_b":[[2]]})"
      "\n");
  const auto t = parse_scores(in);
  EXPECT_EQ(t.dim(), 1u);
  EXPECT_EQ(t.at(0).loss_b[0], 0.25);
}

TEST(ScoreTable, MissingScoresOnLookup) {
  ScoreTable t(2);
  EXPECT_EQ(code_of([&] { t.at(3); }), ErrorCode::kMissingScores);
}

}  // namespace
}  // namespace alselect
