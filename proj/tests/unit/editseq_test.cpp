#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "alselect/editseq.hpp"
#include "alselect/random.hpp"
#include "oracles.hpp"

namespace alselect {
namespace {

std::vector<Token> toks(std::initializer_list<const char*> xs) { return {xs.begin(), xs.end()}; }

std::vector<std::size_t> positions(const std::vector<EditOp>& ops) {
  std::vector<std::size_t> out;
  for (const auto& op : ops) out.push_back(op.position);
  return out;
}

TEST(EditScript, SingleTokenSwap) {
  const auto s = edit_script(toks({"the", "cat", "sat"}), toks({"the", "dog", "sat"}));
  EXPECT_EQ(s.deleted, (std::vector<EditOp>{{1, "cat"}}));
  EXPECT_EQ(s.inserted, (std::vector<EditOp>{{1, "dog"}}));
}

TEST(EditScript, IdentityIsEmpty) {
  const auto a = toks({"x", "y", "x"});
  EXPECT_TRUE(edit_script(a, a).empty());
  EXPECT_TRUE(edit_script({}, {}).empty());
}

TEST(EditScript, ShiftExampleMatchesBruteForce) {
  const auto a = toks({"a", "b", "c"});
  const auto b = toks({"b", "c", "d"});
  const auto s = edit_script(a, b);
  EXPECT_EQ(s.deleted, (std::vector<EditOp>{{0, "a"}}));
  EXPECT_EQ(s.inserted, (std::vector<EditOp>{{2, "d"}}));
  const auto minimal = oracle::minimal_scripts(a, b);
  ASSERT_FALSE(minimal.empty());
  EXPECT_EQ(minimal.front().first.size() + minimal.front().second.size(), 2u);
  const auto found = std::find(minimal.begin(), minimal.end(),
                               std::pair{positions(s.deleted), positions(s.inserted)});
  EXPECT_NE(found, minimal.end());
}

TEST(EditScript, OneSidedEmpty) {
  const auto a = toks({"p", "q"});
  const auto s = edit_script(a, {});
  EXPECT_EQ(s.deleted.size(), 2u);
  EXPECT_TRUE(s.inserted.empty());
  const auto t = edit_script({}, a);
  EXPECT_EQ(positions(t.inserted), (std::vector<std::size_t>{0, 1}));
}

TEST(EditScript, PrefersDeleteBeforeInsertOnTies) {
  // Both "delete x, insert y" orders are minimal; delete is recorded first in the scan.
  const auto s = edit_script(toks({"x"}), toks({"y"}));
  EXPECT_EQ(s.deleted, (std::vector<EditOp>{{0, "x"}}));
  EXPECT_EQ(s.inserted, (std::vector<EditOp>{{0, "y"}}));
}

class EditScriptProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(EditScriptProperty, CostSoundnessAndMinimality) {
  Rng rng(GetParam());
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t alphabet = 2 + rng.index(4);
    auto gen = [&] {
      std::vector<Token> v(rng.index(13));
      for (auto& t : v) t = std::string(1, static_cast<char>('a' + rng.index(alphabet)));
      return v;
    };
    const auto a = gen();
    const auto b = gen();
    const auto s = edit_script(a, b);

    const std::size_t lcs = oracle::brute_lcs(a, b);
    EXPECT_EQ(s.cost(), a.size() + b.size() - 2 * lcs);
    EXPECT_EQ(apply_script(a, s), b);
    EXPECT_TRUE(edit_script(a, a).empty());

    std::map<Token, long> balance;
    for (const auto& t : a) ++balance[t];
    for (const auto& op : s.deleted) --balance[op.token];
    for (const auto& t : b) --balance[t];
    for (const auto& op : s.inserted) ++balance[op.token];
    for (const auto& [tok, n] : balance) EXPECT_EQ(n, 0) << tok;

    for (const auto& op : s.deleted) EXPECT_EQ(a[op.position], op.token);
    for (const auto& op : s.inserted) EXPECT_EQ(b[op.position], op.token);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, EditScriptProperty, ::testing::Values(1, 2, 3, 4, 5));

}  // namespace
}  // namespace alselect
