#include "alselect/editseq.hpp"

#include <algorithm>

namespace alselect {

EditScript edit_script(std::span<const Token> a, std::span<const Token> b) {
  const std::size_t la = a.size();
  const std::size_t lb = b.size();
  // lcs[i][j] = LCS length of a[i:] and b[j:].
  std::vector<std::size_t> lcs((la + 1) * (lb + 1), 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return lcs[i * (lb + 1) + j]; };
  for (std::size_t i = la; i-- > 0;) {
    for (std::size_t j = lb; j-- > 0;) {
      at(i, j) = a[i] == b[j] ? at(i + 1, j + 1) + 1 : std::max(at(i + 1, j), at(i, j + 1));
    }
  }

  EditScript script;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < la || j < lb) {
    if (i < la && j < lb && a[i] == b[j] && at(i, j) == at(i + 1, j + 1) + 1) {
      ++i;
      ++j;
    } else if (i < la && (j == lb || at(i + 1, j) == at(i, j))) {
      script.deleted.push_back({i, a[i]});
      ++i;
    } else {
      script.inserted.push_back({j, b[j]});
      ++j;
    }
  }
  return script;
}

std::vector<Token> apply_script(std::span<const Token> a, const EditScript& script) {
  std::vector<bool> removed(a.size(), false);
  for (const auto& op : script.deleted) {
    if (op.position < a.size()) removed[op.position] = true;
  }
  std::vector<Token> kept;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!removed[i]) kept.push_back(a[i]);
  }
  std::vector<Token> out;
  out.reserve(kept.size() + script.inserted.size());
  std::size_t k = 0;
  for (const auto& op : script.inserted) {
    while (out.size() < op.position && k < kept.size()) out.push_back(kept[k++]);
    out.push_back(op.token);
  }
  while (k < kept.size()) out.push_back(kept[k++]);
  return out;
}

}  // namespace alselect
