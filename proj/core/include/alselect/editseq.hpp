#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "alselect/corpus.hpp"

namespace alselect {

struct EditOp {
  std::size_t position = 0;
  Token token;

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

/// Insert/delete-only script transforming A into B. Deleted positions index
/// A, inserted positions index B.
struct EditScript {
  std::vector<EditOp> deleted;
  std::vector<EditOp> inserted;

  bool empty() const { return deleted.empty() && inserted.empty(); }
  std::size_t cost() const { return deleted.size() + inserted.size(); }
};

/// Minimal script via an LCS table over suffixes. Scanning left to right,
/// ties prefer match, then delete, then insert.
EditScript edit_script(std::span<const Token> a, std::span<const Token> b);

/// Rebuilds B from A and the script.
std::vector<Token> apply_script(std::span<const Token> a, const EditScript& script);

}  // namespace alselect
