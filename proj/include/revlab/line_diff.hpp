#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "revlab/text.hpp"

namespace revlab {

enum class DiffOpKind { equal, del, add };

struct DiffOp {
  DiffOpKind kind;
  int before_line = 0;  // 1-based; 0 for additions
  int after_line = 0;   // 1-based; 0 for deletions
};

struct LineRange {
  int start = 0;  // 1-based; for an empty range, the line preceding the gap
  int count = 0;
};

struct Hunk {
  LineRange before_range;
  LineRange after_range;
};

struct LineDiff {
  std::vector<int> deleted_lines;  // 1-based into before
  std::vector<int> added_lines;    // 1-based into after
  std::vector<Hunk> hunks;
};

// LCS alignment over line vectors. Common prefix/suffix are peeled first;
// the middle runs an O(n*m) LCS table. Middles past the cell cap fall back
// to a whole-block replace (valid, just not minimal).
inline std::vector<DiffOp> diff_alignment(const std::vector<std::string>& before,
                                          const std::vector<std::string>& after) {
  constexpr size_t kMaxCells = 4u * 1000 * 1000;
  size_t n = before.size();
  size_t m = after.size();
  size_t prefix = 0;
  while (prefix < n && prefix < m && before[prefix] == after[prefix]) ++prefix;
  size_t suffix = 0;
  while (suffix < n - prefix && suffix < m - prefix &&
         before[n - 1 - suffix] == after[m - 1 - suffix])
    ++suffix;

  std::vector<DiffOp> ops;
  ops.reserve(n + m);
  for (size_t i = 0; i < prefix; ++i)
    ops.push_back({DiffOpKind::equal, static_cast<int>(i + 1), static_cast<int>(i + 1)});

  size_t bn = n - prefix - suffix;
  size_t am = m - prefix - suffix;
  auto push_del = [&](size_t bi) {
    ops.push_back({DiffOpKind::del, static_cast<int>(prefix + bi + 1), 0});
  };
  auto push_add = [&](size_t aj) {
    ops.push_back({DiffOpKind::add, 0, static_cast<int>(prefix + aj + 1)});
  };

  if (bn > 0 && am > 0 && bn * am <= kMaxCells) {
    std::vector<uint32_t> dp((bn + 1) * (am + 1), 0);
    auto at = [&](size_t i, size_t j) -> uint32_t& { return dp[i * (am + 1) + j]; };
    for (size_t i = 1; i <= bn; ++i) {
      for (size_t j = 1; j <= am; ++j) {
        if (before[prefix + i - 1] == after[prefix + j - 1])
          at(i, j) = at(i - 1, j - 1) + 1;
        else
          at(i, j) = std::max(at(i - 1, j), at(i, j - 1));
      }
    }
    // Backtrack, then reverse. Ties prefer deletions so each replace block
    // lists deletions before additions.
    std::vector<DiffOp> middle;
    size_t i = bn;
    size_t j = am;
    while (i > 0 || j > 0) {
      if (i > 0 && j > 0 && before[prefix + i - 1] == after[prefix + j - 1] &&
          at(i, j) == at(i - 1, j - 1) + 1) {
        middle.push_back({DiffOpKind::equal, static_cast<int>(prefix + i), static_cast<int>(prefix + j)});
        --i;
        --j;
      } else if (i > 0 && (j == 0 || at(i - 1, j) >= at(i, j - 1))) {
        middle.push_back({DiffOpKind::del, static_cast<int>(prefix + i), 0});
        --i;
      } else {
        middle.push_back({DiffOpKind::add, 0, static_cast<int>(prefix + j)});
        --j;
      }
    }
    // Reverse; within runs of non-equal ops, deletions must precede
    // additions, which the tie rule above already guarantees after reversal.
    for (size_t k = middle.size(); k > 0; --k) ops.push_back(middle[k - 1]);
  } else {
    for (size_t i = 0; i < bn; ++i) push_del(i);
    for (size_t j = 0; j < am; ++j) push_add(j);
  }

  for (size_t k = 0; k < suffix; ++k) {
    ops.push_back({DiffOpKind::equal, static_cast<int>(n - suffix + k + 1),
                   static_cast<int>(m - suffix + k + 1)});
  }
  return ops;
}

inline LineDiff diff_from_alignment(const std::vector<DiffOp>& ops) {
  LineDiff diff;
  size_t k = 0;
  int before_seen = 0;
  int after_seen = 0;
  while (k < ops.size()) {
    if (ops[k].kind == DiffOpKind::equal) {
      before_seen = ops[k].before_line;
      after_seen = ops[k].after_line;
      ++k;
      continue;
    }
    Hunk h;
    h.before_range.start = before_seen + 1;
    h.after_range.start = after_seen + 1;
    while (k < ops.size() && ops[k].kind != DiffOpKind::equal) {
      if (ops[k].kind == DiffOpKind::del) {
        diff.deleted_lines.push_back(ops[k].before_line);
        h.before_range.count += 1;
        before_seen = ops[k].before_line;
      } else {
        diff.added_lines.push_back(ops[k].after_line);
        h.after_range.count += 1;
        after_seen = ops[k].after_line;
      }
      ++k;
    }
    if (h.before_range.count == 0) h.before_range.start = before_seen;  // pure insertion point
    if (h.after_range.count == 0) h.after_range.start = after_seen;
    diff.hunks.push_back(h);
  }
  return diff;
}

inline LineDiff diff_lines(std::string_view before_text, std::string_view after_text) {
  std::vector<std::string> before = split_lines(before_text);
  std::vector<std::string> after = split_lines(after_text);
  return diff_from_alignment(diff_alignment(before, after));
}

// Replays a diff against the before text, pulling added-line contents from
// the after text. Returns the reconstructed after text (used to check the
// round-trip invariant).
inline std::string apply_line_diff(std::string_view before_text, std::string_view after_text,
                                   const LineDiff& diff) {
  std::vector<std::string> before = split_lines(before_text);
  std::vector<std::string> after = split_lines(after_text);
  auto contains = [](const std::vector<int>& v, int x) {
    for (int e : v)
      if (e == x) return true;
    return false;
  };
  size_t m = before.size() - diff.deleted_lines.size() + diff.added_lines.size();
  std::vector<std::string> out;
  out.reserve(m);
  size_t i = 1;
  for (size_t j = 1; j <= m; ++j) {
    if (contains(diff.added_lines, static_cast<int>(j))) {
      out.push_back(j <= after.size() ? after[j - 1] : std::string());
    } else {
      while (i <= before.size() && contains(diff.deleted_lines, static_cast<int>(i))) ++i;
      if (i <= before.size()) out.push_back(before[i - 1]);
      ++i;
    }
  }
  return join_lines(out, has_trailing_newline(after_text));
}

}  // namespace revlab
