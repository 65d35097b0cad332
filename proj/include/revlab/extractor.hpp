#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "revlab/function_parser.hpp"
#include "revlab/line_diff.hpp"
#include "revlab/text.hpp"

namespace revlab {

// A commit's change to one function: texts of both versions plus changed
// line indices local to those texts (1-based).
struct FunctionModification {
  std::string commit_hash;
  std::string file;
  std::string function_name;
  std::string function_before;
  std::string function_after;
  std::vector<int> deleted_lines_local;
  std::vector<int> added_lines_local;
  std::string commit_message;
};

enum class LocalizeStatus {
  ok,
  no_change,
  parse_error,       // either side failed to parse (unbalanced braces etc.)
  outside_function,  // some changed line falls outside every function span
  multi_function,    // changed lines touch more than one function on a side
  name_mismatch,     // the touched functions on the two sides differ by name
};

inline const char* to_string(LocalizeStatus s) {
  switch (s) {
    case LocalizeStatus::ok: return "ok";
    case LocalizeStatus::no_change: return "no-change";
    case LocalizeStatus::parse_error: return "parse-error";
    case LocalizeStatus::outside_function: return "outside-function";
    case LocalizeStatus::multi_function: return "multi-function";
    case LocalizeStatus::name_mismatch: return "name-mismatch";
  }
  return "?";
}

struct LocalizeResult {
  LocalizeStatus status = LocalizeStatus::no_change;
  FunctionModification mod;  // filled when status == ok (sans commit fields)
  std::optional<FunctionSpan> span_before;
  std::optional<FunctionSpan> span_after;
};

namespace detail {

inline const FunctionSpan* span_containing(const std::vector<FunctionSpan>& spans, int line) {
  for (const FunctionSpan& s : spans)
    if (s.start_line <= line && line <= s.end_line) return &s;
  return nullptr;
}

// Pairs a span with its same-named counterpart on the other side; overloads
// are matched by ordinal among spans sharing the name.
inline const FunctionSpan* paired_span(const std::vector<FunctionSpan>& own,
                                       const std::vector<FunctionSpan>& other,
                                       const FunctionSpan& span) {
  int ordinal = 0;
  for (const FunctionSpan& s : own) {
    if (&s == &span) break;
    if (s.name == span.name) ++ordinal;
  }
  int seen = 0;
  for (const FunctionSpan& s : other) {
    if (s.name == span.name) {
      if (seen == ordinal) return &s;
      ++seen;
    }
  }
  return nullptr;
}

inline std::string slice_lines(const std::vector<std::string>& lines, int start, int end) {
  std::vector<std::string> out;
  for (int i = start; i <= end && i <= static_cast<int>(lines.size()); ++i)
    out.push_back(lines[i - 1]);
  return join_lines(out, false);
}

}  // namespace detail

// Decides whether a file change is confined to exactly one named function
// present on both sides, and if so extracts it.
inline LocalizeResult localize_change(std::string_view before_text, std::string_view after_text,
                                      const LineDiff& diff) {
  LocalizeResult result;
  if (diff.deleted_lines.empty() && diff.added_lines.empty()) {
    result.status = LocalizeStatus::no_change;
    return result;
  }
  ParseResult before_parse = parse_functions(before_text);
  ParseResult after_parse = parse_functions(after_text);
  if (!before_parse.balanced || !after_parse.balanced) {
    result.status = LocalizeStatus::parse_error;
    return result;
  }

  const FunctionSpan* before_span = nullptr;
  for (int line : diff.deleted_lines) {
    const FunctionSpan* s = detail::span_containing(before_parse.spans, line);
    if (s == nullptr) {
      result.status = LocalizeStatus::outside_function;
      return result;
    }
    if (before_span != nullptr && s != before_span) {
      result.status = LocalizeStatus::multi_function;
      return result;
    }
    before_span = s;
  }
  const FunctionSpan* after_span = nullptr;
  for (int line : diff.added_lines) {
    const FunctionSpan* s = detail::span_containing(after_parse.spans, line);
    if (s == nullptr) {
      result.status = LocalizeStatus::outside_function;
      return result;
    }
    if (after_span != nullptr && s != after_span) {
      result.status = LocalizeStatus::multi_function;
      return result;
    }
    after_span = s;
  }

  if (before_span != nullptr && after_span != nullptr && before_span->name != after_span->name) {
    result.status = LocalizeStatus::name_mismatch;
    return result;
  }
  // A side with no changed lines still needs the function present there.
  if (before_span == nullptr) {
    before_span = detail::paired_span(after_parse.spans, before_parse.spans, *after_span);
    if (before_span == nullptr) {
      result.status = LocalizeStatus::name_mismatch;
      return result;
    }
  }
  if (after_span == nullptr) {
    after_span = detail::paired_span(before_parse.spans, after_parse.spans, *before_span);
    if (after_span == nullptr) {
      result.status = LocalizeStatus::name_mismatch;
      return result;
    }
  }

  std::vector<std::string> before_lines = split_lines(before_text);
  std::vector<std::string> after_lines = split_lines(after_text);
  FunctionModification mod;
  mod.function_name = before_span->name;
  mod.function_before = detail::slice_lines(before_lines, before_span->start_line, before_span->end_line);
  mod.function_after = detail::slice_lines(after_lines, after_span->start_line, after_span->end_line);
  // Local sets come from re-diffing the extracted texts; rebasing the global
  // line numbers could disagree with a fresh diff on LCS tie cases.
  LineDiff local = diff_lines(mod.function_before, mod.function_after);
  mod.deleted_lines_local = local.deleted_lines;
  mod.added_lines_local = local.added_lines;
  result.status = LocalizeStatus::ok;
  result.span_before = *before_span;
  result.span_after = *after_span;
  result.mod = std::move(mod);
  return result;
}

}  // namespace revlab
