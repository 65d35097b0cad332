#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "revlab/dataset.hpp"
#include "revlab/line_diff.hpp"
#include "revlab/tokenizer.hpp"

namespace revlab {

// ----------------------------------------------------------------- types ---

enum class Encoding { AfterOnly, AfterMarkers, BeforeAfter, DiffTags, AddedDeleted };

inline const char* to_string(Encoding e) {
  switch (e) {
    case Encoding::AfterOnly: return "after-only";
    case Encoding::AfterMarkers: return "after-markers";
    case Encoding::BeforeAfter: return "before-after";
    case Encoding::DiffTags: return "diff-tags";
    case Encoding::AddedDeleted: return "added-deleted";
  }
  return "?";
}

inline Encoding encoding_from_string(const std::string& s) {
  if (s == "after-only") return Encoding::AfterOnly;
  if (s == "after-markers") return Encoding::AfterMarkers;
  if (s == "before-after") return Encoding::BeforeAfter;
  if (s == "diff-tags") return Encoding::DiffTags;
  if (s == "added-deleted") return Encoding::AddedDeleted;
  throw ConfigError("unknown encoding '" + s + "'");
}

inline std::vector<Encoding> all_encodings() {
  return {Encoding::AfterOnly, Encoding::AfterMarkers, Encoding::BeforeAfter, Encoding::DiffTags,
          Encoding::AddedDeleted};
}

// Marker and header tokens are emitted directly by the encoders, so the
// tokenizer can never split them; equal-looking text inside function bodies
// tokenizes into punctuation pieces and cannot collide.
inline constexpr const char* kChangeTag = "<CHG>";
inline constexpr const char* kAddTag = "<ADD>";
inline constexpr const char* kDelTag = "<DEL>";
inline constexpr const char* kHunkTag = "<HUNK>";
inline constexpr const char* kBeforeHeader = "[Before]:";
inline constexpr const char* kAfterHeader = "[After]:";
inline constexpr const char* kAddedHeader = "[ADDED LINES]:";
inline constexpr const char* kDeletedHeader = "[DELETED LINES]:";

struct EncodedInput {
  std::string sample_id;
  Encoding encoding = Encoding::AfterOnly;
  std::vector<std::string> tokens;
  bool truncated = false;
  int budget_used = 0;

  bool operator==(const EncodedInput&) const = default;
};

// -------------------------------------------------------------- internal ---

namespace detail {

// Tail truncation: keep the sequence head, drop the overflow.
inline EncodedInput finalize(std::string sample_id, Encoding encoding,
                             std::vector<std::string> tokens, int budget) {
  EncodedInput out;
  out.sample_id = std::move(sample_id);
  out.encoding = encoding;
  out.truncated = static_cast<int>(tokens.size()) > budget;
  if (out.truncated) tokens.resize(static_cast<size_t>(budget));
  out.tokens = std::move(tokens);
  out.budget_used = static_cast<int>(out.tokens.size());
  return out;
}

inline void extend(std::vector<std::string>& dst, std::vector<std::string> src) {
  for (std::string& t : src) dst.push_back(std::move(t));
}

}  // namespace detail

// ------------------------------------------------------------- encodings ---

// (1) The changed function body alone; no change indication.
inline EncodedInput encode_after_only(const DatasetSample& sample, const Tokenizer& tok) {
  return detail::finalize(sample.id, Encoding::AfterOnly, tok.tokenize(sample.function_after),
                          tok.budget());
}

// (2) The changed function body with a change tag leading every modified line.
inline EncodedInput encode_after_markers(const DatasetSample& sample, const Tokenizer& tok) {
  std::set<int> marked(sample.added_lines_local.begin(), sample.added_lines_local.end());
  std::vector<std::string> lines = split_lines(sample.function_after);
  std::vector<std::string> tokens;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (marked.count(static_cast<int>(i) + 1)) tokens.push_back(kChangeTag);
    detail::extend(tokens, tok.tokenize(lines[i]));
  }
  return detail::finalize(sample.id, Encoding::AfterMarkers, std::move(tokens), tok.budget());
}

// (3) Both snapshots under headers. The before side is hard-capped at half
// the post-header budget even when room remains (the fixed allocation keeps
// the after side from being crowded out); the after side fills whatever
// capacity is left, so it can exceed half when the before side is short.
inline EncodedInput encode_before_after(const DatasetSample& sample, const Tokenizer& tok) {
  std::vector<std::string> before = tok.tokenize(sample.function_before);
  std::vector<std::string> after = tok.tokenize(sample.function_after);
  int budget = tok.budget();
  int overhead = 2;
  size_t before_cap = budget > overhead ? static_cast<size_t>((budget - overhead) / 2) : 0;
  size_t before_keep = std::min(before.size(), before_cap);
  size_t rest = budget > overhead ? static_cast<size_t>(budget - overhead) - before_keep : 0;
  size_t after_keep = std::min(after.size(), rest);
  std::vector<std::string> tokens;
  tokens.push_back(kBeforeHeader);
  for (size_t i = 0; i < before_keep; ++i) tokens.push_back(std::move(before[i]));
  tokens.push_back(kAfterHeader);
  for (size_t i = 0; i < after_keep; ++i) tokens.push_back(std::move(after[i]));
  EncodedInput out = detail::finalize(sample.id, Encoding::BeforeAfter, std::move(tokens), budget);
  // The side caps shed tokens before finalize sees them, so the flag covers
  // any dropped token, not only a post-assembly overflow.
  out.truncated = before_keep < before.size() || after_keep < after.size();
  return out;
}

struct DiffLineView {
  enum class Polarity { add, del, ctx };
  Polarity polarity = Polarity::ctx;
  std::string text;
};

// Hunk-grouped diff rendering: each hunk carries up to context_lines of
// unchanged lines on both flanks, deletions (from the before text) ahead of
// additions (from the after text).
inline std::vector<std::vector<DiffLineView>> build_diff_view(const DatasetSample& sample,
                                                              int context_lines) {
  if (context_lines < 0) throw ConfigError("diff context must be non-negative");
  std::vector<std::string> before = split_lines(sample.function_before);
  std::vector<std::string> after = split_lines(sample.function_after);
  LineDiff diff = diff_lines(sample.function_before, sample.function_after);
  std::vector<std::vector<DiffLineView>> hunks;
  for (const Hunk& h : diff.hunks) {
    std::vector<DiffLineView> view;
    // Context comes from the after text; an empty after range anchors at the
    // line preceding the change, so the flanks shift by one around it.
    int first_after = h.after_range.count == 0 ? h.after_range.start + 1 : h.after_range.start;
    for (int ln = first_after - context_lines; ln < first_after; ++ln)
      if (ln >= 1 && ln <= static_cast<int>(after.size()))
        view.push_back({DiffLineView::Polarity::ctx, after[ln - 1]});
    for (int i = 0; i < h.before_range.count; ++i)
      view.push_back({DiffLineView::Polarity::del, before[h.before_range.start - 1 + i]});
    for (int i = 0; i < h.after_range.count; ++i)
      view.push_back({DiffLineView::Polarity::add, after[h.after_range.start - 1 + i]});
    int after_end = h.after_range.count == 0 ? h.after_range.start : h.after_range.start + h.after_range.count - 1;
    for (int ln = after_end + 1; ln <= after_end + context_lines; ++ln)
      if (ln >= 1 && ln <= static_cast<int>(after.size()))
        view.push_back({DiffLineView::Polarity::ctx, after[ln - 1]});
    hunks.push_back(std::move(view));
  }
  return hunks;
}

// (4) Only changed lines and local context, with polarity tags; hunks are
// separated by a dedicated token.
inline EncodedInput encode_diff_tags(const DatasetSample& sample, const Tokenizer& tok,
                                     int context_lines = 3) {
  std::vector<std::vector<DiffLineView>> hunks = build_diff_view(sample, context_lines);
  std::vector<std::string> tokens;
  for (size_t h = 0; h < hunks.size(); ++h) {
    if (h > 0) tokens.push_back(kHunkTag);
    for (const DiffLineView& line : hunks[h]) {
      if (line.polarity == DiffLineView::Polarity::del) tokens.push_back(kDelTag);
      if (line.polarity == DiffLineView::Polarity::add) tokens.push_back(kAddTag);
      detail::extend(tokens, tok.tokenize(line.text));
    }
  }
  return detail::finalize(sample.id, Encoding::DiffTags, std::move(tokens), tok.budget());
}

// (5) Added lines then deleted lines under fixed headers; no context and no
// commit message text.
inline EncodedInput encode_added_deleted(const DatasetSample& sample, const Tokenizer& tok) {
  std::vector<std::string> before = split_lines(sample.function_before);
  std::vector<std::string> after = split_lines(sample.function_after);
  std::vector<std::string> tokens;
  tokens.push_back(kAddedHeader);
  for (int ln : sample.added_lines_local)
    if (ln >= 1 && ln <= static_cast<int>(after.size()))
      detail::extend(tokens, tok.tokenize(after[ln - 1]));
  tokens.push_back(kDeletedHeader);
  for (int ln : sample.deleted_lines_local)
    if (ln >= 1 && ln <= static_cast<int>(before.size()))
      detail::extend(tokens, tok.tokenize(before[ln - 1]));
  return detail::finalize(sample.id, Encoding::AddedDeleted, std::move(tokens), tok.budget());
}

inline EncodedInput encode(const DatasetSample& sample, const Tokenizer& tok, Encoding encoding,
                           int context_lines = 3) {
  switch (encoding) {
    case Encoding::AfterOnly: return encode_after_only(sample, tok);
    case Encoding::AfterMarkers: return encode_after_markers(sample, tok);
    case Encoding::BeforeAfter: return encode_before_after(sample, tok);
    case Encoding::DiffTags: return encode_diff_tags(sample, tok, context_lines);
    case Encoding::AddedDeleted: return encode_added_deleted(sample, tok);
  }
  throw ConfigError("unknown encoding");
}

// ------------------------------------------------------------ length CDF ---

struct CdfPoint {
  int64_t token_count = 0;
  double cumulative_fraction = 0.0;

  bool operator==(const CdfPoint&) const = default;
};

// Cumulative distribution of tokenized function_after lengths, one point per
// distinct length, monotone and ending at 1.0.
inline std::vector<CdfPoint> length_cdf(const std::vector<DatasetSample>& samples,
                                        const Tokenizer& tok) {
  if (samples.empty()) throw DataError("length_cdf: empty corpus");
  std::vector<int64_t> counts;
  counts.reserve(samples.size());
  for (const DatasetSample& s : samples)
    counts.push_back(static_cast<int64_t>(tok.tokenize(s.function_after).size()));
  std::sort(counts.begin(), counts.end());
  std::vector<CdfPoint> cdf;
  size_t n = counts.size();
  for (size_t i = 0; i < n; ++i) {
    if (i + 1 < n && counts[i + 1] == counts[i]) continue;  // keep last index of each run
    cdf.push_back({counts[i], static_cast<double>(i + 1) / static_cast<double>(n)});
  }
  return cdf;
}

// Fraction of samples whose function_after exceeds the token limit.
inline double fraction_exceeding(const std::vector<CdfPoint>& cdf, int64_t limit) {
  double at_or_below = 0.0;
  for (const CdfPoint& p : cdf)
    if (p.token_count <= limit) at_or_below = p.cumulative_fraction;
  return 1.0 - at_or_below;
}

// ---------------------------------------------------------- serialization ---

inline constexpr const char* kEncodedSchema = "encoded-inputs";

inline Json encoded_to_json(const EncodedInput& e) {
  return Json{{"record", "encoded"},
              {"sample_id", e.sample_id},
              {"encoding", to_string(e.encoding)},
              {"tokens", e.tokens},
              {"truncated", e.truncated},
              {"budget_used", e.budget_used}};
}

inline EncodedInput encoded_from_json(const Json& j, const std::string& where) {
  for (const char* f : {"sample_id", "encoding", "tokens", "truncated", "budget_used"})
    require_field(j, f, where);
  EncodedInput e;
  try {
    e.sample_id = j.at("sample_id").get<std::string>();
    e.encoding = encoding_from_string(j.at("encoding").get<std::string>());
    e.tokens = j.at("tokens").get<std::vector<std::string>>();
    e.truncated = j.at("truncated").get<bool>();
    e.budget_used = j.at("budget_used").get<int>();
  } catch (const Json::exception& ex) {
    throw DataError(where + ": bad encoded record: " + ex.what());
  }
  return e;
}

}  // namespace revlab
