#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "revlab/errors.hpp"
#include "revlab/function_parser.hpp"
#include "revlab/git.hpp"
#include "revlab/line_diff.hpp"
#include "revlab/repo_miner.hpp"
#include "revlab/text.hpp"

namespace revlab {

struct ScreenConfig {
  int lookahead_commits = 5;
  std::vector<std::string> problematic_keywords = {"revert", "rollback", "fix bug", "regression"};
  int period_window_days = 90;
  bool require_later_modification = true;

  void validate() const {
    if (lookahead_commits < 1)
      throw ConfigError("screen: lookahead_commits must be >= 1, got " +
                        std::to_string(lookahead_commits));
    if (problematic_keywords.empty())
      throw ConfigError("screen: problematic_keywords must be non-empty");
    if (period_window_days < 0)
      throw ConfigError("screen: period_window_days must be >= 0");
  }
};

enum class ScreenStatus { pass, keyword_hit, never_modified };

inline const char* to_string(ScreenStatus s) {
  switch (s) {
    case ScreenStatus::pass: return "pass";
    case ScreenStatus::keyword_hit: return "keyword-hit";
    case ScreenStatus::never_modified: return "never-modified";
  }
  return "?";
}

struct ScreenOutcome {
  ScreenStatus status = ScreenStatus::pass;
  std::vector<std::string> matched_keywords;
  int inspected = 0;  // later commits that touched the function
};

namespace detail {

inline const FunctionSpan* find_span_by_name(const std::vector<FunctionSpan>& spans,
                                             const std::string& name) {
  for (const FunctionSpan& s : spans)
    if (s.name == name) return &s;
  return nullptr;
}

inline bool lines_intersect_span(const std::vector<int>& lines, const FunctionSpan& span) {
  for (int line : lines)
    if (span.start_line <= line && line <= span.end_line) return true;
  return false;
}

}  // namespace detail

// Walks commits after the candidate, re-parsing the file at each revision
// that names it, and inspects up to cfg.lookahead_commits commits whose diff
// intersects the tracked function's span. Keyword in any such message fails
// the candidate; zero touches fails it when later modification is required.
// If the function disappears by name, tracking stops.
inline ScreenOutcome history_screen(const GitRepo& repo, const std::vector<CommitMeta>& timeline,
                                    const CandidateRef& candidate, const ScreenConfig& cfg) {
  cfg.validate();
  ScreenOutcome outcome;
  size_t start = timeline.size();
  for (size_t i = 0; i < timeline.size(); ++i) {
    if (timeline[i].hash == candidate.meta.hash) {
      start = i + 1;
      break;
    }
  }
  const std::string& file = candidate.mod.file;
  const std::string& name = candidate.mod.function_name;

  for (size_t i = start; i < timeline.size() && outcome.inspected < cfg.lookahead_commits; ++i) {
    const CommitMeta& commit = timeline[i];
    bool touches_file = false;
    for (const std::string& f : commit.touched_files)
      if (f == file) touches_file = true;
    if (!touches_file) continue;
    if (commit.parent_hashes.size() != 1) continue;

    std::string before_text;
    std::string after_text;
    if (auto b = repo.read_file(commit.parent_hashes[0], file)) before_text = sanitize_utf8(*b).text;
    if (auto a = repo.read_file(commit.hash, file)) after_text = sanitize_utf8(*a).text;
    ParseResult before_parse = parse_functions(before_text);
    ParseResult after_parse = parse_functions(after_text);
    const FunctionSpan* before_span = detail::find_span_by_name(before_parse.spans, name);
    const FunctionSpan* after_span = detail::find_span_by_name(after_parse.spans, name);
    if (before_span == nullptr && after_span == nullptr) break;  // renamed or deleted: stop tracking

    LineDiff diff = diff_lines(before_text, after_text);
    bool touched = (before_span != nullptr &&
                    detail::lines_intersect_span(diff.deleted_lines, *before_span)) ||
                   (after_span != nullptr &&
                    detail::lines_intersect_span(diff.added_lines, *after_span));
    if (!touched) continue;

    outcome.inspected += 1;
    std::vector<std::string> hits;
    for (const std::string& kw : cfg.problematic_keywords)
      if (contains_ci(commit.message, kw)) hits.push_back(kw);
    if (!hits.empty()) {
      outcome.status = ScreenStatus::keyword_hit;
      outcome.matched_keywords = std::move(hits);
      return outcome;
    }
  }

  if (outcome.inspected == 0 && cfg.require_later_modification) {
    outcome.status = ScreenStatus::never_modified;
    return outcome;
  }
  outcome.status = ScreenStatus::pass;
  return outcome;
}

// Clean-pool membership: a single-function candidate within the period
// window of some defective timestamp that is neither a revert commit by
// message nor the target of a resolved revert link.
inline std::vector<CandidateRef> select_clean_pool(const MiningResult& mined,
                                                   const std::vector<int64_t>& defective_times,
                                                   const ScreenConfig& cfg) {
  cfg.validate();
  std::vector<CandidateRef> pool;
  if (defective_times.empty()) return pool;
  std::set<std::string> revert_targets;
  for (const RevertLink& link : mined.links) revert_targets.insert(link.target_hash);
  int64_t window = static_cast<int64_t>(cfg.period_window_days) * 86400;
  for (const CandidateRef& cand : mined.candidates) {
    bool in_window = false;
    for (int64_t t : defective_times) {
      int64_t d = cand.meta.commit_time - t;
      if (d < 0) d = -d;
      if (d <= window) {
        in_window = true;
        break;
      }
    }
    if (!in_window) continue;
    if (contains_ci(cand.meta.message, "revert")) continue;
    if (revert_targets.count(cand.meta.hash)) continue;
    pool.push_back(cand);
  }
  return pool;
}

// Spec-shaped convenience: mine the repository and select the pool.
inline std::vector<CandidateRef> sample_clean_pool(const std::filesystem::path& repo_path,
                                                   const std::vector<int64_t>& defective_times,
                                                   const ScreenConfig& cfg,
                                                   const MineConfig& mine_cfg = {}) {
  GitRepo repo(repo_path);
  MiningResult mined = mine_repository(repo, mine_cfg);
  return select_clean_pool(mined, defective_times, cfg);
}

}  // namespace revlab
