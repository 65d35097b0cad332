#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "revlab/extractor.hpp"
#include "revlab/git.hpp"
#include "revlab/line_diff.hpp"
#include "revlab/text.hpp"

namespace revlab {

enum class MatchKind { full_hash, abbreviated_hash };

inline const char* to_string(MatchKind k) {
  return k == MatchKind::full_hash ? "full-hash" : "abbreviated-hash";
}

struct RevertLink {
  std::string revert_hash;
  std::string target_hash;
  std::string revert_message;
  MatchKind match_kind = MatchKind::full_hash;
};

struct RevertScan {
  std::vector<RevertLink> links;
  int64_t ambiguous = 0;   // reverts whose only hex runs matched >= 2 earlier commits
  int64_t unresolved = 0;  // reverts with hex runs matching no earlier commit
};

struct MineConfig {
  std::set<std::string> extensions = {".c", ".h", ".cc", ".cpp", ".cxx", ".hpp", ".hh"};
  size_t max_file_bytes = 1024 * 1024;
  std::optional<int64_t> since;
};

enum class RejectReason {
  multi_file,
  extension,
  file_added,
  file_deleted,
  corrupt_object,
  file_too_large,
  binary_file,
  parse_error,
  no_change,
  outside_function,
  multi_function,
  name_mismatch,
};

inline const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::multi_file: return "multi-file";
    case RejectReason::extension: return "extension";
    case RejectReason::file_added: return "file-added";
    case RejectReason::file_deleted: return "file-deleted";
    case RejectReason::corrupt_object: return "corrupt-object";
    case RejectReason::file_too_large: return "file-too-large";
    case RejectReason::binary_file: return "binary-file";
    case RejectReason::parse_error: return "parse-error";
    case RejectReason::no_change: return "no-change";
    case RejectReason::outside_function: return "outside-function";
    case RejectReason::multi_function: return "multi-function";
    case RejectReason::name_mismatch: return "name-mismatch";
  }
  return "?";
}

struct CandidateRef {
  CommitMeta meta;
  FunctionModification mod;
  int utf8_replaced = 0;  // invalid byte sequences replaced across both sides
};

struct DefectiveCandidate {
  RevertLink link;
  CandidateRef target;
};

struct MineStats {
  int64_t scanned_commits = 0;        // non-merge commits in the stream
  int64_t single_parent_commits = 0;  // excludes roots; partition denominator
  int64_t candidates = 0;
  std::map<std::string, int64_t> rejections;
  int64_t revert_links = 0;  // de-duplicated resolved links
  int64_t revert_ambiguous = 0;
  int64_t revert_unresolved = 0;
  int64_t defective_candidates = 0;
};

namespace detail {

inline bool is_hex_char(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

// Maximal hex runs of length >= 7 in message order.
inline std::vector<std::string> hex_runs(std::string_view message, size_t min_len = 7) {
  std::vector<std::string> runs;
  size_t i = 0;
  while (i < message.size()) {
    if (!is_hex_char(message[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < message.size() && is_hex_char(message[j])) ++j;
    if (j - i >= min_len) runs.push_back(to_lower(message.substr(i, j - i)));
    i = j;
  }
  return runs;
}

}  // namespace detail

// A revert is a commit whose message contains "revert" (case-insensitive)
// and cites, by full hash or unique prefix of >= 7 hex chars, exactly one
// strictly earlier commit in the stream. Hex runs are tried left to right;
// the first uniquely resolving run wins and yields a single link.
inline RevertScan detect_reverts(const std::vector<CommitMeta>& commits) {
  RevertScan scan;
  std::unordered_map<std::string, size_t> by_hash;
  for (size_t i = 0; i < commits.size(); ++i) by_hash.emplace(commits[i].hash, i);

  std::vector<std::string> sorted_hashes;
  sorted_hashes.reserve(commits.size());
  for (const CommitMeta& c : commits) sorted_hashes.push_back(c.hash);
  std::sort(sorted_hashes.begin(), sorted_hashes.end());

  auto prefix_matches = [&](const std::string& prefix) {
    std::vector<std::string> out;
    auto it = std::lower_bound(sorted_hashes.begin(), sorted_hashes.end(), prefix);
    while (it != sorted_hashes.end() && it->compare(0, prefix.size(), prefix) == 0) {
      out.push_back(*it);
      ++it;
    }
    return out;
  };

  for (const CommitMeta& commit : commits) {
    if (!contains_ci(commit.message, "revert")) continue;
    std::vector<std::string> runs = detail::hex_runs(commit.message);
    if (runs.empty()) continue;
    bool linked = false;
    bool any_ambiguous = false;
    for (const std::string& run : runs) {
      std::vector<std::string> matches;
      if (run.size() >= 40) {
        std::string full = run.substr(0, 40);
        if (run.size() == 40 && by_hash.count(full)) matches.push_back(full);
      } else {
        matches = prefix_matches(run);
      }
      // Only strictly earlier commits can be targets.
      std::vector<std::string> earlier;
      for (const std::string& h : matches) {
        const CommitMeta& t = commits[by_hash.at(h)];
        if (t.hash != commit.hash && t.commit_time < commit.commit_time) earlier.push_back(h);
      }
      if (earlier.size() == 1) {
        RevertLink link;
        link.revert_hash = commit.hash;
        link.target_hash = earlier[0];
        link.revert_message = commit.message;
        link.match_kind = run.size() == 40 ? MatchKind::full_hash : MatchKind::abbreviated_hash;
        scan.links.push_back(std::move(link));
        linked = true;
        break;
      }
      if (earlier.size() >= 2) any_ambiguous = true;
    }
    if (!linked) {
      if (any_ambiguous)
        scan.ambiguous += 1;
      else
        scan.unresolved += 1;
    }
  }
  return scan;
}

// One label per target: when several reverts cite the same commit, the
// earliest revert (commit_time, then hash) is kept.
inline std::vector<RevertLink> dedup_links_by_target(const std::vector<RevertLink>& links,
                                                     const std::vector<CommitMeta>& commits) {
  std::unordered_map<std::string, int64_t> times;
  for (const CommitMeta& c : commits) times.emplace(c.hash, c.commit_time);
  std::map<std::string, RevertLink> best;
  for (const RevertLink& link : links) {
    auto it = best.find(link.target_hash);
    if (it == best.end()) {
      best.emplace(link.target_hash, link);
      continue;
    }
    int64_t t_new = times.count(link.revert_hash) ? times.at(link.revert_hash) : 0;
    int64_t t_old = times.count(it->second.revert_hash) ? times.at(it->second.revert_hash) : 0;
    if (t_new < t_old || (t_new == t_old && link.revert_hash < it->second.revert_hash))
      it->second = link;
  }
  std::vector<RevertLink> out;
  for (auto& [target, link] : best) out.push_back(std::move(link));
  std::sort(out.begin(), out.end(), [&](const RevertLink& a, const RevertLink& b) {
    int64_t ta = times.count(a.target_hash) ? times.at(a.target_hash) : 0;
    int64_t tb = times.count(b.target_hash) ? times.at(b.target_hash) : 0;
    if (ta != tb) return ta < tb;
    return a.target_hash < b.target_hash;
  });
  return out;
}

inline std::string file_extension_lower(const std::string& path) {
  size_t slash = path.find_last_of('/');
  size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return "";
  return to_lower(std::string_view(path).substr(dot));
}

// Single-file single-function gate. On success the candidate's modification
// carries commit hash/message and sanitized texts.
inline std::optional<CandidateRef> filter_single_function(const GitRepo& repo,
                                                          const CommitMeta& commit,
                                                          const MineConfig& cfg,
                                                          RejectReason* reason) {
  auto reject = [&](RejectReason r) -> std::optional<CandidateRef> {
    if (reason) *reason = r;
    return std::nullopt;
  };
  if (commit.touched_files.empty()) return reject(RejectReason::no_change);
  if (commit.touched_files.size() != 1) return reject(RejectReason::multi_file);
  const std::string& file = commit.touched_files[0];
  char status = commit.file_statuses.empty() ? 'M' : commit.file_statuses[0];
  if (!cfg.extensions.count(file_extension_lower(file))) return reject(RejectReason::extension);
  if (status == 'A') return reject(RejectReason::file_added);
  if (status == 'D') return reject(RejectReason::file_deleted);
  if (commit.parent_hashes.size() != 1) return reject(RejectReason::corrupt_object);

  std::optional<std::string> before = repo.read_file(commit.parent_hashes[0], file);
  std::optional<std::string> after = repo.read_file(commit.hash, file);
  if (!before || !after) return reject(RejectReason::corrupt_object);
  if (before->size() > cfg.max_file_bytes || after->size() > cfg.max_file_bytes)
    return reject(RejectReason::file_too_large);
  if (before->find('\0') != std::string::npos || after->find('\0') != std::string::npos)
    return reject(RejectReason::binary_file);

  SanitizedText sb = sanitize_utf8(*before);
  SanitizedText sa = sanitize_utf8(*after);
  LineDiff diff = diff_lines(sb.text, sa.text);
  LocalizeResult loc = localize_change(sb.text, sa.text, diff);
  switch (loc.status) {
    case LocalizeStatus::ok: break;
    case LocalizeStatus::no_change: return reject(RejectReason::no_change);
    case LocalizeStatus::parse_error: return reject(RejectReason::parse_error);
    case LocalizeStatus::outside_function: return reject(RejectReason::outside_function);
    case LocalizeStatus::multi_function: return reject(RejectReason::multi_function);
    case LocalizeStatus::name_mismatch: return reject(RejectReason::name_mismatch);
  }
  CandidateRef cand;
  cand.meta = commit;
  cand.mod = std::move(loc.mod);
  cand.mod.commit_hash = commit.hash;
  cand.mod.file = file;
  cand.mod.commit_message = commit.message;
  cand.utf8_replaced = sb.replaced + sa.replaced;
  return cand;
}

struct MiningResult {
  std::vector<CommitMeta> commits;        // scanned stream (non-merge, time order)
  std::vector<CandidateRef> candidates;   // all single-function candidates, stream order
  std::vector<RevertLink> links;          // de-duplicated
  std::vector<DefectiveCandidate> defective;
  MineStats stats;
};

inline MiningResult mine_repository(const GitRepo& repo, const MineConfig& cfg) {
  MiningResult result;
  result.commits = scan_commits(repo, cfg.since);
  result.stats.scanned_commits = static_cast<int64_t>(result.commits.size());

  RevertScan scan = detect_reverts(result.commits);
  result.stats.revert_ambiguous = scan.ambiguous;
  result.stats.revert_unresolved = scan.unresolved;
  result.links = dedup_links_by_target(scan.links, result.commits);
  result.stats.revert_links = static_cast<int64_t>(result.links.size());

  std::unordered_map<std::string, size_t> candidate_by_hash;
  for (const CommitMeta& commit : result.commits) {
    if (commit.parent_hashes.size() != 1) continue;  // roots are not candidates
    result.stats.single_parent_commits += 1;
    RejectReason reason = RejectReason::no_change;
    std::optional<CandidateRef> cand = filter_single_function(repo, commit, cfg, &reason);
    if (cand) {
      candidate_by_hash.emplace(commit.hash, result.candidates.size());
      result.candidates.push_back(std::move(*cand));
      result.stats.candidates += 1;
    } else {
      result.stats.rejections[to_string(reason)] += 1;
    }
  }

  for (const RevertLink& link : result.links) {
    auto it = candidate_by_hash.find(link.target_hash);
    if (it == candidate_by_hash.end()) continue;
    DefectiveCandidate dc;
    dc.link = link;
    dc.target = result.candidates[it->second];
    result.defective.push_back(std::move(dc));
  }
  // links are already sorted by target commit_time, so defective is too.
  result.stats.defective_candidates = static_cast<int64_t>(result.defective.size());
  return result;
}

}  // namespace revlab
