#pragma once

#include <optional>
#include <string>
#include <vector>

#include "revlab/clean_screener.hpp"
#include "revlab/extractor.hpp"
#include "revlab/jsonl.hpp"
#include "revlab/repo_miner.hpp"

namespace revlab {

enum class BundleKind { defective, clean };

inline const char* to_string(BundleKind k) {
  return k == BundleKind::defective ? "defective" : "clean";
}

inline BundleKind bundle_kind_from_string(const std::string& s) {
  if (s == "defective") return BundleKind::defective;
  if (s == "clean") return BundleKind::clean;
  throw DataError("unknown kind '" + s + "' (expected defective or clean)");
}

struct ScreenInfo {
  std::string status;  // pass | keyword-hit | never-modified
  std::vector<std::string> matched_keywords;
  int inspected = 0;
};

// The line-delimited candidate record shared by the mining, screening,
// triage, and corpus-building stages.
struct CandidateRecord {
  BundleKind kind = BundleKind::clean;
  std::string project;
  int64_t commit_time = 0;
  FunctionModification mod;  // carries commit_hash, file, name, texts, lines, message
  std::optional<RevertLink> link;  // defective only
  std::optional<ScreenInfo> screen;

  Json to_json() const {
    Json j{{"record", "candidate"},
           {"kind", to_string(kind)},
           {"project", project},
           {"commit_hash", mod.commit_hash},
           {"commit_time", commit_time},
           {"file", mod.file},
           {"function_name", mod.function_name},
           {"function_before", mod.function_before},
           {"function_after", mod.function_after},
           {"deleted_lines_local", mod.deleted_lines_local},
           {"added_lines_local", mod.added_lines_local},
           {"commit_message", mod.commit_message}};
    if (link) {
      j["revert_hash"] = link->revert_hash;
      j["revert_message"] = link->revert_message;
      j["revert_match_kind"] = to_string(link->match_kind);
    }
    if (screen) {
      j["screen_status"] = screen->status;
      j["screen_matched_keywords"] = screen->matched_keywords;
      j["screen_inspected"] = screen->inspected;
    }
    return j;
  }

  static CandidateRecord from_json(const Json& j, const std::string& where) {
    for (const char* f : {"kind", "project", "commit_hash", "commit_time", "file",
                          "function_name", "function_before", "function_after",
                          "deleted_lines_local", "added_lines_local", "commit_message"})
      require_field(j, f, where);
    CandidateRecord rec;
    rec.kind = bundle_kind_from_string(j.at("kind").get<std::string>());
    rec.project = j.at("project").get<std::string>();
    rec.commit_time = j.at("commit_time").get<int64_t>();
    rec.mod.commit_hash = j.at("commit_hash").get<std::string>();
    rec.mod.file = j.at("file").get<std::string>();
    rec.mod.function_name = j.at("function_name").get<std::string>();
    rec.mod.function_before = j.at("function_before").get<std::string>();
    rec.mod.function_after = j.at("function_after").get<std::string>();
    rec.mod.deleted_lines_local = j.at("deleted_lines_local").get<std::vector<int>>();
    rec.mod.added_lines_local = j.at("added_lines_local").get<std::vector<int>>();
    rec.mod.commit_message = j.at("commit_message").get<std::string>();
    if (rec.kind == BundleKind::defective) {
      for (const char* f : {"revert_hash", "revert_message", "revert_match_kind"})
        require_field(j, f, where + " (defective candidate)");
      RevertLink link;
      link.revert_hash = j.at("revert_hash").get<std::string>();
      link.target_hash = rec.mod.commit_hash;
      link.revert_message = j.at("revert_message").get<std::string>();
      std::string mk = j.at("revert_match_kind").get<std::string>();
      if (mk == "full-hash")
        link.match_kind = MatchKind::full_hash;
      else if (mk == "abbreviated-hash")
        link.match_kind = MatchKind::abbreviated_hash;
      else
        throw DataError(where + ": unknown revert_match_kind '" + mk + "'");
      rec.link = std::move(link);
    }
    if (j.contains("screen_status")) {
      ScreenInfo info;
      info.status = j.at("screen_status").get<std::string>();
      if (j.contains("screen_matched_keywords"))
        info.matched_keywords = j.at("screen_matched_keywords").get<std::vector<std::string>>();
      info.inspected = j.value("screen_inspected", 0);
      rec.screen = std::move(info);
    }
    return rec;
  }
};

inline CandidateRecord make_candidate_record(BundleKind kind, const CandidateRef& cand,
                                             const std::optional<RevertLink>& link) {
  CandidateRecord rec;
  rec.kind = kind;
  rec.project = cand.meta.repo_id;
  rec.commit_time = cand.meta.commit_time;
  rec.mod = cand.mod;
  rec.link = link;
  return rec;
}

}  // namespace revlab
