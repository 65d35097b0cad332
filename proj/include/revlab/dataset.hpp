#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "revlab/errors.hpp"
#include "revlab/jsonl.hpp"
#include "revlab/triage.hpp"

namespace revlab {

// ----------------------------------------------------------------- types ---

enum class Label { defective, clean };

inline const char* to_string(Label l) { return l == Label::defective ? "defective" : "clean"; }

inline Label label_from_string(const std::string& s) {
  if (s == "defective") return Label::defective;
  if (s == "clean") return Label::clean;
  throw DataError("unknown label '" + s + "'");
}

inline Label label_from_transition(Transition t) {
  return (t == Transition::DtoD || t == Transition::CtoD) ? Label::defective : Label::clean;
}

enum class Split { train, valid, test };

inline const char* to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
  }
  return "?";
}

inline Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "valid") return Split::valid;
  if (s == "test") return Split::test;
  throw DataError("unknown split '" + s + "'");
}

struct DatasetSample {
  std::string id;
  std::string project;
  std::string commit_hash;
  Label label = Label::clean;
  Transition transition = Transition::CtoC;
  std::string function_before;
  std::string function_after;
  std::vector<int> deleted_lines_local;
  std::vector<int> added_lines_local;
  std::string commit_message;
  std::optional<std::string> revert_commit_message;
  int64_t commit_time = 0;
  Split split = Split::train;

  bool operator==(const DatasetSample&) const = default;
};

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;

  void validate() const {
    if (train < 0 || valid < 0 || test < 0)
      throw ConfigError("split ratios must be non-negative");
    double sum = train + valid + test;
    if (sum < 1.0 - 1e-9 || sum > 1.0 + 1e-9)
      throw ConfigError("split ratios must sum to 1");
  }
};

struct StratumCounts {
  std::string project;
  Label label = Label::clean;
  int64_t train = 0;
  int64_t valid = 0;
  int64_t test = 0;
};

// Exact class-weight ratio; numerator/denominator stay integral so
// weight * n_pos == n_neg holds without floating error.
struct ClassWeight {
  int64_t n_neg = 0;  // numerator
  int64_t n_pos = 0;  // denominator

  // Nearest 6-decimal rendering computed in integer arithmetic.
  std::string render() const {
    if (n_pos == 0) throw DataError("class weight undefined: corpus has no defective samples");
    int64_t scaled = n_neg * 1000000;
    int64_t whole = scaled / n_pos;
    int64_t rem = scaled % n_pos;
    if (2 * rem >= n_pos) ++whole;
    std::string frac = std::to_string(whole % 1000000);
    frac.insert(frac.begin(), 6 - frac.size(), '0');
    return std::to_string(whole / 1000000) + "." + frac;
  }

  double value() const { return static_cast<double>(n_neg) / static_cast<double>(n_pos); }
};

struct SplitSummary {
  std::vector<StratumCounts> strata;  // sorted by (project, label name)
  int64_t train = 0;
  int64_t valid = 0;
  int64_t test = 0;
  ClassWeight class_weight;
  std::vector<std::string> warnings;  // strata too small to split

  Json to_json() const {
    Json strata_json = Json::array();
    for (const StratumCounts& s : strata)
      strata_json.push_back(Json{{"project", s.project},
                                 {"label", to_string(s.label)},
                                 {"train", s.train},
                                 {"valid", s.valid},
                                 {"test", s.test}});
    return Json{{"record", "split-summary"},
                {"strata", strata_json},
                {"train", train},
                {"valid", valid},
                {"test", test},
                {"n_neg", class_weight.n_neg},
                {"n_pos", class_weight.n_pos},
                {"class_weight", class_weight.n_pos > 0 ? Json(class_weight.render()) : Json(nullptr)},
                {"warnings", warnings}};
  }
};

// -------------------------------------------------------------- assemble ---

// One sample per kept verdict, in input order. Discarded verdicts drop out;
// join failures (duplicate candidate ids, a defective verdict with no revert
// link behind it) are hard errors rather than silent skips.
inline std::vector<DatasetSample> assemble(const std::vector<VerdictRecord>& verdicts) {
  std::vector<DatasetSample> samples;
  std::set<std::string> seen;
  for (const VerdictRecord& rec : verdicts) {
    if (!seen.insert(rec.verdict.candidate_id).second)
      throw DataError("duplicate-candidate: verdict ledger repeats candidate " +
                      rec.verdict.candidate_id);
    if (!rec.verdict.keep) continue;
    if (!rec.verdict.transition)
      throw DataError("dangling-verdict: kept candidate " + rec.verdict.candidate_id +
                      " carries no transition");
    if (rec.kind == BundleKind::defective && !rec.candidate.link)
      throw DataError("dangling-verdict: defective candidate " + rec.verdict.candidate_id +
                      " has no revert link");
    DatasetSample s;
    s.id = rec.verdict.candidate_id;
    s.project = rec.candidate.project;
    s.commit_hash = rec.candidate.mod.commit_hash;
    s.transition = *rec.verdict.transition;
    s.label = label_from_transition(s.transition);
    s.function_before = rec.candidate.mod.function_before;
    s.function_after = rec.candidate.mod.function_after;
    s.deleted_lines_local = rec.candidate.mod.deleted_lines_local;
    s.added_lines_local = rec.candidate.mod.added_lines_local;
    s.commit_message = rec.candidate.mod.commit_message;
    if (rec.kind == BundleKind::defective)
      s.revert_commit_message = rec.candidate.link->revert_message;
    s.commit_time = rec.candidate.commit_time;
    samples.push_back(std::move(s));
  }
  return samples;
}

// ---------------------------------------------------------------- weight ---

inline ClassWeight class_weight(const std::vector<DatasetSample>& samples) {
  ClassWeight w;
  for (const DatasetSample& s : samples)
    (s.label == Label::defective ? w.n_pos : w.n_neg) += 1;
  if (w.n_pos == 0) throw DataError("class_weight: corpus has no defective samples");
  return w;
}

// ----------------------------------------------------------------- split ---

// Stratified temporal split: within each (project, label) stratum, samples
// sorted by (commit_time, commit_hash) are cut earliest-to-train. Counts per
// stratum of size n >= 3: valid = floor(n*r_valid) promoted to 1 when the
// floor is 0, test = floor(n*r_test) unpromoted, train = remainder. Strata
// of size 1-2 go wholly to train with a warning. Output order: strata sorted
// by (project, label name), concatenated, each internally time-ordered.
inline SplitSummary temporal_split(std::vector<DatasetSample>& samples,
                                   const SplitRatios& ratios = SplitRatios{}) {
  ratios.validate();
  std::map<std::pair<std::string, std::string>, std::vector<DatasetSample>> strata;
  for (DatasetSample& s : samples)
    strata[{s.project, to_string(s.label)}].push_back(std::move(s));

  SplitSummary summary;
  std::vector<DatasetSample> ordered;
  ordered.reserve(samples.size());
  for (auto& [key, group] : strata) {
    std::sort(group.begin(), group.end(), [](const DatasetSample& a, const DatasetSample& b) {
      if (a.commit_time != b.commit_time) return a.commit_time < b.commit_time;
      return a.commit_hash < b.commit_hash;
    });
    int64_t n = static_cast<int64_t>(group.size());
    int64_t n_valid = 0, n_test = 0;
    if (n < 3) {
      summary.warnings.push_back("stratum (" + key.first + ", " + key.second + ") has only " +
                                 std::to_string(n) + " sample(s); assigned wholly to train");
    } else {
      n_valid = static_cast<int64_t>(static_cast<double>(n) * ratios.valid);
      if (n_valid == 0) n_valid = 1;
      n_test = static_cast<int64_t>(static_cast<double>(n) * ratios.test);
    }
    int64_t n_train = n - n_valid - n_test;
    StratumCounts counts;
    counts.project = key.first;
    counts.label = label_from_string(key.second);
    counts.train = n_train;
    counts.valid = n_valid;
    counts.test = n_test;
    summary.strata.push_back(counts);
    summary.train += n_train;
    summary.valid += n_valid;
    summary.test += n_test;
    for (int64_t i = 0; i < n; ++i) {
      group[i].split = i < n_train ? Split::train : (i < n_train + n_valid ? Split::valid : Split::test);
      ordered.push_back(std::move(group[i]));
    }
  }
  samples = std::move(ordered);
  // Raw class counts always; the ratio itself is only meaningful with at
  // least one positive, which class_weight() enforces for callers that
  // need the rendered weight.
  for (const DatasetSample& s : samples)
    (s.label == Label::defective ? summary.class_weight.n_pos : summary.class_weight.n_neg) += 1;
  return summary;
}

// --------------------------------------------------------------- corpus ---

inline Json sample_to_json(const DatasetSample& s) {
  Json j{{"id", s.id},
         {"project", s.project},
         {"commit_hash", s.commit_hash},
         {"label", to_string(s.label)},
         {"transition", to_string(s.transition)},
         {"function_before", s.function_before},
         {"function_after", s.function_after},
         {"deleted_lines_local", s.deleted_lines_local},
         {"added_lines_local", s.added_lines_local},
         {"commit_message", s.commit_message},
         {"commit_time", s.commit_time},
         {"split", to_string(s.split)}};
  if (s.revert_commit_message) j["revert_commit_message"] = *s.revert_commit_message;
  return j;
}

inline DatasetSample sample_from_json(const Json& j, const std::string& where) {
  for (const char* f : {"id", "project", "commit_hash", "label", "transition", "function_before",
                        "function_after", "deleted_lines_local", "added_lines_local",
                        "commit_message", "commit_time", "split"})
    if (!j.contains(f)) throw DataError("schema mismatch at " + where + ": missing field '" + f + "'");
  DatasetSample s;
  try {
    s.id = j.at("id").get<std::string>();
    s.project = j.at("project").get<std::string>();
    s.commit_hash = j.at("commit_hash").get<std::string>();
    s.label = label_from_string(j.at("label").get<std::string>());
    s.transition = transition_from_string(j.at("transition").get<std::string>());
    s.function_before = j.at("function_before").get<std::string>();
    s.function_after = j.at("function_after").get<std::string>();
    s.deleted_lines_local = j.at("deleted_lines_local").get<std::vector<int>>();
    s.added_lines_local = j.at("added_lines_local").get<std::vector<int>>();
    s.commit_message = j.at("commit_message").get<std::string>();
    if (j.contains("revert_commit_message") && !j.at("revert_commit_message").is_null())
      s.revert_commit_message = j.at("revert_commit_message").get<std::string>();
    s.commit_time = j.at("commit_time").get<int64_t>();
    s.split = split_from_string(j.at("split").get<std::string>());
  } catch (const Json::exception& e) {
    throw DataError("schema mismatch at " + where + ": " + e.what());
  }
  if (s.label != label_from_transition(s.transition))
    throw DataError("schema mismatch at " + where + ": label '" + to_string(s.label) +
                    "' contradicts transition '" + to_string(s.transition) + "'");
  return s;
}

inline constexpr const char* kCorpusSchema = "corpus";

struct LoadedCorpus {
  std::optional<ProvenanceHeader> header;
  std::vector<DatasetSample> samples;
};

inline void serialize_corpus(const std::vector<DatasetSample>& samples,
                             const std::filesystem::path& path, ProvenanceHeader header) {
  header.schema = kCorpusSchema;
  std::vector<Json> records;
  records.reserve(samples.size());
  for (const DatasetSample& s : samples) records.push_back(sample_to_json(s));
  write_jsonl(path, header, records);
}

inline LoadedCorpus load_corpus(const std::filesystem::path& path) {
  JsonlFile file = read_jsonl(path);
  if (file.header && file.header->schema != kCorpusSchema)
    throw DataError("schema mismatch at " + path.string() + ":1: header schema '" +
                    file.header->schema + "', expected '" + kCorpusSchema + "'");
  LoadedCorpus corpus;
  corpus.header = file.header;
  for (size_t i = 0; i < file.records.size(); ++i) {
    std::string where = path.string() + ":" + std::to_string(file.line_numbers[i]);
    corpus.samples.push_back(sample_from_json(file.records[i], where));
  }
  return corpus;
}

// Ids must be unique across a corpus; duplicated ids break downstream joins.
inline void check_unique_ids(const std::vector<DatasetSample>& samples) {
  std::set<std::string> ids;
  for (const DatasetSample& s : samples)
    if (!ids.insert(s.id).second) throw DataError("duplicate sample id '" + s.id + "'");
}

}  // namespace revlab
