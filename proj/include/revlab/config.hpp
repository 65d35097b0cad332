#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "revlab/clean_screener.hpp"
#include "revlab/dataset.hpp"
#include "revlab/encoder.hpp"
#include "revlab/errors.hpp"
#include "revlab/hash.hpp"
#include "revlab/jsonl.hpp"
#include "revlab/perturber.hpp"
#include "revlab/repo_miner.hpp"
#include "revlab/tokenizer.hpp"
#include "revlab/triage.hpp"

namespace revlab {

// Encoding-stage settings shared by the encode and length-distribution
// commands.
struct EncodeSettings {
  std::vector<Encoding> encodings = all_encodings();
  int context_lines = 3;

  void validate() const {
    if (encodings.empty()) throw ConfigError("encode: encodings list must be non-empty");
    if (context_lines < 0) throw ConfigError("encode: context_lines must be >= 0");
  }
};

// Perturbation-stage settings (the per-run seed comes from the global seed).
// Every listed kind is applied in one pass, so a single run produces all the
// counterfactual variants side by side.
struct PerturbSettings {
  std::vector<Perturbation> kinds = {Perturbation::SpuriousMarkers, Perturbation::SwappedSnapshots,
                                     Perturbation::ReversedDiffTags, Perturbation::SwappedBlocks};
  Phase phase = Phase::test;
  double probability = 0.5;

  void validate(uint64_t seed) const {
    if (kinds.empty()) throw ConfigError("perturb: kinds list must be non-empty");
    for (Perturbation kind : kinds) PerturbationConfig{kind, probability, phase, seed}.validate();
  }
};

// Analysis-stage settings.
struct AnalyzeSettings {
  std::string metric = "f1";
  double threshold = 0.5;
  int resamples = 10000;
  bool greenhouse_geisser = false;

  void validate() const {
    static const std::set<std::string> kMetrics = {"accuracy", "precision", "recall", "f1",
                                                   "pr-auc"};
    if (!kMetrics.count(metric)) throw ConfigError("analyze: unknown metric '" + metric + "'");
    if (resamples < 1) throw ConfigError("analyze: resamples must be >= 1");
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
      throw ConfigError("analyze: threshold must be within [0, 1]");
    }
  }
};

// The one structured configuration shared by every subcommand. It is designed
// to be committed next to the artifacts it produced: credentials never appear
// in it (the triage section names an environment variable instead), so the
// canonical hash of this structure identifies a run completely.
struct PipelineConfig {
  std::filesystem::path output_dir = "out";
  uint64_t seed = 42;
  std::vector<std::string> repos;
  MineConfig mine;
  ScreenConfig screen;
  TriageClientConfig triage;
  SplitRatios split;
  TokenizerSpec tokenizer;
  EncodeSettings encode;
  PerturbSettings perturb;
  AnalyzeSettings analyze;

  void validate() const {
    screen.validate();
    triage.validate();
    split.validate();
    tokenizer.validate();
    encode.validate();
    analyze.validate();
    perturb.validate(seed);
  }

  // Canonical JSON with every field materialized (defaults included), so the
  // hash is stable regardless of which keys the file spelled out.
  Json to_json() const {
    Json mine_j{{"extensions", std::vector<std::string>(mine.extensions.begin(),
                                                        mine.extensions.end())},
                {"max_file_bytes", mine.max_file_bytes},
                {"since", mine.since ? Json(*mine.since) : Json(nullptr)}};
    Json screen_j{{"lookahead_commits", screen.lookahead_commits},
                  {"problematic_keywords", screen.problematic_keywords},
                  {"period_window_days", screen.period_window_days},
                  {"require_later_modification", screen.require_later_modification}};
    Json triage_j{{"endpoint_url", triage.endpoint_url},
                  {"model", triage.model},
                  {"api_key_env", triage.api_key_env},
                  {"temperature", triage.temperature ? Json(*triage.temperature) : Json(nullptr)},
                  {"max_retries", triage.max_retries},
                  {"backoff_initial_ms", triage.backoff_initial_ms},
                  {"reask_limit", triage.reask_limit},
                  {"concurrency", triage.concurrency},
                  {"requests_per_second", triage.requests_per_second},
                  {"timeout_sec", triage.timeout_sec},
                  {"cache_dir", triage.cache_dir.string()},
                  {"offline_stub", triage.offline_stub},
                  {"prompt_defective", triage.prompt_defective},
                  {"prompt_clean", triage.prompt_clean}};
    Json split_j{{"train", split.train}, {"valid", split.valid}, {"test", split.test}};
    Json tokenizer_j{{"kind", to_string(tokenizer.kind)},
                     {"vocab_path", tokenizer.vocab_path ? Json(tokenizer.vocab_path->string())
                                                         : Json(nullptr)},
                     {"budget", tokenizer.budget}};
    std::vector<std::string> encoding_names;
    for (Encoding e : encode.encodings) encoding_names.emplace_back(to_string(e));
    Json encode_j{{"encodings", encoding_names}, {"context_lines", encode.context_lines}};
    std::vector<std::string> perturbation_names;
    for (Perturbation p : perturb.kinds) perturbation_names.emplace_back(to_string(p));
    Json perturb_j{{"kinds", perturbation_names},
                   {"phase", to_string(perturb.phase)},
                   {"probability", perturb.probability}};
    Json analyze_j{{"metric", analyze.metric},
                   {"threshold", analyze.threshold},
                   {"resamples", analyze.resamples},
                   {"greenhouse_geisser", analyze.greenhouse_geisser}};
    return Json{{"output_dir", output_dir.string()},
                {"seed", seed},
                {"repos", repos},
                {"mine", mine_j},
                {"screen", screen_j},
                {"triage", triage_j},
                {"split", split_j},
                {"tokenizer", tokenizer_j},
                {"encode", encode_j},
                {"perturb", perturb_j},
                {"analyze", analyze_j}};
  }

  std::string config_hash() const { return sha256_hex(to_json().dump()); }
};

namespace detail {

inline void reject_unknown_keys(const Json& j, const std::set<std::string>& allowed,
                                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

template <typename T>
void maybe_get(const Json& j, const char* key, T& into, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    into = it->get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

}  // namespace detail

// Parses a pipeline configuration, starting from defaults and applying only
// the keys present in the file. Unknown keys anywhere are rejected.
inline PipelineConfig pipeline_config_from_json(const Json& j, const std::string& where) {
  PipelineConfig cfg;
  detail::reject_unknown_keys(j, {"output_dir", "seed", "repos", "mine", "screen", "triage",
                                  "split", "tokenizer", "encode", "perturb", "analyze"},
                              where);
  std::string out_dir = cfg.output_dir.string();
  detail::maybe_get(j, "output_dir", out_dir, where);
  cfg.output_dir = out_dir;
  detail::maybe_get(j, "seed", cfg.seed, where);
  detail::maybe_get(j, "repos", cfg.repos, where);

  if (auto it = j.find("mine"); it != j.end()) {
    const std::string at = where + ".mine";
    detail::reject_unknown_keys(*it, {"extensions", "max_file_bytes", "since"}, at);
    std::vector<std::string> exts(cfg.mine.extensions.begin(), cfg.mine.extensions.end());
    detail::maybe_get(*it, "extensions", exts, at);
    cfg.mine.extensions = std::set<std::string>(exts.begin(), exts.end());
    detail::maybe_get(*it, "max_file_bytes", cfg.mine.max_file_bytes, at);
    if (auto s = it->find("since"); s != it->end() && !s->is_null()) {
      cfg.mine.since = s->get<int64_t>();
    }
  }
  if (auto it = j.find("screen"); it != j.end()) {
    const std::string at = where + ".screen";
    detail::reject_unknown_keys(*it,
                                {"lookahead_commits", "problematic_keywords", "period_window_days",
                                 "require_later_modification"},
                                at);
    detail::maybe_get(*it, "lookahead_commits", cfg.screen.lookahead_commits, at);
    detail::maybe_get(*it, "problematic_keywords", cfg.screen.problematic_keywords, at);
    detail::maybe_get(*it, "period_window_days", cfg.screen.period_window_days, at);
    detail::maybe_get(*it, "require_later_modification", cfg.screen.require_later_modification, at);
  }
  if (auto it = j.find("triage"); it != j.end()) {
    const std::string at = where + ".triage";
    detail::reject_unknown_keys(
        *it, {"endpoint_url", "model", "api_key_env", "temperature", "max_retries",
              "backoff_initial_ms", "reask_limit", "concurrency", "requests_per_second",
              "timeout_sec", "cache_dir", "offline_stub", "prompt_defective", "prompt_clean"},
        at);
    detail::maybe_get(*it, "endpoint_url", cfg.triage.endpoint_url, at);
    detail::maybe_get(*it, "model", cfg.triage.model, at);
    detail::maybe_get(*it, "api_key_env", cfg.triage.api_key_env, at);
    if (auto t = it->find("temperature"); t != it->end() && !t->is_null()) {
      cfg.triage.temperature = t->get<double>();
    }
    detail::maybe_get(*it, "max_retries", cfg.triage.max_retries, at);
    detail::maybe_get(*it, "backoff_initial_ms", cfg.triage.backoff_initial_ms, at);
    detail::maybe_get(*it, "reask_limit", cfg.triage.reask_limit, at);
    detail::maybe_get(*it, "concurrency", cfg.triage.concurrency, at);
    detail::maybe_get(*it, "requests_per_second", cfg.triage.requests_per_second, at);
    detail::maybe_get(*it, "timeout_sec", cfg.triage.timeout_sec, at);
    std::string cache_dir = cfg.triage.cache_dir.string();
    detail::maybe_get(*it, "cache_dir", cache_dir, at);
    cfg.triage.cache_dir = cache_dir;
    detail::maybe_get(*it, "offline_stub", cfg.triage.offline_stub, at);
    detail::maybe_get(*it, "prompt_defective", cfg.triage.prompt_defective, at);
    detail::maybe_get(*it, "prompt_clean", cfg.triage.prompt_clean, at);
  }
  if (auto it = j.find("split"); it != j.end()) {
    const std::string at = where + ".split";
    detail::reject_unknown_keys(*it, {"train", "valid", "test"}, at);
    detail::maybe_get(*it, "train", cfg.split.train, at);
    detail::maybe_get(*it, "valid", cfg.split.valid, at);
    detail::maybe_get(*it, "test", cfg.split.test, at);
  }
  if (auto it = j.find("tokenizer"); it != j.end()) {
    const std::string at = where + ".tokenizer";
    detail::reject_unknown_keys(*it, {"kind", "vocab_path", "budget"}, at);
    if (auto k = it->find("kind"); k != it->end())
      cfg.tokenizer.kind = tokenizer_kind_from_string(k->get<std::string>());
    if (auto v = it->find("vocab_path"); v != it->end() && !v->is_null()) {
      cfg.tokenizer.vocab_path = std::filesystem::path(v->get<std::string>());
    }
    detail::maybe_get(*it, "budget", cfg.tokenizer.budget, at);
  }
  if (auto it = j.find("encode"); it != j.end()) {
    const std::string at = where + ".encode";
    detail::reject_unknown_keys(*it, {"encodings", "context_lines"}, at);
    if (auto e = it->find("encodings"); e != it->end()) {
      std::vector<std::string> names;
      detail::maybe_get(*it, "encodings", names, at);
      cfg.encode.encodings.clear();
      for (const std::string& name : names) cfg.encode.encodings.push_back(encoding_from_string(name));
    }
    detail::maybe_get(*it, "context_lines", cfg.encode.context_lines, at);
  }
  if (auto it = j.find("perturb"); it != j.end()) {
    const std::string at = where + ".perturb";
    detail::reject_unknown_keys(*it, {"kinds", "phase", "probability"}, at);
    if (auto k = it->find("kinds"); k != it->end()) {
      std::vector<std::string> names;
      detail::maybe_get(*it, "kinds", names, at);
      cfg.perturb.kinds.clear();
      for (const std::string& name : names) cfg.perturb.kinds.push_back(perturbation_from_string(name));
    }
    if (auto p = it->find("phase"); p != it->end())
      cfg.perturb.phase = phase_from_string(p->get<std::string>());
    detail::maybe_get(*it, "probability", cfg.perturb.probability, at);
  }
  if (auto it = j.find("analyze"); it != j.end()) {
    const std::string at = where + ".analyze";
    detail::reject_unknown_keys(*it, {"metric", "threshold", "resamples", "greenhouse_geisser"},
                                at);
    detail::maybe_get(*it, "metric", cfg.analyze.metric, at);
    detail::maybe_get(*it, "threshold", cfg.analyze.threshold, at);
    detail::maybe_get(*it, "resamples", cfg.analyze.resamples, at);
    detail::maybe_get(*it, "greenhouse_geisser", cfg.analyze.greenhouse_geisser, at);
  }
  return cfg;
}

inline PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::string text = read_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  PipelineConfig cfg = pipeline_config_from_json(j, path.string());
  cfg.validate();
  return cfg;
}

}  // namespace revlab
