// Command-line front end over the pipeline stages: mine revert-linked
// defective candidates, screen a clean pool, triage candidates into
// verdicts, build the split corpus, encode and perturb model inputs, and run
// the paired statistical analyses over externally produced scores.
//
// Every artifact-producing stage stamps a provenance header whose
// config_hash identifies the effective configuration; stages refuse inputs
// stamped under a different configuration unless --force is given, so mixed
// artifact chains cannot arise silently. Headerless inputs (externally
// produced score files) skip that check. Reruns with identical inputs and
// configuration produce byte-identical outputs.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "revlab/clean_screener.hpp"
#include "revlab/config.hpp"
#include "revlab/dataset.hpp"
#include "revlab/encoder.hpp"
#include "revlab/errors.hpp"
#include "revlab/extractor.hpp"
#include "revlab/git.hpp"
#include "revlab/jsonl.hpp"
#include "revlab/metrics.hpp"
#include "revlab/perturber.hpp"
#include "revlab/records.hpp"
#include "revlab/repo_miner.hpp"
#include "revlab/reports.hpp"
#include "revlab/stats.hpp"
#include "revlab/tokenizer.hpp"
#include "revlab/triage.hpp"
#include "revlab/version.hpp"

namespace fs = std::filesystem;
using namespace revlab;

namespace {

constexpr const char* kCandidateSchema = "candidates";
constexpr const char* kVerdictSchema = "verdicts";
constexpr const char* kParkedSchema = "parked-candidates";
constexpr const char* kConditionSchema = "stage1-conditions";
constexpr const char* kAnovaSchema = "stage1-anova";
constexpr const char* kStage2Schema = "stage2-comparisons";

ProvenanceHeader make_header(std::string schema, std::string generator, std::string config_hash,
                             Json extras = Json::object()) {
  ProvenanceHeader h;
  h.schema = std::move(schema);
  h.generator = std::move(generator);
  h.config_hash = std::move(config_hash);
  h.extras = std::move(extras);
  return h;
}

// Inputs stamped by an earlier stage must match the current configuration;
// headerless files are externally produced and pass through unchecked.
void check_input(const std::optional<ProvenanceHeader>& header, const fs::path& path,
                 const char* want_schema, const std::string& config_hash, bool force) {
  if (!header) return;
  if (header->schema != want_schema)
    throw DataError(path.string() + ": holds '" + header->schema + "' records, expected '" +
                    want_schema + "'");
  if (header->config_hash != config_hash && !force)
    throw DataError(path.string() + ": produced under configuration " +
                    header->config_hash.substr(0, 12) + " but the current configuration hashes to " +
                    config_hash.substr(0, 12) +
                    "; rerun the producing stage or pass --force to accept it");
}

// Shared context resolved once per invocation.
struct Pipeline {
  PipelineConfig cfg;
  std::string config_hash;
  bool force = false;

  fs::path out(const std::string& cli_value, const char* default_name) const {
    if (!cli_value.empty()) return fs::path(cli_value);
    return cfg.output_dir / default_name;
  }

  std::vector<std::string> resolve_repos(const std::vector<std::string>& cli_repos) const {
    const std::vector<std::string>& repos = cli_repos.empty() ? cfg.repos : cli_repos;
    if (repos.empty())
      throw ConfigError("no repositories given: set 'repos' in the configuration or pass --repo");
    return repos;
  }
};

Pipeline open_pipeline(const std::string& config_path, bool force) {
  if (config_path.empty())
    throw ConfigError("this command needs a pipeline configuration: pass --config <file>");
  Pipeline p;
  p.cfg = load_pipeline_config(config_path);
  p.config_hash = p.cfg.config_hash();
  p.force = force;
  fs::create_directories(p.cfg.output_dir);
  return p;
}

void write_json_file(const fs::path& path, const Json& j) {
  atomic_write_file(path, j.dump(2) + "\n");
}

Json mine_stats_json(const MineStats& s) {
  return Json{{"scanned_commits", s.scanned_commits},
              {"single_parent_commits", s.single_parent_commits},
              {"candidates", s.candidates},
              {"rejections", s.rejections},
              {"revert_links", s.revert_links},
              {"revert_ambiguous", s.revert_ambiguous},
              {"revert_unresolved", s.revert_unresolved},
              {"defective_candidates", s.defective_candidates}};
}

// ---------------------------------------------------------------- stages ---

int cmd_mine(const Pipeline& p, const std::vector<std::string>& cli_repos,
             const std::string& out_arg) {
  fs::path out_path = p.out(out_arg, "defective.jsonl");
  std::vector<Json> records;
  Json stats = Json::object();
  std::vector<std::string> repo_ids;
  for (const std::string& repo_path : p.resolve_repos(cli_repos)) {
    GitRepo repo{fs::path(repo_path)};
    MiningResult mined = mine_repository(repo, p.cfg.mine);
    for (const DefectiveCandidate& d : mined.defective)
      records.push_back(make_candidate_record(BundleKind::defective, d.target, d.link).to_json());
    const MineStats& s = mined.stats;
    std::printf("repo %s: commits=%" PRId64 " single-parent=%" PRId64 " candidates=%" PRId64
                " revert-links=%" PRId64 " (ambiguous=%" PRId64 ", unresolved=%" PRId64
                ") defective=%" PRId64 "\n",
                repo.repo_id().c_str(), s.scanned_commits, s.single_parent_commits, s.candidates,
                s.revert_links, s.revert_ambiguous, s.revert_unresolved, s.defective_candidates);
    for (const auto& [reason, count] : s.rejections)
      std::printf("  rejected %s: %" PRId64 "\n", reason.c_str(), count);
    stats[repo.repo_id()] = mine_stats_json(s);
    repo_ids.push_back(repo.repo_id());
  }
  write_jsonl(out_path, make_header(kCandidateSchema, "revlab mine", p.config_hash,
                                    Json{{"repos", repo_ids}}),
              records);
  write_json_file(p.cfg.output_dir / "mine_stats.json",
                  Json{{"record", "mine-stats"}, {"config_hash", p.config_hash}, {"repos", stats}});
  std::printf("wrote %zu defective candidate(s) to %s\n", records.size(),
              out_path.string().c_str());
  return 0;
}

int cmd_screen(const Pipeline& p, const std::vector<std::string>& cli_repos,
               const std::string& in_arg, const std::string& out_arg) {
  fs::path in_path = p.out(in_arg, "defective.jsonl");
  fs::path out_path = p.out(out_arg, "clean.jsonl");
  JsonlFile input = read_jsonl(in_path);
  check_input(input.header, in_path, kCandidateSchema, p.config_hash, p.force);

  std::map<std::string, std::vector<int64_t>> defective_times;
  for (size_t i = 0; i < input.records.size(); ++i) {
    CandidateRecord rec = CandidateRecord::from_json(
        input.records[i], in_path.string() + ":" + std::to_string(input.line_numbers[i]));
    defective_times[rec.project].push_back(rec.commit_time);
  }

  std::vector<Json> records;
  int64_t total_pool = 0, total_kept = 0;
  for (const std::string& repo_path : p.resolve_repos(cli_repos)) {
    GitRepo repo{fs::path(repo_path)};
    MiningResult mined = mine_repository(repo, p.cfg.mine);
    const std::vector<int64_t>& times = defective_times[repo.repo_id()];
    std::vector<CandidateRef> pool = select_clean_pool(mined, times, p.cfg.screen);
    std::map<std::string, int64_t> by_status;
    for (const CandidateRef& cand : pool) {
      ScreenOutcome outcome = history_screen(repo, mined.commits, cand, p.cfg.screen);
      by_status[to_string(outcome.status)] += 1;
      if (outcome.status != ScreenStatus::pass) continue;
      CandidateRecord rec = make_candidate_record(BundleKind::clean, cand, std::nullopt);
      rec.screen = ScreenInfo{to_string(outcome.status), outcome.matched_keywords,
                              outcome.inspected};
      records.push_back(rec.to_json());
    }
    total_pool += static_cast<int64_t>(pool.size());
    total_kept += by_status["pass"];
    std::printf("repo %s: pool=%zu pass=%" PRId64 " keyword-hit=%" PRId64 " never-modified=%" PRId64
                "\n",
                repo.repo_id().c_str(), pool.size(), by_status["pass"], by_status["keyword-hit"],
                by_status["never-modified"]);
  }
  write_jsonl(out_path, make_header(kCandidateSchema, "revlab screen", p.config_hash), records);
  std::printf("screened %" PRId64 " pool candidate(s), kept %" PRId64 ", wrote %s\n", total_pool,
              total_kept, out_path.string().c_str());
  return 0;
}

int cmd_triage(const Pipeline& p, std::vector<std::string> in_args, const std::string& out_arg,
               const std::string& parked_arg) {
  if (in_args.empty()) {
    in_args = {(p.cfg.output_dir / "defective.jsonl").string(),
               (p.cfg.output_dir / "clean.jsonl").string()};
  }
  fs::path out_path = p.out(out_arg, "verdicts.jsonl");
  fs::path parked_path = p.out(parked_arg, "parked.jsonl");

  std::vector<CandidateRecord> candidates;
  for (const std::string& in : in_args) {
    fs::path in_path(in);
    JsonlFile input = read_jsonl(in_path);
    check_input(input.header, in_path, kCandidateSchema, p.config_hash, p.force);
    for (size_t i = 0; i < input.records.size(); ++i)
      candidates.push_back(CandidateRecord::from_json(
          input.records[i], in_path.string() + ":" + std::to_string(input.line_numbers[i])));
  }

  std::vector<EvidenceBundle> bundles;
  bundles.reserve(candidates.size());
  for (const CandidateRecord& rec : candidates)
    bundles.push_back(build_bundle(rec.kind, rec.mod, rec.link));

  TriageClient client(p.cfg.triage);
  std::vector<TriageResult> results = client.run_all(bundles);

  std::vector<Json> verdicts, parked;
  int64_t kept = 0, discarded = 0;
  for (size_t i = 0; i < results.size(); ++i) {
    if (results[i].verdict) {
      (results[i].verdict->keep ? kept : discarded) += 1;
      verdicts.push_back(verdict_to_json(*results[i].verdict, candidates[i].kind, candidates[i]));
    } else {
      parked.push_back(Json{{"record", "parked"},
                            {"candidate_id", bundles[i].candidate_id},
                            {"reason", to_string(*results[i].parked)},
                            {"candidate", candidates[i].to_json()}});
    }
  }
  Json extras{{"model", p.cfg.triage.model},
              {"offline_stub", p.cfg.triage.offline_stub},
              {"prompt_version_defective", client.prompt_version(BundleKind::defective)},
              {"prompt_version_clean", client.prompt_version(BundleKind::clean)}};
  write_jsonl(out_path, make_header(kVerdictSchema, "revlab triage", p.config_hash, extras),
              verdicts);
  write_jsonl(parked_path, make_header(kParkedSchema, "revlab triage", p.config_hash), parked);
  std::printf("triaged %zu candidate(s): kept=%" PRId64 " discarded=%" PRId64 " parked=%zu\n",
              candidates.size(), kept, discarded, parked.size());
  std::printf("wrote %s and %s\n", out_path.string().c_str(), parked_path.string().c_str());
  return 0;
}

int cmd_build(const Pipeline& p, const std::string& in_arg, const std::string& out_arg,
              const std::string& summary_arg) {
  fs::path in_path = p.out(in_arg, "verdicts.jsonl");
  fs::path out_path = p.out(out_arg, "corpus.jsonl");
  fs::path summary_path = p.out(summary_arg, "split_summary.json");
  JsonlFile input = read_jsonl(in_path);
  check_input(input.header, in_path, kVerdictSchema, p.config_hash, p.force);

  std::vector<VerdictRecord> verdicts;
  for (size_t i = 0; i < input.records.size(); ++i)
    verdicts.push_back(verdict_from_json(
        input.records[i], in_path.string() + ":" + std::to_string(input.line_numbers[i])));

  std::vector<DatasetSample> samples = assemble(verdicts);
  SplitSummary summary = temporal_split(samples, p.cfg.split);
  serialize_corpus(samples, out_path, make_header("", "revlab build", p.config_hash));
  Json summary_json = summary.to_json();
  summary_json["config_hash"] = p.config_hash;
  write_json_file(summary_path, summary_json);

  for (const std::string& w : summary.warnings) std::printf("warning: %s\n", w.c_str());
  std::printf("corpus: %zu sample(s) (train=%" PRId64 " valid=%" PRId64 " test=%" PRId64 ")\n",
              samples.size(), summary.train, summary.valid, summary.test);
  std::printf("labels: clean=%" PRId64 " defective=%" PRId64 "%s\n", summary.class_weight.n_neg,
              summary.class_weight.n_pos,
              summary.class_weight.n_pos > 0
                  ? ("  class-weight=" + summary.class_weight.render()).c_str()
                  : "");
  std::printf("wrote %s and %s\n", out_path.string().c_str(), summary_path.string().c_str());
  return 0;
}

int cmd_encode(const Pipeline& p, const std::string& in_arg, const std::string& out_arg) {
  fs::path in_path = p.out(in_arg, "corpus.jsonl");
  fs::path out_path = p.out(out_arg, "encoded.jsonl");
  LoadedCorpus corpus = load_corpus(in_path);
  check_input(corpus.header, in_path, kCorpusSchema, p.config_hash, p.force);

  Tokenizer tok(p.cfg.tokenizer);
  std::vector<Json> records;
  records.reserve(corpus.samples.size() * p.cfg.encode.encodings.size());
  for (const DatasetSample& s : corpus.samples)
    for (Encoding enc : p.cfg.encode.encodings)
      records.push_back(encoded_to_json(encode(s, tok, enc, p.cfg.encode.context_lines)));

  std::vector<std::string> encoding_names;
  for (Encoding e : p.cfg.encode.encodings) encoding_names.emplace_back(to_string(e));
  Json extras{{"tokenizer", to_string(p.cfg.tokenizer.kind)},
              {"budget", p.cfg.tokenizer.budget},
              {"encodings", encoding_names},
              {"context_lines", p.cfg.encode.context_lines}};
  write_jsonl(out_path, make_header(kEncodedSchema, "revlab encode", p.config_hash, extras),
              records);
  std::printf("encoded %zu sample(s) x %zu encoding(s) -> %zu record(s), wrote %s\n",
              corpus.samples.size(), p.cfg.encode.encodings.size(), records.size(),
              out_path.string().c_str());
  return 0;
}

int cmd_lencdf(const Pipeline& p, const std::string& in_arg, const std::string& out_arg,
               int64_t limit) {
  fs::path in_path = p.out(in_arg, "corpus.jsonl");
  fs::path out_path = p.out(out_arg, "length_cdf.json");
  LoadedCorpus corpus = load_corpus(in_path);
  check_input(corpus.header, in_path, kCorpusSchema, p.config_hash, p.force);

  Tokenizer tok(p.cfg.tokenizer);
  std::vector<CdfPoint> cdf = length_cdf(corpus.samples, tok);
  double fraction = fraction_exceeding(cdf, limit);
  Json points = Json::array();
  for (const CdfPoint& pt : cdf)
    points.push_back(Json{{"token_count", pt.token_count},
                          {"cumulative_fraction", pt.cumulative_fraction}});
  write_json_file(out_path, Json{{"record", "length-cdf"},
                                 {"config_hash", p.config_hash},
                                 {"samples", corpus.samples.size()},
                                 {"limit", limit},
                                 {"fraction_exceeding", fraction},
                                 {"points", points}});
  std::printf("token-length cdf over %zu sample(s): %.4f exceed %" PRId64 " tokens, wrote %s\n",
              corpus.samples.size(), fraction, limit, out_path.string().c_str());
  return 0;
}

int cmd_perturb(const Pipeline& p, const std::string& in_arg, const std::string& out_arg) {
  fs::path in_path = p.out(in_arg, "corpus.jsonl");
  fs::path out_path = p.out(out_arg, "perturbed.jsonl");
  LoadedCorpus corpus = load_corpus(in_path);
  check_input(corpus.header, in_path, kCorpusSchema, p.config_hash, p.force);

  Tokenizer tok(p.cfg.tokenizer);
  std::vector<Json> records;
  records.reserve(corpus.samples.size() * p.cfg.perturb.kinds.size());
  int64_t applied = 0;
  for (const DatasetSample& s : corpus.samples) {
    for (Perturbation kind : p.cfg.perturb.kinds) {
      PerturbationConfig pc{kind, p.cfg.perturb.probability, p.cfg.perturb.phase, p.cfg.seed};
      PerturbedInput out = perturb(s, tok, pc);
      applied += out.applied ? 1 : 0;
      records.push_back(perturbed_to_json(out));
    }
  }
  std::vector<std::string> kind_names;
  for (Perturbation k : p.cfg.perturb.kinds) kind_names.emplace_back(to_string(k));
  Json extras{{"kinds", kind_names},
              {"phase", to_string(p.cfg.perturb.phase)},
              {"probability", p.cfg.perturb.probability},
              {"seed", p.cfg.seed}};
  write_jsonl(out_path, make_header(kPerturbedSchema, "revlab perturb", p.config_hash, extras),
              records);
  std::printf("perturbed %zu sample(s) x %zu kind(s) -> %zu record(s) (%" PRId64
              " applied), wrote %s\n",
              corpus.samples.size(), p.cfg.perturb.kinds.size(), records.size(), applied,
              out_path.string().c_str());
  return 0;
}

// ------------------------------------------------------------- analysis ---

// Score files may hold per-condition metric records or raw per-sample
// prediction records; predictions are reduced with the configured metric.
std::vector<ScoreRecord> load_scores(const Pipeline& p, const std::vector<std::string>& paths) {
  std::vector<ScoreRecord> scores;
  std::vector<PredictionRecord> predictions;
  for (const std::string& path : paths) {
    JsonlFile file = read_jsonl(fs::path(path));
    for (size_t i = 0; i < file.records.size(); ++i) {
      const std::string where = path + ":" + std::to_string(file.line_numbers[i]);
      if (looks_like_prediction(file.records[i]))
        predictions.push_back(prediction_record_from_json(file.records[i], where));
      else
        scores.push_back(score_record_from_json(file.records[i], where));
    }
  }
  if (!predictions.empty()) {
    std::vector<ScoreRecord> reduced =
        reduce_predictions(predictions, p.cfg.analyze.metric, p.cfg.analyze.threshold);
    scores.insert(scores.end(), reduced.begin(), reduced.end());
  }
  return scores;
}

int cmd_stage1(const Pipeline& p, const std::vector<std::string>& score_paths,
               const std::string& conditions_arg, const std::string& anova_arg) {
  fs::path conditions_path = p.out(conditions_arg, "stage1_conditions.jsonl");
  fs::path anova_path = p.out(anova_arg, "stage1_anova.jsonl");

  std::vector<ScoreRecord> scores = load_scores(p, score_paths);
  ScoreMatrix matrix = build_score_matrix(scores, p.cfg.analyze.metric);
  std::vector<AnovaEffect> effects = rm_anova(matrix, p.cfg.analyze.greenhouse_geisser);

  Json extras{{"metric", p.cfg.analyze.metric},
              {"subjects", matrix.subjects},
              {"models", matrix.model_names},
              {"encodings", matrix.encoding_names}};
  write_jsonl(conditions_path,
              make_header(kConditionSchema, "revlab analyze stage1", p.config_hash, extras),
              condition_rows(matrix));
  write_jsonl(anova_path, make_header(kAnovaSchema, "revlab analyze stage1", p.config_hash, extras),
              anova_rows(effects));

  std::printf("%s", render_condition_table(matrix).c_str());
  std::printf("\n%s", render_anova_table(effects).c_str());
  std::printf("\nwrote %s and %s\n", conditions_path.string().c_str(),
              anova_path.string().c_str());
  return 0;
}

int cmd_stage2(const Pipeline& p, const std::vector<std::string>& score_paths,
               const std::string& pairs_path, const std::string& out_arg) {
  fs::path out_path = p.out(out_arg, "stage2.jsonl");

  Json pairs_json;
  try {
    pairs_json = Json::parse(read_file(fs::path(pairs_path)));
  } catch (const Json::exception& e) {
    throw DataError(pairs_path + ": " + e.what());
  }
  std::vector<PairSpec> specs = parse_pair_specs(pairs_json, pairs_path);

  std::vector<ScoreRecord> scores = load_scores(p, score_paths);
  std::vector<PairedSeries> series = pair_series(scores, specs, p.cfg.analyze.metric);
  std::vector<Stage2Row> rows = stage2_report(series, p.cfg.analyze.resamples, p.cfg.seed);

  Json extras{{"metric", p.cfg.analyze.metric},
              {"resamples", p.cfg.analyze.resamples},
              {"seed", p.cfg.seed}};
  write_jsonl(out_path, make_header(kStage2Schema, "revlab analyze stage2", p.config_hash, extras),
              stage2_rows_json(rows));
  std::printf("%s", render_stage2_table(rows).c_str());
  std::printf("\nwrote %s\n", out_path.string().c_str());
  return 0;
}

int cmd_extract(const std::string& before_path, const std::string& after_path,
                const std::string& out_arg) {
  std::string before = read_file(fs::path(before_path));
  std::string after = read_file(fs::path(after_path));
  LocalizeResult result = localize_change(before, after, diff_lines(before, after));

  auto span_json = [](const std::optional<FunctionSpan>& span) {
    if (!span) return Json(nullptr);
    return Json{{"name", span->name}, {"start_line", span->start_line},
                {"end_line", span->end_line}};
  };
  Json j{{"record", "localized-change"},
         {"status", to_string(result.status)},
         {"span_before", span_json(result.span_before)},
         {"span_after", span_json(result.span_after)}};
  if (result.status == LocalizeStatus::ok) {
    j["function_name"] = result.mod.function_name;
    j["function_before"] = result.mod.function_before;
    j["function_after"] = result.mod.function_after;
    j["deleted_lines_local"] = result.mod.deleted_lines_local;
    j["added_lines_local"] = result.mod.added_lines_local;
  }
  if (out_arg.empty())
    std::printf("%s\n", j.dump(2).c_str());
  else
    write_json_file(fs::path(out_arg), j);
  return 0;
}

// ------------------------------------------------------------------ main ---

int run(int argc, char** argv) {
  CLI::App app{"mines revert-linked defect corpora from git histories, encodes and perturbs "
               "code-change inputs, and runs the paired statistical protocol over model scores",
               "revlab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string("revlab ") + kToolVersion);

  std::string config_path;
  bool force = false;
  app.add_option("--config", config_path, "pipeline configuration file (JSON)");
  app.add_flag("--force", force,
               "accept inputs stamped with a different configuration hash");

  std::vector<std::string> repos;
  std::vector<std::string> in_files;
  std::string in_file, out_file, out_file2, pairs_file, before_file, after_file;
  int64_t limit = 512;

  CLI::App* mine = app.add_subcommand(
      "mine", "scan repositories for revert-linked defective function changes");
  mine->add_option("--repo", repos, "repository path (repeatable; default: config 'repos')");
  mine->add_option("--out", out_file, "output path (default: <output_dir>/defective.jsonl)");

  CLI::App* screen = app.add_subcommand(
      "screen", "select and history-screen a clean candidate pool around the defective set");
  screen->add_option("--repo", repos, "repository path (repeatable; default: config 'repos')");
  screen->add_option("--in", in_file, "defective candidates (default: <output_dir>/defective.jsonl)");
  screen->add_option("--out", out_file, "output path (default: <output_dir>/clean.jsonl)");

  CLI::App* triage = app.add_subcommand(
      "triage", "collect three-vote verdicts for every candidate");
  triage->add_option("--in", in_files,
                     "candidate file (repeatable; default: defective.jsonl and clean.jsonl)");
  triage->add_option("--out", out_file, "verdict output (default: <output_dir>/verdicts.jsonl)");
  triage->add_option("--parked-out", out_file2,
                     "parked-candidate output (default: <output_dir>/parked.jsonl)");

  CLI::App* build = app.add_subcommand(
      "build", "assemble kept verdicts into a stratified, temporally split corpus");
  build->add_option("--in", in_file, "verdict file (default: <output_dir>/verdicts.jsonl)");
  build->add_option("--out", out_file, "corpus output (default: <output_dir>/corpus.jsonl)");
  build->add_option("--summary-out", out_file2,
                    "split summary output (default: <output_dir>/split_summary.json)");

  CLI::App* encode_cmd = app.add_subcommand(
      "encode", "tokenize every sample under the configured encodings");
  encode_cmd->add_option("--in", in_file, "corpus file (default: <output_dir>/corpus.jsonl)");
  encode_cmd->add_option("--out", out_file, "output path (default: <output_dir>/encoded.jsonl)");

  CLI::App* lencdf = app.add_subcommand(
      "lencdf", "token-length distribution of post-change functions");
  lencdf->add_option("--in", in_file, "corpus file (default: <output_dir>/corpus.jsonl)");
  lencdf->add_option("--out", out_file, "output path (default: <output_dir>/length_cdf.json)");
  lencdf->add_option("--limit", limit, "token budget to report the exceeding fraction for")
      ->default_val(int64_t{512});

  CLI::App* perturb_cmd = app.add_subcommand(
      "perturb", "apply the configured counterfactual perturbations to every sample");
  perturb_cmd->add_option("--in", in_file, "corpus file (default: <output_dir>/corpus.jsonl)");
  perturb_cmd->add_option("--out", out_file, "output path (default: <output_dir>/perturbed.jsonl)");

  CLI::App* analyze = app.add_subcommand("analyze", "statistical analysis over model scores");
  analyze->require_subcommand(1);
  analyze->fallthrough();

  CLI::App* stage1 = analyze->add_subcommand(
      "stage1", "per-condition summaries and the two-factor repeated-measures analysis");
  stage1->add_option("--scores", in_files, "score or prediction file (repeatable)")->required();
  stage1->add_option("--out-conditions", out_file,
                     "condition table output (default: <output_dir>/stage1_conditions.jsonl)");
  stage1->add_option("--out-anova", out_file2,
                     "effect table output (default: <output_dir>/stage1_anova.jsonl)");

  CLI::App* stage2 = analyze->add_subcommand(
      "stage2", "paired original-versus-perturbed comparisons with corrected p-values");
  stage2->add_option("--scores", in_files, "score or prediction file (repeatable)")->required();
  stage2->add_option("--pairs", pairs_file, "JSON file naming the original/perturbed pairs")
      ->required();
  stage2->add_option("--out", out_file, "output path (default: <output_dir>/stage2.jsonl)");

  CLI::App* extract = app.add_subcommand(
      "extract", "localize a single-function change between two file snapshots");
  extract->add_option("--before", before_file, "pre-change file")->required();
  extract->add_option("--after", after_file, "post-change file")->required();
  extract->add_option("--out", out_file, "write the result here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::config);
  }

  if (app.got_subcommand(extract)) return cmd_extract(before_file, after_file, out_file);

  Pipeline p = open_pipeline(config_path, force);
  if (app.got_subcommand(mine)) return cmd_mine(p, repos, out_file);
  if (app.got_subcommand(screen)) return cmd_screen(p, repos, in_file, out_file);
  if (app.got_subcommand(triage)) return cmd_triage(p, in_files, out_file, out_file2);
  if (app.got_subcommand(build)) return cmd_build(p, in_file, out_file, out_file2);
  if (app.got_subcommand(encode_cmd)) return cmd_encode(p, in_file, out_file);
  if (app.got_subcommand(lencdf)) return cmd_lencdf(p, in_file, out_file, limit);
  if (app.got_subcommand(perturb_cmd)) return cmd_perturb(p, in_file, out_file);
  if (app.got_subcommand(analyze)) {
    if (analyze->got_subcommand(stage1)) return cmd_stage1(p, in_files, out_file, out_file2);
    return cmd_stage2(p, in_files, pairs_file, out_file);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
