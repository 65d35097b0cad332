#pragma once

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "revlab/errors.hpp"
#include "revlab/hash.hpp"
#include "revlab/jsonl.hpp"
#include "revlab/records.hpp"
#include "revlab/text.hpp"

namespace revlab {

// ----------------------------------------------------------------- types ---

struct EvidenceBundle {
  BundleKind kind = BundleKind::clean;
  std::string reverted_commit_message;  // defective only
  std::string revert_commit_message;    // defective only
  std::string commit_message;           // clean only
  std::string function_before;
  std::string function_after;
  std::string candidate_id;

  // Canonical content encoding; candidate_id = sha256 over it, so equal
  // evidence always maps to the same id.
  Json content_json() const {
    Json j{{"kind", to_string(kind)},
           {"function_before", function_before},
           {"function_after", function_after}};
    if (kind == BundleKind::defective) {
      j["reverted_commit_message"] = reverted_commit_message;
      j["revert_commit_message"] = revert_commit_message;
    } else {
      j["commit_message"] = commit_message;
    }
    return j;
  }
};

enum class VoteCategory { A, B, C };

inline const char* to_string(VoteCategory c) {
  switch (c) {
    case VoteCategory::A: return "A";
    case VoteCategory::B: return "B";
    case VoteCategory::C: return "C";
  }
  return "?";
}

struct TriageVote {
  VoteCategory category = VoteCategory::C;
  int vote_index = 0;  // 1..3
  std::string raw_response;
  std::string model_id;
};

enum class Transition { DtoD, CtoD, DtoC, CtoC };

inline const char* to_string(Transition t) {
  switch (t) {
    case Transition::DtoD: return "DtoD";
    case Transition::CtoD: return "CtoD";
    case Transition::DtoC: return "DtoC";
    case Transition::CtoC: return "CtoC";
  }
  return "?";
}

inline Transition transition_from_string(const std::string& s) {
  if (s == "DtoD") return Transition::DtoD;
  if (s == "CtoD") return Transition::CtoD;
  if (s == "DtoC") return Transition::DtoC;
  if (s == "CtoC") return Transition::CtoC;
  throw DataError("unknown transition '" + s + "'");
}

struct TriageVerdict {
  std::string candidate_id;
  std::vector<TriageVote> votes;  // exactly 3
  bool keep = false;
  std::optional<Transition> transition;  // set only on keep
  std::string prompt_version;
};

// ------------------------------------------------------------ operations ---

inline EvidenceBundle build_bundle(BundleKind kind, const FunctionModification& mod,
                                   const std::optional<RevertLink>& revert) {
  if (kind == BundleKind::defective && !revert)
    throw DataError("build_bundle: defective candidate requires its revert link");
  EvidenceBundle bundle;
  bundle.kind = kind;
  bundle.function_before = mod.function_before;
  bundle.function_after = mod.function_after;
  if (kind == BundleKind::defective) {
    bundle.reverted_commit_message = mod.commit_message;
    bundle.revert_commit_message = revert->revert_message;
  } else {
    bundle.commit_message = mod.commit_message;
  }
  bundle.candidate_id = sha256_hex(bundle.content_json().dump());
  return bundle;
}

// Strict category parse: the last non-empty line, stripped of whitespace and
// at most one trailing period, must be exactly "A", "B", or "C".
inline std::optional<VoteCategory> parse_vote_category(std::string_view response) {
  std::vector<std::string> lines = split_lines(response);
  for (size_t i = lines.size(); i > 0; --i) {
    std::string line = trim(lines[i - 1]);
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '.') line.pop_back();
    if (line == "A") return VoteCategory::A;
    if (line == "B") return VoteCategory::B;
    if (line == "C") return VoteCategory::C;
    return std::nullopt;
  }
  return std::nullopt;
}

// Unanimity rule: keep iff no C vote. Transition only on keep, from the
// majority category (3 votes over {A,B} cannot tie), mapped per kind.
inline TriageVerdict aggregate(const std::vector<TriageVote>& votes, BundleKind kind) {
  if (votes.size() != 3)
    throw DataError("aggregate: expected exactly 3 votes, got " + std::to_string(votes.size()));
  TriageVerdict verdict;
  verdict.votes = votes;
  int a = 0, b = 0, c = 0;
  for (const TriageVote& v : votes) {
    if (v.category == VoteCategory::A) ++a;
    if (v.category == VoteCategory::B) ++b;
    if (v.category == VoteCategory::C) ++c;
  }
  verdict.keep = c == 0;
  if (verdict.keep) {
    bool majority_a = a > b;
    if (kind == BundleKind::defective)
      verdict.transition = majority_a ? Transition::DtoD : Transition::CtoD;
    else
      verdict.transition = majority_a ? Transition::DtoC : Transition::CtoC;
  }
  return verdict;
}

// ---------------------------------------------------------------- client ---

struct TriageClientConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string api_key_env = "REVLAB_API_KEY";
  std::optional<double> temperature;  // unset = service default
  int max_retries = 3;                // transport-level, exponential backoff
  int backoff_initial_ms = 250;
  int reask_limit = 2;  // extra asks after an unparseable response
  int concurrency = 4;
  double requests_per_second = 2.0;
  int timeout_sec = 60;
  std::filesystem::path cache_dir = ".triage-cache";
  bool offline_stub = false;
  std::string prompt_defective;  // empty = built-in template
  std::string prompt_clean;

  void validate() const {
    if (max_retries < 0 || reask_limit < 0) throw ConfigError("triage: negative retry limits");
    if (concurrency < 1) throw ConfigError("triage: concurrency must be >= 1");
    if (requests_per_second <= 0) throw ConfigError("triage: requests_per_second must be > 0");
  }
};

inline const char* default_prompt(BundleKind kind) {
  if (kind == BundleKind::defective) {
    return "You are auditing a code change that was later reverted. Decide why it was reverted.\n"
           "Categories:\n"
           "A: the change tried to repair an existing defect but the defect persisted"
           " (defective before, defective after).\n"
           "B: the change introduced a new defect into previously working code"
           " (clean before, defective after).\n"
           "C: anything else: style-only or cosmetic churn, infrastructure or policy revert,"
           " or evidence too unclear to call.\n"
           "The user message carries the evidence: the reverted commit's message, the function"
           " body before and after the change, and the revert commit's message.\n"
           "Answer with exactly one letter (A, B, or C) on the final line.\n";
  }
  return "You are auditing a code change believed to be harmless. Classify the change.\n"
         "Categories:\n"
         "A: the change repairs an existing defect (defective before, clean after).\n"
         "B: the change is an improvement, optimization, or feature addition to working code"
         " (clean before, clean after).\n"
         "C: anything else: cosmetic-only edits, unclear intent, or no behavioral relevance.\n"
         "The user message carries the evidence: the commit message and the function body"
         " before and after the change.\n"
         "Answer with exactly one letter (A, B, or C) on the final line.\n";
}

inline std::string render_bundle_for_prompt(const EvidenceBundle& bundle) {
  std::string out;
  if (bundle.kind == BundleKind::defective) {
    out += "Reverted commit message:\n" + bundle.reverted_commit_message + "\n\n";
    out += "Function before:\n" + bundle.function_before + "\n\n";
    out += "Function after:\n" + bundle.function_after + "\n\n";
    out += "Revert commit message:\n" + bundle.revert_commit_message + "\n";
  } else {
    out += "Commit message:\n" + bundle.commit_message + "\n\n";
    out += "Function before:\n" + bundle.function_before + "\n\n";
    out += "Function after:\n" + bundle.function_after + "\n";
  }
  return out;
}

// Deterministic offline voter (keyword heuristic), used for tests and
// air-gapped runs and labeled in provenance. Rules:
//   defective kind: C when the revert message mentions style-only terms or
//   carries no rationale beyond revert keywords/hashes/quoted titles;
//   otherwise A when the reverted message mentions "fix", else B.
//   clean kind: C on style-only terms in the commit message, A on "fix",
//   else B. All three votes coincide.
inline VoteCategory stub_vote_category(const EvidenceBundle& bundle) {
  static const std::vector<std::string> style_words = {"style",  "format", "whitespace",
                                                       "lint",   "typo",   "comment"};
  if (bundle.kind == BundleKind::defective) {
    std::string revert_lower = to_lower(bundle.revert_commit_message);
    for (const std::string& w : style_words)
      if (revert_lower.find(w) != std::string::npos) return VoteCategory::C;
    int rationale_words = 0;
    size_t i = 0;
    bool in_quote = false;
    while (i < revert_lower.size()) {
      if (revert_lower[i] == '"') {
        in_quote = !in_quote;
        ++i;
        continue;
      }
      if (!std::isalnum(static_cast<unsigned char>(revert_lower[i]))) {
        ++i;
        continue;
      }
      size_t j = i;
      while (j < revert_lower.size() && std::isalnum(static_cast<unsigned char>(revert_lower[j])))
        ++j;
      std::string word = revert_lower.substr(i, j - i);
      i = j;
      if (in_quote) continue;
      if (word == "revert" || word == "reverts" || word == "reverted" || word == "reverting" ||
          word == "commit" || word == "this")
        continue;
      bool hexish = word.size() >= 7;
      for (char ch : word)
        if (!((ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f'))) hexish = false;
      if (hexish) continue;
      rationale_words += 1;
    }
    if (rationale_words < 2) return VoteCategory::C;
    return contains_ci(bundle.reverted_commit_message, "fix") ? VoteCategory::A : VoteCategory::B;
  }
  for (const std::string& w : style_words)
    if (contains_ci(bundle.commit_message, w)) return VoteCategory::C;
  return contains_ci(bundle.commit_message, "fix") ? VoteCategory::A : VoteCategory::B;
}

enum class ParkReason { service_unavailable, response_unparseable };

inline const char* to_string(ParkReason r) {
  return r == ParkReason::service_unavailable ? "service-unavailable" : "response-unparseable";
}

struct TriageResult {
  std::optional<TriageVerdict> verdict;
  std::optional<ParkReason> parked;
};

class TriageClient {
 public:
  explicit TriageClient(TriageClientConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    min_interval_ms_ = 1000.0 / cfg_.requests_per_second;
  }

  const TriageClientConfig& config() const { return cfg_; }

  std::string prompt_for(BundleKind kind) const {
    if (kind == BundleKind::defective)
      return cfg_.prompt_defective.empty() ? default_prompt(kind) : cfg_.prompt_defective;
    return cfg_.prompt_clean.empty() ? default_prompt(kind) : cfg_.prompt_clean;
  }

  std::string prompt_version(BundleKind kind) const {
    return sha256_hex(prompt_for(kind)).substr(0, 12);
  }

  // Three independent votes for one bundle, each cached under
  // (candidate_id, vote_index, prompt_version).
  TriageResult request_votes(const EvidenceBundle& bundle) {
    std::string version = prompt_version(bundle.kind);
    std::vector<TriageVote> votes;
    for (int index = 1; index <= 3; ++index) {
      if (std::optional<TriageVote> cached = cache_lookup(bundle.candidate_id, index, version)) {
        votes.push_back(std::move(*cached));
        continue;
      }
      TriageVote vote;
      vote.vote_index = index;
      if (cfg_.offline_stub) {
        vote.category = stub_vote_category(bundle);
        vote.raw_response = to_string(vote.category);
        vote.model_id = "offline-stub";
      } else {
        std::optional<ParkReason> parked = fetch_vote(bundle, index, vote);
        if (parked) {
          TriageResult result;
          result.parked = parked;
          return result;
        }
      }
      cache_store(bundle.candidate_id, index, version, vote);
      votes.push_back(std::move(vote));
    }
    TriageResult result;
    TriageVerdict verdict = aggregate(votes, bundle.kind);
    verdict.candidate_id = bundle.candidate_id;
    verdict.prompt_version = version;
    result.verdict = std::move(verdict);
    return result;
  }

  // Processes bundles with bounded concurrency; result order follows input
  // order, so scheduling cannot change output.
  std::vector<TriageResult> run_all(const std::vector<EvidenceBundle>& bundles) {
    std::vector<TriageResult> results(bundles.size());
    int workers = std::min<int>(cfg_.concurrency, static_cast<int>(bundles.size()));
    if (workers <= 1) {
      for (size_t i = 0; i < bundles.size(); ++i) results[i] = request_votes(bundles[i]);
      return results;
    }
    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          size_t i = next.fetch_add(1);
          if (i >= bundles.size()) return;
          try {
            results[i] = request_votes(bundles[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next.store(bundles.size());  // drain remaining work
            return;
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
  }

 private:
  std::filesystem::path cache_path(const std::string& candidate_id, int index,
                                   const std::string& version) const {
    return cfg_.cache_dir / (candidate_id + ".v" + std::to_string(index) + "." + version + ".json");
  }

  std::optional<TriageVote> cache_lookup(const std::string& candidate_id, int index,
                                         const std::string& version) const {
    std::filesystem::path p = cache_path(candidate_id, index, version);
    std::error_code ec;
    if (!std::filesystem::exists(p, ec)) return std::nullopt;
    Json j = Json::parse(read_file(p), nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    TriageVote vote;
    std::string cat = j.value("category", "");
    if (cat == "A")
      vote.category = VoteCategory::A;
    else if (cat == "B")
      vote.category = VoteCategory::B;
    else if (cat == "C")
      vote.category = VoteCategory::C;
    else
      return std::nullopt;
    vote.vote_index = index;
    vote.raw_response = j.value("raw_response", "");
    vote.model_id = j.value("model_id", "");
    return vote;
  }

  void cache_store(const std::string& candidate_id, int index, const std::string& version,
                   const TriageVote& vote) const {
    Json j{{"category", to_string(vote.category)},
           {"raw_response", vote.raw_response},
           {"model_id", vote.model_id}};
    atomic_write_file(cache_path(candidate_id, index, version), j.dump() + "\n");
  }

  void rate_limit() {
    using clock = std::chrono::steady_clock;
    clock::time_point wake;
    {
      std::lock_guard<std::mutex> lock(rate_mutex_);
      clock::time_point now = clock::now();
      if (next_slot_ < now) next_slot_ = now;
      wake = next_slot_;
      next_slot_ += std::chrono::milliseconds(static_cast<int64_t>(min_interval_ms_));
    }
    std::this_thread::sleep_until(wake);
  }

  struct Endpoint {
    std::string base;
    std::string path;
  };

  Endpoint split_endpoint() const {
    const std::string& url = cfg_.endpoint_url;
    size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw ConfigError("triage: endpoint url lacks scheme: " + url);
    size_t path_start = url.find('/', scheme + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
  }

  // One network ask, including transport retries. Returns the raw content
  // string, or nullopt when the service stayed unavailable.
  std::optional<std::string> ask_once(const EvidenceBundle& bundle) {
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
      throw ConfigError("triage: environment variable " + cfg_.api_key_env +
                        " is not set (service credentials required)");
    Endpoint ep = split_endpoint();
    Json payload{{"model", cfg_.model},
                 {"messages", Json::array({Json{{"role", "system"}, {"content", prompt_for(bundle.kind)}},
                                           Json{{"role", "user"},
                                                {"content", render_bundle_for_prompt(bundle)}}})}};
    if (cfg_.temperature) payload["temperature"] = *cfg_.temperature;
    std::string body = payload.dump();

    int backoff = cfg_.backoff_initial_ms;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
        backoff *= 2;
      }
      rate_limit();
      httplib::Client client(ep.base);
      client.set_connection_timeout(cfg_.timeout_sec, 0);
      client.set_read_timeout(cfg_.timeout_sec, 0);
      httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};
      httplib::Result res = client.Post(ep.path, headers, body, "application/json");
      if (!res) continue;  // transport failure: retry
      if (res->status == 200) {
        Json j = Json::parse(res->body, nullptr, false);
        if (j.is_discarded()) return std::nullopt;
        try {
          return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const Json::exception&) {
          return std::nullopt;
        }
      }
      bool retryable = res->status == 408 || res->status == 429 || res->status >= 500;
      if (!retryable) return std::nullopt;
    }
    return std::nullopt;
  }

  std::optional<ParkReason> fetch_vote(const EvidenceBundle& bundle, int index, TriageVote& vote) {
    for (int ask = 0; ask <= cfg_.reask_limit; ++ask) {
      std::optional<std::string> content = ask_once(bundle);
      if (!content) return ParkReason::service_unavailable;
      if (std::optional<VoteCategory> cat = parse_vote_category(*content)) {
        vote.category = *cat;
        vote.vote_index = index;
        vote.raw_response = *content;
        vote.model_id = cfg_.model;
        return std::nullopt;
      }
      // Unparseable: re-ask with a fresh request, up to the limit.
    }
    return ParkReason::response_unparseable;
  }

  TriageClientConfig cfg_;
  double min_interval_ms_ = 500;
  std::mutex rate_mutex_;
  std::chrono::steady_clock::time_point next_slot_{};
};

// ------------------------------------------------------------ serialization

inline Json verdict_to_json(const TriageVerdict& verdict, BundleKind kind,
                            const CandidateRecord& candidate) {
  Json votes = Json::array();
  for (const TriageVote& v : verdict.votes) {
    votes.push_back(Json{{"vote_index", v.vote_index},
                         {"category", to_string(v.category)},
                         {"raw_response", v.raw_response},
                         {"model_id", v.model_id}});
  }
  Json j{{"record", "verdict"},
         {"candidate_id", verdict.candidate_id},
         {"kind", to_string(kind)},
         {"decision", verdict.keep ? "keep" : "discard"},
         {"transition", verdict.transition ? Json(to_string(*verdict.transition)) : Json(nullptr)},
         {"prompt_version", verdict.prompt_version},
         {"votes", votes},
         {"candidate", candidate.to_json()}};
  return j;
}

struct VerdictRecord {
  TriageVerdict verdict;
  BundleKind kind = BundleKind::clean;
  CandidateRecord candidate;
};

inline VerdictRecord verdict_from_json(const Json& j, const std::string& where) {
  for (const char* f : {"candidate_id", "kind", "decision", "votes", "candidate"})
    require_field(j, f, where);
  VerdictRecord rec;
  rec.kind = bundle_kind_from_string(j.at("kind").get<std::string>());
  rec.verdict.candidate_id = j.at("candidate_id").get<std::string>();
  rec.verdict.keep = j.at("decision").get<std::string>() == "keep";
  if (j.contains("transition") && !j.at("transition").is_null())
    rec.verdict.transition = transition_from_string(j.at("transition").get<std::string>());
  rec.verdict.prompt_version = j.value("prompt_version", "");
  for (const Json& vj : j.at("votes")) {
    TriageVote v;
    std::string cat = vj.value("category", "");
    if (cat == "A")
      v.category = VoteCategory::A;
    else if (cat == "B")
      v.category = VoteCategory::B;
    else if (cat == "C")
      v.category = VoteCategory::C;
    else
      throw DataError(where + ": bad vote category '" + cat + "'");
    v.vote_index = vj.value("vote_index", 0);
    v.raw_response = vj.value("raw_response", "");
    v.model_id = vj.value("model_id", "");
    rec.verdict.votes.push_back(std::move(v));
  }
  rec.candidate = CandidateRecord::from_json(j.at("candidate"), where + ".candidate");
  return rec;
}

}  // namespace revlab
