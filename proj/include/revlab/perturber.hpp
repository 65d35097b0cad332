#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "revlab/encoder.hpp"
#include "revlab/rng.hpp"

namespace revlab {

// ----------------------------------------------------------------- types ---

enum class Perturbation { SpuriousMarkers, SwappedSnapshots, ReversedDiffTags, SwappedBlocks };

inline const char* to_string(Perturbation p) {
  switch (p) {
    case Perturbation::SpuriousMarkers: return "spurious-markers";
    case Perturbation::SwappedSnapshots: return "swapped-snapshots";
    case Perturbation::ReversedDiffTags: return "reversed-diff-tags";
    case Perturbation::SwappedBlocks: return "swapped-blocks";
  }
  return "?";
}

inline Perturbation perturbation_from_string(const std::string& s) {
  if (s == "spurious-markers") return Perturbation::SpuriousMarkers;
  if (s == "swapped-snapshots") return Perturbation::SwappedSnapshots;
  if (s == "reversed-diff-tags") return Perturbation::ReversedDiffTags;
  if (s == "swapped-blocks") return Perturbation::SwappedBlocks;
  throw ConfigError("unknown perturbation '" + s + "'");
}

enum class Phase { train, test };

inline const char* to_string(Phase p) { return p == Phase::train ? "train" : "test"; }

inline Phase phase_from_string(const std::string& s) {
  if (s == "train") return Phase::train;
  if (s == "test") return Phase::test;
  throw ConfigError("unknown phase '" + s + "'");
}

// The two snapshot/tag inversions probe models at evaluation time only; the
// two injection/swap kinds distort both training and testing.
inline bool allowed_in_train(Perturbation p) {
  return p == Perturbation::SpuriousMarkers || p == Perturbation::SwappedBlocks;
}

struct PerturbationConfig {
  Perturbation kind = Perturbation::SpuriousMarkers;
  double probability = 0.5;  // coin bias for the two swap kinds
  Phase phase = Phase::test;
  uint64_t seed = 0;

  void validate() const {
    if (probability < 0.0 || probability > 1.0)
      throw ConfigError("perturbation probability must lie in [0, 1]");
    if (phase == Phase::train && !allowed_in_train(kind))
      throw ConfigError(std::string("perturbation '") + to_string(kind) +
                        "' is test-only and cannot be applied to training outputs");
  }
};

struct PerturbedInput {
  EncodedInput input;
  Perturbation kind = Perturbation::SpuriousMarkers;
  Phase phase = Phase::test;
  uint64_t seed = 0;
  bool applied = false;  // coin outcome; always true for the non-coin kinds
};

// ------------------------------------------------------------ operations ---

// Replaces the true change markers with the same number of markers at
// seeded-random line positions, erasing the genuine location signal while
// keeping the marker count. When the count exceeds the line count every line
// is tagged and the surplus trails the sequence.
inline EncodedInput spurious_markers(const DatasetSample& sample, const Tokenizer& tok,
                                     uint64_t seed) {
  SplitMix64 rng = derive_rng(seed, sample.id);
  std::vector<std::string> lines = split_lines(sample.function_after);
  size_t n_lines = lines.size();
  size_t m = sample.added_lines_local.size();
  std::vector<size_t> chosen = sample_without_replacement(n_lines, std::min(m, n_lines), rng);
  std::vector<bool> tagged(n_lines, false);
  for (size_t idx : chosen) tagged[idx] = true;
  std::vector<std::string> tokens;
  for (size_t i = 0; i < n_lines; ++i) {
    if (tagged[i]) tokens.push_back(kChangeTag);
    detail::extend(tokens, tok.tokenize(lines[i]));
  }
  for (size_t i = n_lines; i < m; ++i) tokens.push_back(kChangeTag);
  return detail::finalize(sample.id, Encoding::AfterMarkers, std::move(tokens), tok.budget());
}

// With a seeded coin, exchanges which snapshot sits under which header; the
// side budgets stay attached to the slots, not the texts.
inline EncodedInput swap_snapshots(const DatasetSample& sample, const Tokenizer& tok, uint64_t seed,
                                   double probability, bool* swapped_out = nullptr) {
  SplitMix64 rng = derive_rng(seed, sample.id);
  bool swapped = rng.coin(probability);
  if (swapped_out != nullptr) *swapped_out = swapped;
  if (!swapped) return encode_before_after(sample, tok);
  DatasetSample exchanged = sample;
  std::swap(exchanged.function_before, exchanged.function_after);
  EncodedInput out = encode_before_after(exchanged, tok);
  out.sample_id = sample.id;
  return out;
}

// Inverts the polarity tags of a diff-tags sequence in place; everything
// else, including positions, is untouched. Applying it twice is the identity.
inline EncodedInput reverse_diff_tags(const EncodedInput& encoded) {
  if (encoded.encoding != Encoding::DiffTags)
    throw DataError("reverse_diff_tags: input is a '" + std::string(to_string(encoded.encoding)) +
                    "' sequence, not '" + to_string(Encoding::DiffTags) + "'");
  EncodedInput out = encoded;
  for (std::string& t : out.tokens) {
    if (t == kAddTag)
      t = kDelTag;
    else if (t == kDelTag)
      t = kAddTag;
  }
  return out;
}

// With a seeded coin, exchanges the contents under the added/deleted headers
// while the headers keep their places.
inline EncodedInput swap_blocks(const DatasetSample& sample, const Tokenizer& tok, uint64_t seed,
                                double probability, bool* swapped_out = nullptr) {
  SplitMix64 rng = derive_rng(seed, sample.id);
  bool swapped = rng.coin(probability);
  if (swapped_out != nullptr) *swapped_out = swapped;
  if (!swapped) return encode_added_deleted(sample, tok);
  DatasetSample exchanged = sample;
  std::swap(exchanged.function_before, exchanged.function_after);
  std::swap(exchanged.added_lines_local, exchanged.deleted_lines_local);
  EncodedInput out = encode_added_deleted(exchanged, tok);
  out.sample_id = sample.id;
  return out;
}

inline PerturbedInput perturb(const DatasetSample& sample, const Tokenizer& tok,
                              const PerturbationConfig& cfg) {
  cfg.validate();
  PerturbedInput out;
  out.kind = cfg.kind;
  out.phase = cfg.phase;
  out.seed = cfg.seed;
  switch (cfg.kind) {
    case Perturbation::SpuriousMarkers:
      out.input = spurious_markers(sample, tok, cfg.seed);
      out.applied = true;
      break;
    case Perturbation::SwappedSnapshots:
      out.input = swap_snapshots(sample, tok, cfg.seed, cfg.probability, &out.applied);
      break;
    case Perturbation::ReversedDiffTags:
      out.input = reverse_diff_tags(encode_diff_tags(sample, tok));
      out.applied = true;
      break;
    case Perturbation::SwappedBlocks:
      out.input = swap_blocks(sample, tok, cfg.seed, cfg.probability, &out.applied);
      break;
  }
  return out;
}

// ---------------------------------------------------------- serialization ---

inline constexpr const char* kPerturbedSchema = "perturbed-inputs";

inline Json perturbed_to_json(const PerturbedInput& p) {
  Json j = encoded_to_json(p.input);
  j["record"] = "perturbed";
  j["perturbation"] = to_string(p.kind);
  j["phase"] = to_string(p.phase);
  j["seed"] = p.seed;
  j["applied"] = p.applied;
  return j;
}

inline PerturbedInput perturbed_from_json(const Json& j, const std::string& where) {
  for (const char* f : {"perturbation", "phase", "seed", "applied"}) require_field(j, f, where);
  PerturbedInput p;
  p.input = encoded_from_json(j, where);
  p.kind = perturbation_from_string(j.at("perturbation").get<std::string>());
  p.phase = phase_from_string(j.at("phase").get<std::string>());
  p.seed = j.at("seed").get<uint64_t>();
  p.applied = j.at("applied").get<bool>();
  // Phase gating is checked on read as well, so a ledger that claims a
  // test-only perturbation was applied in training fails loudly.
  if (p.phase == Phase::train && !allowed_in_train(p.kind))
    throw DataError(where + ": test-only perturbation '" + to_string(p.kind) +
                    "' recorded against a training output");
  return p;
}

}  // namespace revlab
