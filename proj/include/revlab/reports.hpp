#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "revlab/errors.hpp"
#include "revlab/jsonl.hpp"
#include "revlab/metrics.hpp"
#include "revlab/stats.hpp"

namespace revlab {

// ---------------------------------------------------------------------------
// Score-file records. Two shapes are accepted: precomputed per-condition
// metric values, and raw per-sample predictions that get reduced to metric
// values per (model, encoding, seed) group.
// ---------------------------------------------------------------------------

struct ScoreRecord {
  std::string model;
  std::string encoding;
  int64_t seed = 0;
  std::string metric;
  double value = 0.0;

  bool operator==(const ScoreRecord&) const = default;
};

struct PredictionRecord {
  std::string model;
  std::string encoding;
  int64_t seed = 0;
  std::string sample_id;
  double score = 0.0;
  int label = 0;
};

namespace detail {

inline const Json& require_key(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw DataError("schema mismatch at " + where + ": missing field '" + key + "'");
  }
  return *it;
}

}  // namespace detail

inline Json score_record_to_json(const ScoreRecord& r) {
  return Json{{"model", r.model},
              {"encoding", r.encoding},
              {"seed", r.seed},
              {"metric", r.metric},
              {"value", r.value}};
}

inline ScoreRecord score_record_from_json(const Json& j, const std::string& where) {
  try {
    ScoreRecord r;
    r.model = detail::require_key(j, "model", where).get<std::string>();
    r.encoding = detail::require_key(j, "encoding", where).get<std::string>();
    r.seed = detail::require_key(j, "seed", where).get<int64_t>();
    r.metric = detail::require_key(j, "metric", where).get<std::string>();
    r.value = detail::require_key(j, "value", where).get<double>();
    return r;
  } catch (const Json::exception& e) {
    throw DataError("schema mismatch at " + where + ": " + e.what());
  }
}

inline PredictionRecord prediction_record_from_json(const Json& j, const std::string& where) {
  try {
    PredictionRecord r;
    r.model = detail::require_key(j, "model", where).get<std::string>();
    r.encoding = detail::require_key(j, "encoding", where).get<std::string>();
    r.seed = detail::require_key(j, "seed", where).get<int64_t>();
    r.sample_id = detail::require_key(j, "sample_id", where).get<std::string>();
    r.score = detail::require_key(j, "score", where).get<double>();
    r.label = detail::require_key(j, "label", where).get<int>();
    if (r.label != 0 && r.label != 1) {
      throw DataError("schema mismatch at " + where + ": label must be 0 or 1");
    }
    return r;
  } catch (const Json::exception& e) {
    throw DataError("schema mismatch at " + where + ": " + e.what());
  }
}

// A record carrying "value" is a precomputed score; one carrying "score" and
// "label" is a raw prediction.
inline bool looks_like_prediction(const Json& j) {
  return j.contains("score") && j.contains("label") && !j.contains("value");
}

// Reduces raw predictions to one metric value per (model, encoding, seed)
// group. Supported metrics: accuracy, precision, recall, f1 (thresholded at
// `threshold`), and pr-auc (threshold-free).
inline std::vector<ScoreRecord> reduce_predictions(const std::vector<PredictionRecord>& preds,
                                                   const std::string& metric,
                                                   double threshold = 0.5) {
  static const std::set<std::string> kKnown = {"accuracy", "precision", "recall", "f1", "pr-auc"};
  if (!kKnown.count(metric)) {
    throw ConfigError("unknown metric '" + metric + "' (choose accuracy, precision, recall, f1, pr-auc)");
  }
  std::map<std::tuple<std::string, std::string, int64_t>, std::pair<std::vector<double>, std::vector<int>>>
      groups;
  for (const PredictionRecord& p : preds) {
    auto& g = groups[{p.model, p.encoding, p.seed}];
    g.first.push_back(p.score);
    g.second.push_back(p.label);
  }
  std::vector<ScoreRecord> out;
  out.reserve(groups.size());
  for (const auto& [key, data] : groups) {
    double value = 0.0;
    if (metric == "pr-auc") {
      value = pr_auc(data.first, data.second);
    } else {
      Confusion c = confusion(data.first, data.second, threshold);
      if (metric == "accuracy") value = accuracy(c).value;
      else if (metric == "precision") value = precision(c).value;
      else if (metric == "recall") value = recall(c).value;
      else value = f1(c).value;
    }
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), metric, value});
  }
  return out;
}

// Arranges score records into a complete subjects x models x encodings matrix
// for the repeated-measures analysis. Models and encodings are ordered
// lexically, seeds numerically; every (model, encoding, seed) cell must be
// present exactly once with the requested metric.
inline ScoreMatrix build_score_matrix(const std::vector<ScoreRecord>& records,
                                      const std::string& metric) {
  std::set<std::string> model_set, encoding_set;
  std::set<int64_t> seed_set;
  for (const ScoreRecord& r : records) {
    if (r.metric != metric) continue;
    model_set.insert(r.model);
    encoding_set.insert(r.encoding);
    seed_set.insert(r.seed);
  }
  if (model_set.empty()) {
    throw DataError("score matrix: no records with metric '" + metric + "'");
  }
  ScoreMatrix mat = ScoreMatrix::zeros(seed_set.size(), model_set.size(), encoding_set.size());
  mat.model_names.assign(model_set.begin(), model_set.end());
  mat.encoding_names.assign(encoding_set.begin(), encoding_set.end());
  mat.seed_ids.assign(seed_set.begin(), seed_set.end());

  auto index_of = [](const auto& names, const auto& value) {
    return static_cast<size_t>(std::lower_bound(names.begin(), names.end(), value) - names.begin());
  };
  std::vector<bool> filled(mat.values.size(), false);
  for (const ScoreRecord& r : records) {
    if (r.metric != metric) continue;
    size_t s = index_of(mat.seed_ids, r.seed);
    size_t m = index_of(mat.model_names, r.model);
    size_t e = index_of(mat.encoding_names, r.encoding);
    size_t idx = (s * mat.models + m) * mat.encodings + e;
    if (filled[idx]) {
      throw DataError("score matrix: duplicate cell model=" + r.model + " encoding=" + r.encoding +
                      " seed=" + std::to_string(r.seed));
    }
    filled[idx] = true;
    mat.values[idx] = r.value;
  }
  for (size_t s = 0; s < mat.subjects; ++s)
    for (size_t m = 0; m < mat.models; ++m)
      for (size_t e = 0; e < mat.encodings; ++e) {
        if (!filled[(s * mat.models + m) * mat.encodings + e]) {
          throw DataError("score matrix: missing cell model=" + mat.model_names[m] +
                          " encoding=" + mat.encoding_names[e] +
                          " seed=" + std::to_string(mat.seed_ids[s]));
        }
      }
  mat.validate();
  return mat;
}

// ---------------------------------------------------------------------------
// Text rendering helpers.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt_fixed(double v, int precision) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

inline std::string fmt_sig(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Renders rows as an aligned table: first row is the header, every column is
// padded to its widest cell, columns separated by two spaces.
inline std::string align_table(const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return "";
  std::vector<size_t> widths;
  for (const auto& row : rows) {
    if (widths.size() < row.size()) widths.resize(row.size(), 0);
    for (size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += "  ";
      out += row[c];
      if (c + 1 < row.size()) out.append(widths[c] - row[c].size(), ' ');
    }
    out += '\n';
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Per-condition score summary (one row per model, one column per encoding,
// cells mean +/- sd over seeds).
// ---------------------------------------------------------------------------

struct ConditionSummary {
  std::string model;
  std::string encoding;
  double mean = 0.0;
  double sd = 0.0;
  size_t seeds = 0;
};

inline std::vector<ConditionSummary> condition_summaries(const ScoreMatrix& mat) {
  mat.validate();
  std::vector<ConditionSummary> out;
  for (size_t m = 0; m < mat.models; ++m)
    for (size_t e = 0; e < mat.encodings; ++e) {
      ConditionSummary c;
      c.model = m < mat.model_names.size() ? mat.model_names[m] : "model-" + std::to_string(m + 1);
      c.encoding =
          e < mat.encoding_names.size() ? mat.encoding_names[e] : "encoding-" + std::to_string(e + 1);
      c.seeds = mat.subjects;
      double sum = 0.0;
      for (size_t s = 0; s < mat.subjects; ++s) sum += mat.at(s, m, e);
      c.mean = sum / static_cast<double>(mat.subjects);
      double ss = 0.0;
      for (size_t s = 0; s < mat.subjects; ++s) {
        double d = mat.at(s, m, e) - c.mean;
        ss += d * d;
      }
      c.sd = mat.subjects > 1 ? std::sqrt(ss / static_cast<double>(mat.subjects - 1)) : 0.0;
      out.push_back(std::move(c));
    }
  return out;
}

inline std::string render_condition_table(const ScoreMatrix& mat) {
  std::vector<ConditionSummary> cells = condition_summaries(mat);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"model"};
  for (size_t e = 0; e < mat.encodings; ++e) {
    header.push_back(e < mat.encoding_names.size() ? mat.encoding_names[e]
                                                   : "encoding-" + std::to_string(e + 1));
  }
  rows.push_back(std::move(header));
  for (size_t m = 0; m < mat.models; ++m) {
    std::vector<std::string> row;
    row.push_back(cells[m * mat.encodings].model);
    for (size_t e = 0; e < mat.encodings; ++e) {
      const ConditionSummary& c = cells[m * mat.encodings + e];
      row.push_back(detail::fmt_fixed(c.mean, 4) + " +/- " + detail::fmt_fixed(c.sd, 4));
    }
    rows.push_back(std::move(row));
  }
  return detail::align_table(rows);
}

inline std::vector<Json> condition_rows(const ScoreMatrix& mat) {
  std::vector<Json> out;
  for (const ConditionSummary& c : condition_summaries(mat)) {
    out.push_back(Json{{"record", "condition"},
                       {"model", c.model},
                       {"encoding", c.encoding},
                       {"mean", c.mean},
                       {"sd", c.sd},
                       {"seeds", c.seeds}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// ANOVA effect table.
// ---------------------------------------------------------------------------

inline std::string render_anova_table(const std::vector<AnovaEffect>& effects) {
  std::vector<std::vector<std::string>> rows;
  bool with_gg = false;
  for (const AnovaEffect& e : effects) {
    if (e.gg_epsilon) with_gg = true;
  }
  std::vector<std::string> header{"effect", "F", "df", "p", "partial-eta-sq", "cohens-f"};
  if (with_gg) {
    header.push_back("gg-epsilon");
    header.push_back("gg-p");
  }
  rows.push_back(std::move(header));
  for (const AnovaEffect& e : effects) {
    std::vector<std::string> row{
        e.name,
        detail::fmt_fixed(e.f_stat, 2),
        "(" + std::to_string(e.df_num) + ", " + std::to_string(e.df_den) + ")",
        detail::fmt_sig(e.p),
        detail::fmt_fixed(e.partial_eta_sq, 2),
        detail::fmt_fixed(e.cohens_f, 2)};
    if (with_gg) {
      row.push_back(e.gg_epsilon ? detail::fmt_fixed(*e.gg_epsilon, 3) : "-");
      row.push_back(e.gg_p ? detail::fmt_sig(*e.gg_p) : "-");
    }
    rows.push_back(std::move(row));
  }
  return detail::align_table(rows);
}

inline std::vector<Json> anova_rows(const std::vector<AnovaEffect>& effects) {
  std::vector<Json> out;
  for (const AnovaEffect& e : effects) {
    Json j{{"record", "anova-effect"},
           {"effect", e.name},
           {"f", e.f_stat},
           {"df_num", e.df_num},
           {"df_den", e.df_den},
           {"p", e.p},
           {"partial_eta_sq", e.partial_eta_sq},
           {"cohens_f", e.cohens_f},
           {"ss_effect", e.ss_effect},
           {"ss_error", e.ss_error}};
    if (e.gg_epsilon) {
      j["gg_epsilon"] = *e.gg_epsilon;
      j["gg_p"] = *e.gg_p;
    }
    out.push_back(std::move(j));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Perturbation comparison table (percent change rendered to two decimals).
// ---------------------------------------------------------------------------

inline std::string render_stage2_table(const std::vector<Stage2Row>& rows) {
  std::vector<std::vector<std::string>> table;
  table.push_back({"perturbation", "mean-orig", "mean-pert", "change-%", "t", "p", "p-holm",
                   "wilcoxon-p", "wilcoxon-p-holm", "cohens-dz", "ci95"});
  for (const Stage2Row& r : rows) {
    table.push_back({r.name,
                     detail::fmt_fixed(r.mean_orig, 4),
                     detail::fmt_fixed(r.mean_pert, 4),
                     detail::fmt_fixed(r.percent_change, 2),
                     detail::fmt_fixed(r.test.t, 2),
                     detail::fmt_sig(r.test.p_one_sided),
                     detail::fmt_sig(r.test.p_holm),
                     detail::fmt_sig(r.test.wilcoxon_p),
                     detail::fmt_sig(r.test.wilcoxon_p_holm),
                     r.test.dz_undefined ? "undefined" : detail::fmt_fixed(r.test.cohens_dz, 2),
                     "[" + detail::fmt_fixed(r.test.ci_lo, 4) + ", " +
                         detail::fmt_fixed(r.test.ci_hi, 4) + "]"});
  }
  return detail::align_table(table);
}

inline std::vector<Json> stage2_rows_json(const std::vector<Stage2Row>& rows) {
  std::vector<Json> out;
  for (const Stage2Row& r : rows) {
    out.push_back(Json{{"record", "perturbation-comparison"},
                       {"perturbation", r.name},
                       {"mean_orig", r.mean_orig},
                       {"mean_pert", r.mean_pert},
                       {"percent_change", r.percent_change},
                       {"n", r.test.n},
                       {"mean_delta", r.test.mean_delta},
                       {"t", std::isfinite(r.test.t) ? Json(r.test.t)
                                                     : Json(r.test.t > 0 ? "inf" : "-inf")},
                       {"p_one_sided", r.test.p_one_sided},
                       {"p_holm", r.test.p_holm},
                       {"wilcoxon_stat", r.test.wilcoxon_stat},
                       {"wilcoxon_p", r.test.wilcoxon_p},
                       {"wilcoxon_p_holm", r.test.wilcoxon_p_holm},
                       {"wilcoxon_exact", r.test.wilcoxon_exact},
                       {"cohens_dz", r.test.cohens_dz},
                       {"dz_undefined", r.test.dz_undefined},
                       {"ci_lo", r.test.ci_lo},
                       {"ci_hi", r.test.ci_hi}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stage-2 pairing specification: which two (model, encoding) conditions form
// each original-versus-perturbed comparison. Parsed from a JSON array of
// {name, orig: {model, encoding}, pert: {model, encoding}} objects.
// ---------------------------------------------------------------------------

struct PairSpec {
  std::string name;
  std::string orig_model, orig_encoding;
  std::string pert_model, pert_encoding;
};

inline std::vector<PairSpec> parse_pair_specs(const Json& j, const std::string& where) {
  if (!j.is_array()) throw DataError("pair spec at " + where + ": expected a JSON array");
  std::vector<PairSpec> out;
  std::set<std::string> names;
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    const Json& entry = j[i];
    try {
      PairSpec spec;
      spec.name = detail::require_key(entry, "name", at).get<std::string>();
      const Json& orig = detail::require_key(entry, "orig", at);
      const Json& pert = detail::require_key(entry, "pert", at);
      spec.orig_model = detail::require_key(orig, "model", at + ".orig").get<std::string>();
      spec.orig_encoding = detail::require_key(orig, "encoding", at + ".orig").get<std::string>();
      spec.pert_model = detail::require_key(pert, "model", at + ".pert").get<std::string>();
      spec.pert_encoding = detail::require_key(pert, "encoding", at + ".pert").get<std::string>();
      if (!names.insert(spec.name).second) {
        throw DataError("pair spec at " + at + ": duplicate name '" + spec.name + "'");
      }
      out.push_back(std::move(spec));
    } catch (const Json::exception& e) {
      throw DataError("pair spec at " + at + ": " + e.what());
    }
  }
  if (out.empty()) throw DataError("pair spec at " + where + ": no comparisons defined");
  return out;
}

// Extracts the per-seed series for each pairing from score records; both
// sides of a pair must cover exactly the same seeds (the pairing unit).
inline std::vector<PairedSeries> pair_series(const std::vector<ScoreRecord>& records,
                                             const std::vector<PairSpec>& specs,
                                             const std::string& metric) {
  std::map<std::tuple<std::string, std::string, int64_t>, double> by_key;
  for (const ScoreRecord& r : records) {
    if (r.metric != metric) continue;
    auto key = std::make_tuple(r.model, r.encoding, r.seed);
    if (!by_key.emplace(key, r.value).second) {
      throw DataError("scores: duplicate record model=" + r.model + " encoding=" + r.encoding +
                      " seed=" + std::to_string(r.seed));
    }
  }
  auto seeds_of = [&](const std::string& model, const std::string& encoding) {
    std::vector<int64_t> seeds;
    for (const auto& [key, value] : by_key) {
      if (std::get<0>(key) == model && std::get<1>(key) == encoding) {
        seeds.push_back(std::get<2>(key));
      }
    }
    return seeds;  // map iteration yields them sorted
  };

  std::vector<PairedSeries> out;
  for (const PairSpec& spec : specs) {
    std::vector<int64_t> orig_seeds = seeds_of(spec.orig_model, spec.orig_encoding);
    std::vector<int64_t> pert_seeds = seeds_of(spec.pert_model, spec.pert_encoding);
    if (orig_seeds.empty()) {
      throw DataError("pair '" + spec.name + "': no scores for model=" + spec.orig_model +
                      " encoding=" + spec.orig_encoding + " metric=" + metric);
    }
    if (orig_seeds != pert_seeds) {
      throw DataError("pair '" + spec.name + "': seed sets differ between original and perturbed");
    }
    PairedSeries series;
    series.name = spec.name;
    for (int64_t s : orig_seeds) {
      series.orig.push_back(by_key.at({spec.orig_model, spec.orig_encoding, s}));
      series.pert.push_back(by_key.at({spec.pert_model, spec.pert_encoding, s}));
    }
    out.push_back(std::move(series));
  }
  return out;
}

}  // namespace revlab
