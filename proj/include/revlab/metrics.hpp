#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "revlab/errors.hpp"

namespace revlab {

// Binary-classification counts. All metric denominators can legitimately be
// zero on small fixtures, so metric accessors return a flagged zero instead
// of throwing (see MetricValue).
struct Confusion {
  int64_t tp = 0;
  int64_t tn = 0;
  int64_t fp = 0;
  int64_t fn = 0;

  int64_t total() const { return tp + tn + fp + fn; }
  bool operator==(const Confusion&) const = default;
};

// A metric together with a degeneracy flag. `degenerate` means the defining
// ratio was 0/0 and the value was pinned to 0 so downstream aggregation
// stays total; callers that care can surface the flag.
struct MetricValue {
  double value = 0.0;
  bool degenerate = false;

  bool operator==(const MetricValue&) const = default;
};

namespace detail {

inline void check_binary_labels(const std::vector<int>& labels) {
  for (int y : labels) {
    if (y != 0 && y != 1) {
      throw DataError("metrics: labels must be 0 or 1, got " + std::to_string(y));
    }
  }
}

}  // namespace detail

// Threshold scores at `threshold` (score >= threshold predicts positive) and
// tally the confusion counts against binary labels.
inline Confusion confusion(const std::vector<double>& scores, const std::vector<int>& labels,
                           double threshold = 0.5) {
  if (scores.empty()) throw DataError("metrics: empty input");
  if (scores.size() != labels.size()) {
    throw DataError("metrics: " + std::to_string(scores.size()) + " scores vs " +
                    std::to_string(labels.size()) + " labels");
  }
  detail::check_binary_labels(labels);
  Confusion c;
  for (size_t i = 0; i < scores.size(); ++i) {
    bool pred = scores[i] >= threshold;
    if (pred && labels[i] == 1) ++c.tp;
    else if (pred && labels[i] == 0) ++c.fp;
    else if (!pred && labels[i] == 1) ++c.fn;
    else ++c.tn;
  }
  return c;
}

inline MetricValue accuracy(const Confusion& c) {
  int64_t n = c.total();
  if (n == 0) return {0.0, true};
  return {static_cast<double>(c.tp + c.tn) / static_cast<double>(n), false};
}

inline MetricValue precision(const Confusion& c) {
  int64_t d = c.tp + c.fp;
  if (d == 0) return {0.0, true};
  return {static_cast<double>(c.tp) / static_cast<double>(d), false};
}

inline MetricValue recall(const Confusion& c) {
  int64_t d = c.tp + c.fn;
  if (d == 0) return {0.0, true};
  return {static_cast<double>(c.tp) / static_cast<double>(d), false};
}

inline MetricValue f1(const Confusion& c) {
  MetricValue p = precision(c);
  MetricValue r = recall(c);
  double denom = p.value + r.value;
  if (denom == 0.0) return {0.0, true};
  return {2.0 * p.value * r.value / denom, false};
}

// Area under the precision-recall curve as average precision: instances are
// ranked by descending score, equal scores form one group (no instance-order
// luck inside a tie), and each group contributes (delta recall) * (precision
// after the group). Requires at least one positive label.
inline double pr_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.empty()) throw DataError("pr_auc: empty input");
  if (scores.size() != labels.size()) {
    throw DataError("pr_auc: " + std::to_string(scores.size()) + " scores vs " +
                    std::to_string(labels.size()) + " labels");
  }
  detail::check_binary_labels(labels);
  int64_t positives = 0;
  for (int y : labels) positives += y;
  if (positives == 0) throw DataError("pr_auc: no positive labels");

  std::vector<size_t> order(scores.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  double prev_recall = 0.0;
  int64_t tp = 0;
  int64_t seen = 0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      tp += labels[order[j]];
      ++seen;
      ++j;
    }
    double prec = static_cast<double>(tp) / static_cast<double>(seen);
    double rec = static_cast<double>(tp) / static_cast<double>(positives);
    ap += (rec - prev_recall) * prec;
    prev_recall = rec;
    i = j;
  }
  return ap;
}

}  // namespace revlab
