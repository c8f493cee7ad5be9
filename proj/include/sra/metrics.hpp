/*
 * Copyright 2026 The SRA Tabular Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sra/errors.hpp"
#include "sra/format.hpp"
#include "sra/tensor.hpp"

namespace sra::metrics {

namespace detail {

inline void check_lengths(std::size_t a, std::size_t b, const char* who) {
  if (a != b) {
    throw std::invalid_argument(std::string(who) + ": scores and labels differ in length (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

/// Indices ordered by score; ties keep input order.
inline std::vector<std::size_t> order_by_score(std::span<const double> scores,
                                               bool descending) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return descending ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  return idx;
}

}  // namespace detail

/// Mann-Whitney AUC: P(s+ > s-) + 0.5 P(s+ == s-), from average ranks.
inline double auc_roc(std::span<const double> scores, std::span<const double> labels) {
  detail::check_lengths(scores.size(), labels.size(), "auc_roc");
  const auto idx = detail::order_by_score(scores, false);
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t start = 0; start < idx.size();) {
    std::size_t stop = start + 1;
    while (stop < idx.size() && scores[idx[stop]] == scores[idx[start]]) ++stop;
    // ranks start+1 .. stop share their mean
    const double rank = 0.5 * static_cast<double>(start + 1 + stop);
    for (std::size_t i = start; i < stop; ++i) {
      if (labels[idx[i]] > 0.5) {
        pos_rank_sum += rank;
        ++n_pos;
      }
    }
    start = stop;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw std::invalid_argument("auc_roc requires both classes to be present");
  }
  const double np = static_cast<double>(n_pos);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

/// Average precision: sum_k (R_k - R_{k-1}) P_k over descending-score cut
/// points, with equal scores forming a single cut.
inline double auc_pr(std::span<const double> scores, std::span<const double> labels) {
  detail::check_lengths(scores.size(), labels.size(), "auc_pr");
  std::size_t n_pos = 0;
  for (double y : labels) n_pos += y > 0.5;
  if (n_pos == 0) throw std::invalid_argument("auc_pr requires at least one positive");
  const auto idx = detail::order_by_score(scores, true);
  double ap = 0.0, prev_recall = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t start = 0; start < idx.size();) {
    std::size_t stop = start;
    while (stop < idx.size() && scores[idx[stop]] == scores[idx[start]]) {
      tp += labels[idx[stop]] > 0.5;
      ++stop;
    }
    seen = stop;
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    start = stop;
  }
  return ap;
}

inline double r2(std::span<const double> y, std::span<const double> pred) {
  detail::check_lengths(y.size(), pred.size(), "r2");
  if (y.empty()) throw std::invalid_argument("r2 of an empty sample");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - pred[i]) * (y[i] - pred[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot == 0.0) throw std::invalid_argument("r2 is undefined for a constant target");
  return 1.0 - ss_res / ss_tot;
}

inline double mse(std::span<const double> y, std::span<const double> pred) {
  detail::check_lengths(y.size(), pred.size(), "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - pred[i]) * (y[i] - pred[i]);
  return y.empty() ? 0.0 : s / static_cast<double>(y.size());
}

/// Fraction of probabilities on the correct side of 0.5.
inline double accuracy(std::span<const double> prob, std::span<const double> labels) {
  detail::check_lengths(prob.size(), labels.size(), "accuracy");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < prob.size(); ++i) ok += (prob[i] > 0.5) == (labels[i] > 0.5);
  return prob.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(prob.size());
}

enum class TprMode {
  kRecall,     // per instance |top-k ∩ relevant| / |relevant|
  kStrictSet,  // per instance 1 iff top-k == relevant
};

/// Top-k feature indices of one row by |contribution|, ties to lower index.
inline std::vector<std::size_t> top_k_features(std::span<const double> contributions,
                                               std::size_t k,
                                               std::span<const std::size_t> candidates = {}) {
  std::vector<std::size_t> idx;
  if (candidates.empty()) {
    idx.resize(contributions.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
  } else {
    idx.assign(candidates.begin(), candidates.end());
    std::sort(idx.begin(), idx.end());
  }
  if (k > idx.size()) {
    throw std::invalid_argument("top-k: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(idx.size()) + " candidate features");
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(contributions[a]) > std::abs(contributions[b]);
  });
  idx.resize(k);
  return idx;
}

/// Feature-identification rate over the rows of an (n x p) contribution
/// matrix. Features are ranked by absolute contribution; `candidates`, when
/// non-empty, restricts the ranking to those feature indices.
inline double tpr_topk(const Tensor& contributions, std::span<const std::size_t> relevant,
                       std::size_t k, TprMode mode = TprMode::kRecall,
                       std::span<const std::size_t> candidates = {}) {
  const std::size_t p = contributions.cols();
  if (k > p) {
    throw std::invalid_argument("tpr_topk: k=" + std::to_string(k) + " exceeds p=" +
                                std::to_string(p));
  }
  if (relevant.empty()) throw std::invalid_argument("tpr_topk: empty relevant set");
  for (std::size_t r : relevant) {
    if (r >= p) throw std::out_of_range("tpr_topk: relevant feature index out of range");
  }
  const std::size_t n = contributions.rows();
  if (n == 0) return 0.0;
  double hits = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto top = top_k_features(contributions.row(i), k, candidates);
    std::size_t found = 0;
    for (std::size_t r : relevant) found += std::find(top.begin(), top.end(), r) != top.end();
    if (mode == TprMode::kRecall) {
      hits += static_cast<double>(found) / static_cast<double>(relevant.size());
    } else {
      hits += (found == relevant.size() && top.size() == relevant.size()) ? 1.0 : 0.0;
    }
  }
  return hits / static_cast<double>(n);
}

/// Per-fold cross-validation results for one model and metric.
struct CvReport {
  std::string model;
  std::string metric;
  std::vector<double> folds;

  double mean() const {
    if (folds.empty()) return 0.0;
    double s = 0.0;
    for (double v : folds) s += v;
    return s / static_cast<double>(folds.size());
  }

  /// Sample standard deviation across folds.
  double std() const {
    if (folds.size() < 2) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (double v : folds) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(folds.size() - 1));
  }

  /// CSV rows "model,metric,fold,value" followed by mean and std rows.
  void write_csv(std::ostream& out, bool header = true) const {
    if (header) out << "model,metric,fold,value\n";
    for (std::size_t f = 0; f < folds.size(); ++f) {
      out << model << ',' << metric << ',' << f << ',' << format_double(folds[f]) << '\n';
    }
    out << model << ',' << metric << ",mean," << format_double(mean()) << '\n';
    out << model << ',' << metric << ",std," << format_double(std()) << '\n';
  }
};

}  // namespace sra::metrics
