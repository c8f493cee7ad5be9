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

// k-fold cross-validation of one model kind over a tabular dataset.

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sra/dataset.hpp"
#include "sra/folds.hpp"
#include "sra/metrics.hpp"
#include "sra/model.hpp"
#include "sra/preprocess.hpp"
#include "sra/rng.hpp"
#include "sra/training.hpp"

namespace sra {

struct CvOptions {
  ModelKind model = ModelKind::kSraLinear;
  std::size_t dk = 8;
  std::size_t folds = 5;
  std::size_t jobs = 1;
  // Selection metric; unset picks aucroc for binary targets, mse otherwise.
  std::optional<Metric> metric;
  TrainConfig train;  // train.seed is the master seed
};

struct FoldResult {
  std::size_t fold = 0;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  Preprocessor preprocessor;
  AnyModel model;
  TrainLog log;
  double test_score = 0.0;  // reported metric on the held-out fold
};

struct CvResult {
  TaskKind task = TaskKind::kBinary;
  Metric selection = Metric::kAucRoc;
  std::vector<FoldResult> folds;
  metrics::CvReport report;
};

/// Name of the metric reported on test folds: the selection metric for
/// binary tasks, r2 for regression.
inline std::string reported_metric(TaskKind task, Metric selection) {
  return task == TaskKind::kRegression ? "r2" : std::string(metric_name(selection));
}

inline double score_predictions(TaskKind task, Metric selection, std::span<const double> pred,
                                std::span<const double> y) {
  if (task == TaskKind::kRegression) return metrics::r2(y, pred);
  return selection == Metric::kAucPr ? metrics::auc_pr(pred, y) : metrics::auc_roc(pred, y);
}

/// Trains and scores one fold. The preprocessor is fitted on the training
/// rows only; early stopping uses a validation slice of those rows.
inline FoldResult run_fold(const TabularDataset& data, const Split& split, std::size_t fold,
                           TaskKind task, Metric selection, const CvOptions& opt) {
  const bool stratify = task == TaskKind::kBinary;
  const std::uint64_t fold_seed = derive_seed(opt.train.seed, "fold" + std::to_string(fold));
  FoldResult r{fold, split.train, split.test, {}, LinearModel{}, {}, 0.0};

  const TabularDataset train_part = data.subset(split.train);
  const TabularDataset test_part = data.subset(split.test);
  r.preprocessor.fit(train_part);
  const Tensor x_train = r.preprocessor.transform(train_part);
  const Split inner = validation_split(train_part.target, opt.train.val_fraction, fold_seed, stratify);

  auto pick = [&](const std::vector<std::size_t>& rows) {
    std::vector<double> y;
    y.reserve(rows.size());
    for (std::size_t i : rows) y.push_back(train_part.target[i]);
    return XY{x_train.gather_rows(rows), std::move(y)};
  };
  const XY fit = pick(inner.train);
  const XY val = pick(inner.test);

  TrainConfig cfg = opt.train;
  cfg.seed = fold_seed;
  cfg.metric = selection;
  const AnyModel initial = init_model(opt.model, x_train.cols(), opt.dk, task, fold_seed);
  TrainResult<AnyModel> trained = train_any(initial, fit, val, cfg);
  r.model = std::move(trained.model);
  r.log = std::move(trained.log);

  const Tensor x_test = r.preprocessor.transform(test_part);
  const std::vector<double> pred =
      std::visit([&](const auto& m) { return predict(m, x_test); }, r.model);
  r.test_score = score_predictions(task, selection, pred, test_part.target);
  return r;
}

/// Stratified (binary) or plain (regression) k-fold cross-validation. Folds
/// run on up to `jobs` threads; each fold is seeded independently, so the
/// result does not depend on the job count.
inline CvResult cross_validate(const TabularDataset& data, const CvOptions& opt) {
  opt.train.validate();
  if (opt.folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  CvResult out;
  out.task = data.infer_task();
  out.selection = opt.metric.value_or(out.task == TaskKind::kBinary ? Metric::kAucRoc
                                                                    : Metric::kMse);
  check_metric_task(out.selection, out.task);
  if (opt.model == ModelKind::kSraLinear) EncoderConfig{1, opt.dk}.validate();

  const std::vector<Split> splits =
      stratified_kfold(data.target, opt.folds, opt.train.seed, out.task == TaskKind::kBinary);
  std::vector<std::optional<FoldResult>> slots(splits.size());
  std::vector<std::exception_ptr> errors(splits.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t f; (f = next.fetch_add(1)) < splits.size();) {
      try {
        slots[f] = run_fold(data, splits[f], f, out.task, out.selection, opt);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(opt.jobs, 1, splits.size());
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  out.report.model = std::string(model_name(opt.model));
  out.report.metric = reported_metric(out.task, out.selection);
  for (auto& s : slots) {
    out.report.folds.push_back(s->test_score);
    out.folds.push_back(std::move(*s));
  }
  return out;
}

}  // namespace sra
