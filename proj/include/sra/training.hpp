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

// Mini-batch Adam training with decoupled weight decay, encoder dropout and
// early stopping on a held-out validation split.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "sra/errors.hpp"
#include "sra/format.hpp"
#include "sra/metrics.hpp"
#include "sra/model.hpp"
#include "sra/rng.hpp"
#include "sra/tape.hpp"

namespace sra {

enum class Metric { kAucRoc, kAucPr, kMse };

inline std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kAucRoc: return "aucroc";
    case Metric::kAucPr: return "aucpr";
    case Metric::kMse: return "mse";
  }
  return "unknown";
}

inline Metric parse_metric(std::string_view s) {
  if (s == "aucroc") return Metric::kAucRoc;
  if (s == "aucpr") return Metric::kAucPr;
  if (s == "mse") return Metric::kMse;
  throw ConfigError("unknown metric '" + std::string(s) + "'");
}

inline bool higher_is_better(Metric m) { return m != Metric::kMse; }

inline void check_metric_task(Metric m, TaskKind task) {
  if ((m == Metric::kMse) != (task == TaskKind::kRegression)) {
    throw ConfigError("metric '" + std::string(metric_name(m)) +
                      "' does not apply to a " + std::string(task_name(task)) + " task");
  }
}

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
};

struct TrainConfig {
  AdamConfig adam;
  std::size_t batch_size = 256;
  std::size_t max_epochs = 200;
  double dropout = 0.1;
  std::size_t patience = 20;
  double val_fraction = 0.1;
  Metric metric = Metric::kAucRoc;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(adam.lr >= 0 && adam.weight_decay >= 0 && adam.eps >= 0 && dropout >= 0)) {
      throw ConfigError("training rates must be non-negative");
    }
    if (dropout >= 1.0) throw ConfigError("dropout rate must be < 1");
    if (!(val_fraction > 0.0 && val_fraction <= 0.5)) {
      throw ConfigError("validation fraction must lie in (0, 0.5]");
    }
    if (batch_size == 0) throw ConfigError("batch size must be positive");
  }
};

struct AdamState {
  struct Moments {
    Tensor m;
    Tensor v;
  };
  std::map<std::string, Moments> moments;
  std::uint64_t t = 0;
};

/// One Adam step with bias correction. Parameters flagged `decay` also lose
/// lr * weight_decay * theta (decoupled from the gradient moments).
inline void adam_step(AdamState& state, std::vector<Parameter>& params,
                      const Gradients& grads, const AdamConfig& cfg) {
  ++state.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (Parameter& p : params) {
    auto it = grads.find(p.name);
    if (it == grads.end()) throw std::invalid_argument("no gradient for '" + p.name + "'");
    const Tensor& g = it->second;
    if (g.shape() != p.value.shape()) {
      throw ShapeError("adam_step: gradient of '" + p.name + "' has shape " + g.shape().str() +
                       ", parameter has " + p.value.shape().str());
    }
    auto [mit, fresh] = state.moments.try_emplace(p.name);
    if (fresh) {
      mit->second.m = Tensor(p.value.shape());
      mit->second.v = Tensor(p.value.shape());
    }
    Tensor& m = mit->second.m;
    Tensor& v = mit->second.v;
    const double decay = p.decay ? cfg.lr * cfg.weight_decay : 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p.value[i] -= decay * p.value[i] + cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

/// Features and targets for one side of a split.
struct XY {
  Tensor x;
  std::vector<double> y;

  std::size_t size() const { return y.size(); }
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_metric = 0.0;
  bool is_best = false;
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 0 when no epoch ran

  void write_csv(std::ostream& out) const {
    out << "epoch,train_loss,val_metric,is_best\n";
    for (const auto& e : epochs) {
      out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.val_metric)
          << ',' << (e.is_best ? 1 : 0) << '\n';
    }
  }

  friend bool operator==(const TrainLog& a, const TrainLog& b) {
    if (a.best_epoch != b.best_epoch || a.epochs.size() != b.epochs.size()) return false;
    for (std::size_t i = 0; i < a.epochs.size(); ++i) {
      const auto& x = a.epochs[i];
      const auto& y = b.epochs[i];
      if (x.epoch != y.epoch || x.train_loss != y.train_loss || x.val_metric != y.val_metric ||
          x.is_best != y.is_best) {
        return false;
      }
    }
    return true;
  }
};

template <class M>
struct TrainResult {
  M model;
  TrainLog log;
};

/// Metric of `model` on (x, y): AUCs on probabilities, MSE on predictions.
template <class M>
double evaluate_metric(const M& model, const XY& data, Metric metric) {
  const std::vector<double> out = predict(model, data.x);
  switch (metric) {
    case Metric::kAucRoc: return metrics::auc_roc(out, data.y);
    case Metric::kAucPr: return metrics::auc_pr(out, data.y);
    case Metric::kMse: return metrics::mse(data.y, out);
  }
  return 0.0;
}

/// Mean training loss of `model` on (x, y) in eval mode.
template <class M>
double evaluate_loss(const M& model, const XY& data) {
  Tape tape;
  NodeRef x = tape.constant(data.x);
  NodeRef y = tape.constant(Tensor(Shape{data.size(), 1}, data.y));
  NodeRef z = model.record_logit(tape, x, ForwardOptions::eval());
  NodeRef loss = model.task() == TaskKind::kBinary ? tape.bce_with_logits(z, y)
                                                   : tape.mse(z, y);
  return tape.value(loss)[0];
}

template <class M>
using EpochCallback = std::function<void(std::size_t epoch, const M& model)>;

/// Trains `initial` on `train`, selecting the epoch with the best metric on
/// `val`. Randomness comes from the "shuffle" and "dropout" sub-streams of
/// config.seed.
template <class M>
TrainResult<M> train(const M& initial, const XY& train, const XY& val, const TrainConfig& config,
                     const EpochCallback<M>& on_epoch = {}) {
  config.validate();
  check_metric_task(config.metric, initial.task());
  if (train.size() == 0 || val.size() == 0) {
    throw DataError("training and validation splits must be non-empty");
  }
  if (train.x.rows() != train.size() || val.x.rows() != val.size()) {
    throw ShapeError("feature rows and target length disagree");
  }

  TrainResult<M> result{initial, {}};
  if (config.max_epochs == 0) return result;

  M model = initial;
  AdamState adam;
  Rng shuffle_rng = stream(config.seed, "shuffle");
  Rng dropout_rng = stream(config.seed, "dropout");
  const bool higher = higher_is_better(config.metric);
  double best = 0.0;
  std::size_t since_best = 0;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> rows(order.data() + start, stop - start);
      std::vector<double> targets;
      targets.reserve(rows.size());
      for (std::size_t r : rows) targets.push_back(train.y[r]);

      Tape tape;
      NodeRef x = tape.constant(train.x.gather_rows(rows));
      NodeRef y = tape.constant(Tensor(Shape{rows.size(), 1}, std::move(targets)));
      NodeRef z = model.record_logit(tape, x, ForwardOptions::training(config.dropout, dropout_rng));
      NodeRef loss = model.task() == TaskKind::kBinary ? tape.bce_with_logits(z, y)
                                                       : tape.mse(z, y);
      const double value = tape.value(loss)[0];
      if (!std::isfinite(value)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_index));
      }
      loss_sum += value * static_cast<double>(rows.size());
      adam_step(adam, model.params(), tape.backward(loss), config.adam);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.val_metric = evaluate_metric(model, val, config.metric);
    const bool improved = result.log.best_epoch == 0 ||
                          (higher ? rec.val_metric > best : rec.val_metric < best);
    if (improved) {
      best = rec.val_metric;
      result.model = model;
      result.log.best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
    result.log.epochs.push_back(rec);
    if (on_epoch) on_epoch(epoch, model);
    if (since_best > config.patience) break;
  }
  for (EpochRecord& rec : result.log.epochs) rec.is_best = rec.epoch == result.log.best_epoch;
  return result;
}

inline TrainResult<AnyModel> train_any(const AnyModel& initial, const XY& train_set,
                                       const XY& val, const TrainConfig& config) {
  return std::visit(
      [&](const auto& m) {
        auto r = train(m, train_set, val, config);
        return TrainResult<AnyModel>{AnyModel(std::move(r.model)), std::move(r.log)};
      },
      initial);
}

inline double evaluate_metric_any(const AnyModel& model, const XY& data, Metric metric) {
  return std::visit([&](const auto& m) { return evaluate_metric(m, data, metric); }, model);
}

}  // namespace sra
