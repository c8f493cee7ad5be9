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

// Models recorded on a Tape: the self-reinforcement attention block, the
// SRALinear model built on it, and the logistic/linear and MLP baselines.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "sra/errors.hpp"
#include "sra/rng.hpp"
#include "sra/tape.hpp"
#include "sra/tensor.hpp"

namespace sra {

enum class TaskKind { kBinary, kRegression };
enum class ModelKind { kSraLinear, kLinear, kMlp };

inline std::string_view task_name(TaskKind t) {
  return t == TaskKind::kBinary ? "binary" : "regression";
}

inline TaskKind parse_task(std::string_view s) {
  if (s == "binary") return TaskKind::kBinary;
  if (s == "regression") return TaskKind::kRegression;
  throw ConfigError("unknown task '" + std::string(s) + "'");
}

inline std::string_view model_name(ModelKind k) {
  switch (k) {
    case ModelKind::kSraLinear: return "sralinear";
    case ModelKind::kLinear: return "lr";
    case ModelKind::kMlp: return "mlp";
  }
  return "unknown";
}

inline ModelKind parse_model(std::string_view s) {
  if (s == "sralinear") return ModelKind::kSraLinear;
  if (s == "lr" || s == "linear") return ModelKind::kLinear;
  if (s == "mlp") return ModelKind::kMlp;
  throw ConfigError("unknown model '" + std::string(s) + "'");
}

/// Inverted dropout mask: 0 with probability `rate`, else 1/(1-rate).
inline Tensor dropout_mask(const Shape& shape, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
  Tensor mask(shape, 1.0);
  if (rate == 0.0) return mask;
  const double keep = 1.0 / (1.0 - rate);
  std::bernoulli_distribution drop(rate);
  for (double& v : mask.values()) v = drop(rng) ? 0.0 : keep;
  return mask;
}

/// Train mode draws dropout masks from `rng`; eval mode is deterministic.
struct ForwardOptions {
  bool train = false;
  double dropout = 0.0;
  Rng* rng = nullptr;
  // Optional (b x p) multiplier applied to the attention vector before the
  // reinforcement step; used for masking counterfactuals.
  const Tensor* attention_mask = nullptr;

  static ForwardOptions eval() { return {}; }
  static ForwardOptions training(double rate, Rng& r) { return {true, rate, &r, nullptr}; }
  bool dropout_active() const { return train && dropout > 0.0 && rng != nullptr; }
};

struct Parameter {
  std::string name;
  Tensor value;
  bool decay = false;  // receives decoupled weight decay
};

/// Named parameter storage shared by every model.
class ParameterStore {
 public:
  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }

  const Tensor& get(std::string_view name) const { return find(name).value; }
  Tensor& get(std::string_view name) { return const_cast<Parameter&>(find(name)).value; }

  std::size_t count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
  }

  friend bool operator==(const ParameterStore& a, const ParameterStore& b) {
    if (a.params_.size() != b.params_.size()) return false;
    for (std::size_t i = 0; i < a.params_.size(); ++i) {
      if (a.params_[i].name != b.params_[i].name ||
          a.params_[i].value != b.params_[i].value) {
        return false;
      }
    }
    return true;
  }

 protected:
  void add(std::string name, Tensor value, bool decay) {
    params_.push_back({std::move(name), std::move(value), decay});
  }

  /// Records every parameter on `tape`; returns refs in storage order.
  std::vector<NodeRef> bind(Tape& tape) const {
    std::vector<NodeRef> refs;
    refs.reserve(params_.size());
    for (const auto& p : params_) refs.push_back(tape.parameter(p.name, p.value));
    return refs;
  }

  const Parameter& find(std::string_view name) const {
    for (const auto& p : params_) {
      if (p.name == name) return p;
    }
    throw std::out_of_range("no parameter named '" + std::string(name) + "'");
  }

 private:
  std::vector<Parameter> params_;
};

/// Glorot-uniform matrix: U(-sqrt(6/(fan_in+fan_out)), +sqrt(...)).
inline Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor w(Shape{fan_in, fan_out});
  for (double& v : w.values()) v = dist(rng);
  return w;
}

inline void check_input(const Tensor& x, std::size_t p, std::string_view who) {
  if (x.rank() != 2 || x.cols() != p) {
    throw ShapeError(std::string(who) + ": expected input of shape (bx" +
                     std::to_string(p) + "), got " + x.shape().str());
  }
  for (double v : x.values()) {
    if (!std::isfinite(v)) throw NumericError(std::string(who) + ": non-finite input");
  }
}

/// Evaluates `record` over row chunks of `x` and concatenates the results.
/// `record` returns the node whose value has one row per input row.
inline Tensor evaluate_rows(const Tensor& x,
                            const std::function<NodeRef(Tape&, NodeRef)>& record,
                            std::size_t chunk = 4096) {
  std::vector<double> out;
  std::size_t width = 0;
  for (std::size_t start = 0; start < x.rows(); start += chunk) {
    const std::size_t stop = std::min(x.rows(), start + chunk);
    std::vector<double> rows(x.values().begin() + start * x.cols(),
                             x.values().begin() + stop * x.cols());
    Tape tape;
    NodeRef in = tape.constant(Tensor(Shape{stop - start, x.cols()}, std::move(rows)));
    const Tensor& v = tape.value(record(tape, in));
    width = v.size() / (stop - start);
    out.insert(out.end(), v.values().begin(), v.values().end());
  }
  return Tensor(Shape{x.rows(), width}, std::move(out));
}

/// Shape of the key/query encoders: p -> p*dk/4 -> p*dk/2 -> p*dk.
struct EncoderConfig {
  std::size_t p = 0;
  std::size_t dk = 8;

  std::size_t d1() const { return p * (dk / 4); }
  std::size_t d2() const { return p * (dk / 2); }
  std::size_t out() const { return p * dk; }

  void validate() const {
    if (p < 1) throw ConfigError("feature count p must be >= 1");
    if (dk < 4 || dk % 4 != 0) {
      throw ConfigError("d_k must be >= 4 and divisible by 4, got " + std::to_string(dk));
    }
  }
};

/// Reinforced representation o = a * x (elementwise).
inline Tensor reinforce(const Tensor& a, const Tensor& x) {
  if (a.shape() != x.shape()) {
    throw ShapeError("reinforce: attention " + a.shape().str() + " and input " + x.shape().str() +
                     " differ in shape");
  }
  Tensor o(x.shape());
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a[i] * x[i];
  return o;
}

struct SraRecord {
  NodeRef attention;   // b x p
  NodeRef reinforced;  // b x p
  NodeRef logit;       // b x 1
};

/// SRA block followed by a linear head:
///   logit = intercept + sum_i beta_i * a_i(x) * x_i
/// with a_i = q_i . k_i / d_k and q, k the sigmoid outputs of two separate
/// three-layer encoders, reshaped to (b, p, d_k).
class SraLinearModel : public ParameterStore {
 public:
  SraLinearModel() = default;

  static SraLinearModel init(std::size_t p, std::size_t dk, TaskKind task,
                             std::uint64_t seed) {
    EncoderConfig cfg{p, dk};
    cfg.validate();
    SraLinearModel m;
    m.cfg_ = cfg;
    m.task_ = task;
    Rng rng = stream(seed, "init/sralinear");
    for (const char* enc : {"key", "query"}) {
      const std::string e(enc);
      m.add(e + ".w1", glorot_uniform(p, cfg.d1(), rng), true);
      m.add(e + ".b1", Tensor(Shape{cfg.d1()}), false);
      m.add(e + ".w2", glorot_uniform(cfg.d1(), cfg.d2(), rng), true);
      m.add(e + ".b2", Tensor(Shape{cfg.d2()}), false);
      m.add(e + ".w3", glorot_uniform(cfg.d2(), cfg.out(), rng), true);
      m.add(e + ".b3", Tensor(Shape{cfg.out()}), false);
    }
    m.add("beta", Tensor(Shape{p, 1}), false);
    m.add("intercept", Tensor(Shape{1}), false);
    return m;
  }

  /// Empty shell with the right parameter layout, used by checkpoint loading.
  static SraLinearModel layout(std::size_t p, std::size_t dk, TaskKind task) {
    return init(p, dk, task, 0);
  }

  ModelKind kind() const { return ModelKind::kSraLinear; }
  TaskKind task() const { return task_; }
  std::size_t features() const { return cfg_.p; }
  const EncoderConfig& encoder() const { return cfg_; }

  /// Records attention, reinforced vector and logit for a (b x p) input node.
  SraRecord record(Tape& tape, NodeRef x, const ForwardOptions& opts) const {
    const Shape xs = tape.value(x).shape();
    if (xs.rank() != 2 || xs[1] != cfg_.p) {
      throw ShapeError("sra_attention: expected input (bx" + std::to_string(cfg_.p) +
                       "), got " + xs.str());
    }
    const std::vector<NodeRef> w = bind(tape);
    // storage order: key w1 b1 w2 b2 w3 b3, query w1 .. b3, beta, intercept
    const NodeRef keys = encode(tape, x, &w[0], opts);
    const NodeRef queries = encode(tape, x, &w[6], opts);
    NodeRef a = attention_from(tape, keys, queries, xs[0]);
    if (opts.attention_mask) a = tape.mul(a, tape.constant(*opts.attention_mask));
    const NodeRef o = tape.mul(a, x);
    const NodeRef logit = tape.add(tape.matmul(o, w[12]), w[13]);
    return {a, o, logit};
  }

  NodeRef record_logit(Tape& tape, NodeRef x, const ForwardOptions& opts) const {
    return record(tape, x, opts).logit;
  }

  Tensor attention(const Tensor& x) const {
    check_input(x, cfg_.p, "sra_attention");
    return evaluate_rows(x, [this](Tape& t, NodeRef in) {
      return record(t, in, ForwardOptions::eval()).attention;
    });
  }

  Tensor logits(const Tensor& x) const {
    check_input(x, cfg_.p, "predict_logit");
    return evaluate_rows(x, [this](Tape& t, NodeRef in) {
      return record(t, in, ForwardOptions::eval()).logit;
    });
  }

 private:
  NodeRef encode(Tape& tape, NodeRef x, const NodeRef* w,
                 const ForwardOptions& opts) const {
    NodeRef h = x;
    for (int layer = 0; layer < 2; ++layer) {
      h = tape.relu(tape.add(tape.matmul(h, w[2 * layer]), w[2 * layer + 1]));
      if (opts.dropout_active()) {
        h = tape.mul(h, tape.constant(dropout_mask(tape.value(h).shape(), opts.dropout,
                                                   *opts.rng)));
      }
    }
    return tape.sigmoid(tape.add(tape.matmul(h, w[4]), w[5]));
  }

  NodeRef attention_from(Tape& tape, NodeRef keys, NodeRef queries,
                         std::size_t batch) const {
    const Shape cube{batch, cfg_.p, cfg_.dk};
    const NodeRef qk = tape.mul(tape.reshape(queries, cube), tape.reshape(keys, cube));
    return tape.sum_last_axis(tape.scale(qk, 1.0 / static_cast<double>(cfg_.dk)));
  }

  EncoderConfig cfg_;
  TaskKind task_ = TaskKind::kBinary;
};

/// Logistic regression (binary) or linear regression: intercept + w . x.
class LinearModel : public ParameterStore {
 public:
  static LinearModel init(std::size_t p, TaskKind task) {
    if (p < 1) throw ConfigError("feature count p must be >= 1");
    LinearModel m;
    m.p_ = p;
    m.task_ = task;
    m.add("weight", Tensor(Shape{p, 1}), false);
    m.add("intercept", Tensor(Shape{1}), false);
    return m;
  }
  static LinearModel layout(std::size_t p, TaskKind task) { return init(p, task); }

  ModelKind kind() const { return ModelKind::kLinear; }
  TaskKind task() const { return task_; }
  std::size_t features() const { return p_; }

  NodeRef record_logit(Tape& tape, NodeRef x, const ForwardOptions&) const {
    const Shape xs = tape.value(x).shape();
    if (xs.rank() != 2 || xs[1] != p_) {
      throw ShapeError("linear: expected input (bx" + std::to_string(p_) + "), got " +
                       xs.str());
    }
    const std::vector<NodeRef> w = bind(tape);
    return tape.add(tape.matmul(x, w[0]), w[1]);
  }

  Tensor logits(const Tensor& x) const {
    check_input(x, p_, "linear");
    return evaluate_rows(x, [this](Tape& t, NodeRef in) {
      return record_logit(t, in, ForwardOptions::eval());
    });
  }

 private:
  std::size_t p_ = 0;
  TaskKind task_ = TaskKind::kBinary;
};

/// Two hidden rectifier layers of widths 4p and 2p, then one output.
class MlpModel : public ParameterStore {
 public:
  static MlpModel init(std::size_t p, TaskKind task, std::uint64_t seed) {
    if (p < 1) throw ConfigError("feature count p must be >= 1");
    MlpModel m;
    m.p_ = p;
    m.task_ = task;
    Rng rng = stream(seed, "init/mlp");
    m.add("l1.w", glorot_uniform(p, 4 * p, rng), true);
    m.add("l1.b", Tensor(Shape{4 * p}), false);
    m.add("l2.w", glorot_uniform(4 * p, 2 * p, rng), true);
    m.add("l2.b", Tensor(Shape{2 * p}), false);
    m.add("out.w", glorot_uniform(2 * p, 1, rng), false);
    m.add("out.b", Tensor(Shape{1}), false);
    return m;
  }
  static MlpModel layout(std::size_t p, TaskKind task) { return init(p, task, 0); }

  ModelKind kind() const { return ModelKind::kMlp; }
  TaskKind task() const { return task_; }
  std::size_t features() const { return p_; }

  NodeRef record_logit(Tape& tape, NodeRef x, const ForwardOptions&) const {
    const Shape xs = tape.value(x).shape();
    if (xs.rank() != 2 || xs[1] != p_) {
      throw ShapeError("mlp: expected input (bx" + std::to_string(p_) + "), got " +
                       xs.str());
    }
    const std::vector<NodeRef> w = bind(tape);
    NodeRef h = tape.relu(tape.add(tape.matmul(x, w[0]), w[1]));
    h = tape.relu(tape.add(tape.matmul(h, w[2]), w[3]));
    return tape.add(tape.matmul(h, w[4]), w[5]);
  }

  Tensor logits(const Tensor& x) const {
    check_input(x, p_, "mlp");
    return evaluate_rows(x, [this](Tape& t, NodeRef in) {
      return record_logit(t, in, ForwardOptions::eval());
    });
  }

 private:
  std::size_t p_ = 0;
  TaskKind task_ = TaskKind::kBinary;
};

using AnyModel = std::variant<SraLinearModel, LinearModel, MlpModel>;

inline AnyModel init_model(ModelKind kind, std::size_t p, std::size_t dk, TaskKind task,
                           std::uint64_t seed) {
  switch (kind) {
    case ModelKind::kSraLinear: return SraLinearModel::init(p, dk, task, seed);
    case ModelKind::kLinear: return LinearModel::init(p, task);
    case ModelKind::kMlp: return MlpModel::init(p, task, seed);
  }
  throw ConfigError("unknown model kind");
}

inline ModelKind kind_of(const AnyModel& m) {
  return std::visit([](const auto& v) { return v.kind(); }, m);
}
inline TaskKind task_of(const AnyModel& m) {
  return std::visit([](const auto& v) { return v.task(); }, m);
}
inline std::size_t features_of(const AnyModel& m) {
  return std::visit([](const auto& v) { return v.features(); }, m);
}

/// Raw model output on the link scale (log-odds or regression value).
template <class M>
Tensor predict_logit(const M& model, const Tensor& x) {
  return model.logits(x);
}
inline Tensor predict_logit(const AnyModel& model, const Tensor& x) {
  return std::visit([&](const auto& m) { return m.logits(x); }, model);
}

template <class M>
TaskKind task_of_model(const M& m) {
  if constexpr (std::is_same_v<M, AnyModel>) {
    return task_of(m);
  } else {
    return m.task();
  }
}

/// Inverse link: sigmoid for binary tasks, identity for regression.
template <class M>
std::vector<double> predict(const M& model, const Tensor& x) {
  const Tensor z = predict_logit(model, x);
  std::vector<double> out(z.values().begin(), z.values().end());
  if (task_of_model(model) == TaskKind::kBinary) {
    for (double& v : out) v = sigmoid(v);
  }
  return out;
}

}  // namespace sra
