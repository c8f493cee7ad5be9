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

// Reverse-mode differentiation over dense double tensors.
//
// A Tape records primitive applications in creation order. Values are
// computed eagerly when a node is recorded, and forward() replays the
// recorded graph against the current leaf values, so a tape can be
// re-evaluated after a leaf is rebound (finite differences use this).
// All reductions run sequentially in row-major order, which makes replays
// bit-identical.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sra/tensor.hpp"

namespace sra {

enum class PrimitiveKind {
  kMatmul,
  kAdd,
  kSub,
  kMul,
  kScale,
  kSigmoid,
  kRelu,
  kSumLastAxis,
  kReshape,
  kMean,
  kBceWithLogits,
  kMse,
};

inline const char* primitive_name(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::kMatmul: return "matmul";
    case PrimitiveKind::kAdd: return "add";
    case PrimitiveKind::kSub: return "sub";
    case PrimitiveKind::kMul: return "elementwise-mul";
    case PrimitiveKind::kScale: return "scalar-mul";
    case PrimitiveKind::kSigmoid: return "sigmoid";
    case PrimitiveKind::kRelu: return "relu";
    case PrimitiveKind::kSumLastAxis: return "sum-last-axis";
    case PrimitiveKind::kReshape: return "reshape";
    case PrimitiveKind::kMean: return "mean";
    case PrimitiveKind::kBceWithLogits: return "bce-with-logits";
    case PrimitiveKind::kMse: return "mse";
  }
  return "unknown";
}

/// Logistic function that stays inside the open interval (0, 1) for every
/// finite input.
inline double sigmoid(double t) {
  constexpr double kHi = 1.0 - 0x1p-53;
  constexpr double kLo = std::numeric_limits<double>::denorm_min();
  double s;
  if (t >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-t));
  } else {
    const double e = std::exp(t);
    s = e / (1.0 + e);
  }
  return std::clamp(s, kLo, kHi);
}

/// max(t,0) - t*y + log(1 + exp(-|t|))
inline double bce_with_logits(double t, double y) {
  return std::max(t, 0.0) - t * y + std::log1p(std::exp(-std::abs(t)));
}

/// Handle to a node on a specific tape.
struct NodeRef {
  std::size_t id = 0;
  friend bool operator==(NodeRef, NodeRef) = default;
};

using Gradients = std::map<std::string, Tensor>;

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  // Leaves.

  NodeRef constant(Tensor value) { return push_leaf(std::move(value), {}, false); }

  /// Trainable leaf. Names must be unique on the tape.
  NodeRef parameter(std::string name, Tensor value) {
    for (std::size_t id : params_) {
      if (nodes_[id].name == name) {
        throw std::invalid_argument("duplicate parameter '" + name + "'");
      }
    }
    NodeRef ref = push_leaf(std::move(value), std::move(name), true);
    params_.push_back(ref.id);
    return ref;
  }

  // Primitives.

  NodeRef matmul(NodeRef a, NodeRef b) { return push(PrimitiveKind::kMatmul, a, b); }
  /// Elementwise sum. `b` may also be a row vector broadcast over the rows
  /// of `a` (its size must equal the last extent of `a`).
  NodeRef add(NodeRef a, NodeRef b) { return push(PrimitiveKind::kAdd, a, b); }
  NodeRef sub(NodeRef a, NodeRef b) { return push(PrimitiveKind::kSub, a, b); }
  NodeRef mul(NodeRef a, NodeRef b) { return push(PrimitiveKind::kMul, a, b); }
  NodeRef scale(NodeRef a, double c) {
    return push(PrimitiveKind::kScale, a, std::nullopt, c);
  }
  NodeRef sigmoid(NodeRef a) { return push(PrimitiveKind::kSigmoid, a); }
  NodeRef relu(NodeRef a) { return push(PrimitiveKind::kRelu, a); }
  NodeRef sum_last_axis(NodeRef a) { return push(PrimitiveKind::kSumLastAxis, a); }
  NodeRef reshape(NodeRef a, Shape shape) {
    return push(PrimitiveKind::kReshape, a, std::nullopt, 0.0, std::move(shape));
  }
  NodeRef mean(NodeRef a) { return push(PrimitiveKind::kMean, a); }
  /// Mean binary cross-entropy of `logits` against 0/1 `targets`.
  NodeRef bce_with_logits(NodeRef logits, NodeRef targets) {
    return push(PrimitiveKind::kBceWithLogits, logits, targets);
  }
  /// Mean squared error of `pred` against `targets`.
  NodeRef mse(NodeRef pred, NodeRef targets) {
    return push(PrimitiveKind::kMse, pred, targets);
  }

  // Evaluation.

  const Tensor& value(NodeRef ref) const { return node(ref).value; }

  /// Rebinds a leaf. Dependent values are stale until forward() runs.
  void set_value(NodeRef leaf, Tensor value) {
    Node& n = node(leaf);
    if (!n.leaf) throw std::invalid_argument("set_value on a non-leaf node");
    if (n.value.shape() != value.shape()) {
      throw ShapeError("set_value: shape " + value.shape().str() +
                       " does not match leaf shape " + n.value.shape().str());
    }
    n.value = std::move(value);
  }

  /// Replays every recorded primitive up to `root` and returns its value.
  const Tensor& forward(NodeRef root) {
    check_ref(root);
    for (std::size_t id = 0; id <= root.id; ++id) {
      if (!nodes_[id].leaf) nodes_[id].value = evaluate(nodes_[id]);
    }
    return nodes_[root.id].value;
  }

  /// Gradient of the scalar `root` with respect to every parameter. Parameters
  /// that do not feed `root` receive zeros.
  Gradients backward(NodeRef root) const {
    check_ref(root);
    if (nodes_[root.id].value.size() != 1) {
      throw std::invalid_argument(
          "backward root must be scalar, got shape " +
          nodes_[root.id].value.shape().str());
    }
    std::vector<std::optional<Tensor>> adj(root.id + 1);
    adj[root.id] = Tensor(nodes_[root.id].value.shape(), 1.0);
    for (std::size_t id = root.id + 1; id-- > 0;) {
      if (!adj[id] || nodes_[id].leaf || !nodes_[id].needs_grad) continue;
      propagate(nodes_[id], *adj[id], adj);
    }
    Gradients grads;
    for (std::size_t id : params_) {
      const Node& n = nodes_[id];
      if (id <= root.id && adj[id]) {
        grads.emplace(n.name, std::move(*adj[id]));
      } else {
        grads.emplace(n.name, Tensor(n.value.shape()));
      }
    }
    return grads;
  }

  std::size_t size() const { return nodes_.size(); }

  /// Trainable leaves in registration order.
  std::vector<std::pair<std::string, NodeRef>> parameters() const {
    std::vector<std::pair<std::string, NodeRef>> out;
    out.reserve(params_.size());
    for (std::size_t id : params_) out.emplace_back(nodes_[id].name, NodeRef{id});
    return out;
  }

  /// Sign pattern of every rectifier input up to `root`; a change between two
  /// evaluations means a kink was crossed.
  std::vector<bool> relu_pattern(NodeRef root) const {
    check_ref(root);
    std::vector<bool> out;
    for (std::size_t id = 0; id <= root.id; ++id) {
      const Node& n = nodes_[id];
      if (n.leaf || n.kind != PrimitiveKind::kRelu) continue;
      for (double v : nodes_[n.in[0]].value.values()) out.push_back(v > 0.0);
    }
    return out;
  }

  /// Debug hook: multiply the adjoint produced by `kind` by `factor`. Used to
  /// demonstrate that finite-difference checks detect a wrong derivative.
  void inject_adjoint_fault(PrimitiveKind kind, double factor) {
    fault_ = std::make_pair(kind, factor);
  }

 private:
  struct Node {
    bool leaf = false;
    bool trainable = false;
    bool needs_grad = false;
    PrimitiveKind kind = PrimitiveKind::kAdd;
    std::array<std::size_t, 2> in{};
    int arity = 0;
    double scalar = 0.0;
    Shape target;
    std::string name;
    Tensor value;
  };

  Node& node(NodeRef ref) {
    check_ref(ref);
    return nodes_[ref.id];
  }
  const Node& node(NodeRef ref) const {
    check_ref(ref);
    return nodes_[ref.id];
  }
  void check_ref(NodeRef ref) const {
    if (ref.id >= nodes_.size()) {
      throw std::out_of_range("node reference " + std::to_string(ref.id) +
                              " is not on this tape");
    }
  }

  NodeRef push_leaf(Tensor value, std::string name, bool trainable) {
    Node n;
    n.leaf = true;
    n.trainable = trainable;
    n.needs_grad = trainable;
    n.name = std::move(name);
    n.value = std::move(value);
    nodes_.push_back(std::move(n));
    return NodeRef{nodes_.size() - 1};
  }

  NodeRef push(PrimitiveKind kind, NodeRef a, std::optional<NodeRef> b = std::nullopt,
               double scalar = 0.0, Shape target = {}) {
    check_ref(a);
    Node n;
    n.kind = kind;
    n.in[0] = a.id;
    n.arity = 1;
    n.needs_grad = nodes_[a.id].needs_grad;
    if (b) {
      check_ref(*b);
      n.in[1] = b->id;
      n.arity = 2;
      n.needs_grad = n.needs_grad || nodes_[b->id].needs_grad;
    }
    n.scalar = scalar;
    n.target = std::move(target);
    n.value = evaluate(n);
    nodes_.push_back(std::move(n));
    return NodeRef{nodes_.size() - 1};
  }

  [[noreturn]] static void mismatch(const Node& n, const Shape& a, const Shape& b) {
    throw ShapeError(std::string(primitive_name(n.kind)) +
                     ": incompatible operand shapes " + a.str() + " and " + b.str());
  }

  static bool broadcasts_rows(const Shape& a, const Shape& b) {
    return a != b && b.rank() <= 2 && (b.rank() < 2 || b[0] == 1) &&
           b.numel() == a.last() && a.rank() >= 1;
  }

  Tensor evaluate(const Node& n) const {
    const Tensor& a = nodes_[n.in[0]].value;
    const Tensor* b = n.arity == 2 ? &nodes_[n.in[1]].value : nullptr;
    switch (n.kind) {
      case PrimitiveKind::kMatmul: {
        if (a.rank() != 2 || b->rank() != 2 || a.shape()[1] != b->shape()[0]) {
          mismatch(n, a.shape(), b->shape());
        }
        const std::size_t m = a.shape()[0], k = a.shape()[1], cols = b->shape()[1];
        Tensor out(Shape{m, cols});
        auto o = out.values();
        auto av = a.values();
        auto bv = b->values();
        for (std::size_t i = 0; i < m; ++i) {
          double* orow = o.data() + i * cols;
          for (std::size_t l = 0; l < k; ++l) {
            const double ail = av[i * k + l];
            const double* brow = bv.data() + l * cols;
            for (std::size_t j = 0; j < cols; ++j) orow[j] += ail * brow[j];
          }
        }
        return out;
      }
      case PrimitiveKind::kAdd:
      case PrimitiveKind::kSub:
      case PrimitiveKind::kMul: {
        const bool same = a.shape() == b->shape();
        const bool bcast = n.kind == PrimitiveKind::kAdd && broadcasts_rows(a.shape(), b->shape());
        if (!same && !bcast) mismatch(n, a.shape(), b->shape());
        Tensor out(a.shape());
        auto o = out.values();
        auto av = a.values();
        auto bv = b->values();
        const std::size_t width = bv.size();
        for (std::size_t i = 0; i < o.size(); ++i) {
          const double y = same ? bv[i] : bv[i % width];
          switch (n.kind) {
            case PrimitiveKind::kAdd: o[i] = av[i] + y; break;
            case PrimitiveKind::kSub: o[i] = av[i] - y; break;
            default: o[i] = av[i] * y; break;
          }
        }
        return out;
      }
      case PrimitiveKind::kScale: {
        Tensor out(a.shape());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = n.scalar * a[i];
        return out;
      }
      case PrimitiveKind::kSigmoid: {
        Tensor out(a.shape());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = sra::sigmoid(a[i]);
        return out;
      }
      case PrimitiveKind::kRelu: {
        Tensor out(a.shape());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] > 0.0 ? a[i] : 0.0;
        return out;
      }
      case PrimitiveKind::kSumLastAxis: {
        const std::size_t w = a.shape().last();
        std::vector<std::size_t> dims = a.shape().dims();
        if (dims.size() <= 1) {
          dims = {1};
        } else {
          dims.pop_back();
        }
        Tensor out{Shape(std::move(dims))};
        for (std::size_t r = 0; r < out.size(); ++r) {
          double s = 0.0;
          for (std::size_t j = 0; j < w; ++j) s += a[r * w + j];
          out[r] = s;
        }
        return out;
      }
      case PrimitiveKind::kReshape:
        if (n.target.numel() != a.size()) mismatch(n, a.shape(), n.target);
        return a.reshaped(n.target);
      case PrimitiveKind::kMean: {
        double s = 0.0;
        for (double v : a.values()) s += v;
        return Tensor::scalar(a.size() ? s / static_cast<double>(a.size()) : 0.0);
      }
      case PrimitiveKind::kBceWithLogits:
      case PrimitiveKind::kMse: {
        if (a.size() != b->size() || a.size() == 0) mismatch(n, a.shape(), b->shape());
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
          if (n.kind == PrimitiveKind::kMse) {
            const double d = a[i] - (*b)[i];
            s += d * d;
          } else {
            s += sra::bce_with_logits(a[i], (*b)[i]);
          }
        }
        return Tensor::scalar(s / static_cast<double>(a.size()));
      }
    }
    throw std::logic_error("unhandled primitive");
  }

  void accumulate(std::vector<std::optional<Tensor>>& adj, std::size_t id,
                  Tensor contribution, PrimitiveKind kind) const {
    if (!nodes_[id].needs_grad) return;
    if (fault_ && fault_->first == kind) {
      for (double& v : contribution.values()) v *= fault_->second;
    }
    if (!adj[id]) {
      adj[id] = std::move(contribution);
      return;
    }
    auto dst = adj[id]->values();
    auto src = contribution.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }

  void propagate(const Node& n, const Tensor& g,
                 std::vector<std::optional<Tensor>>& adj) const {
    const Tensor& a = nodes_[n.in[0]].value;
    const Tensor* b = n.arity == 2 ? &nodes_[n.in[1]].value : nullptr;
    const std::size_t ia = n.in[0];
    const std::size_t ib = n.in[1];
    switch (n.kind) {
      case PrimitiveKind::kMatmul: {
        const std::size_t m = a.shape()[0], k = a.shape()[1], cols = b->shape()[1];
        if (nodes_[ia].needs_grad) {
          Tensor da(a.shape());
          for (std::size_t i = 0; i < m; ++i) {
            const double* grow = g.values().data() + i * cols;
            for (std::size_t l = 0; l < k; ++l) {
              const double* brow = b->values().data() + l * cols;
              double s = 0.0;
              for (std::size_t j = 0; j < cols; ++j) s += grow[j] * brow[j];
              da[i * k + l] = s;
            }
          }
          accumulate(adj, ia, std::move(da), n.kind);
        }
        if (nodes_[ib].needs_grad) {
          Tensor db(b->shape());
          double* dbv = db.values().data();
          for (std::size_t i = 0; i < m; ++i) {
            const double* grow = g.values().data() + i * cols;
            for (std::size_t l = 0; l < k; ++l) {
              const double ail = a[i * k + l];
              double* drow = dbv + l * cols;
              for (std::size_t j = 0; j < cols; ++j) drow[j] += ail * grow[j];
            }
          }
          accumulate(adj, ib, std::move(db), n.kind);
        }
        return;
      }
      case PrimitiveKind::kAdd:
      case PrimitiveKind::kSub: {
        accumulate(adj, ia, g, n.kind);
        Tensor db(b->shape());
        const double sign = n.kind == PrimitiveKind::kSub ? -1.0 : 1.0;
        const std::size_t width = db.size();
        for (std::size_t i = 0; i < g.size(); ++i) db[i % width] += sign * g[i];
        accumulate(adj, ib, std::move(db), n.kind);
        return;
      }
      case PrimitiveKind::kMul: {
        Tensor da(a.shape()), db(b->shape());
        for (std::size_t i = 0; i < g.size(); ++i) {
          da[i] = g[i] * (*b)[i];
          db[i] = g[i] * a[i];
        }
        accumulate(adj, ia, std::move(da), n.kind);
        accumulate(adj, ib, std::move(db), n.kind);
        return;
      }
      case PrimitiveKind::kScale: {
        Tensor da(a.shape());
        for (std::size_t i = 0; i < g.size(); ++i) da[i] = n.scalar * g[i];
        accumulate(adj, ia, std::move(da), n.kind);
        return;
      }
      case PrimitiveKind::kSigmoid: {
        const Tensor& s = n.value;
        Tensor da(a.shape());
        for (std::size_t i = 0; i < g.size(); ++i) da[i] = g[i] * s[i] * (1.0 - s[i]);
        accumulate(adj, ia, std::move(da), n.kind);
        return;
      }
      case PrimitiveKind::kRelu: {
        Tensor da(a.shape());
        for (std::size_t i = 0; i < g.size(); ++i) da[i] = a[i] > 0.0 ? g[i] : 0.0;
        accumulate(adj, ia, std::move(da), n.kind);
        return;
      }
      case PrimitiveKind::kSumLastAxis: {
        const std::size_t w = a.shape().last();
        Tensor da(a.shape());
        for (std::size_t i = 0; i < da.size(); ++i) da[i] = g[i / w];
        accumulate(adj, ia, std::move(da), n.kind);
        return;
      }
      case PrimitiveKind::kReshape:
        accumulate(adj, ia, g.reshaped(a.shape()), n.kind);
        return;
      case PrimitiveKind::kMean: {
        Tensor da(a.shape(), g[0] / static_cast<double>(a.size()));
        accumulate(adj, ia, std::move(da), n.kind);
        return;
      }
      case PrimitiveKind::kBceWithLogits: {
        const double scale = g[0] / static_cast<double>(a.size());
        Tensor da(a.shape()), db(b->shape());
        for (std::size_t i = 0; i < a.size(); ++i) {
          da[i] = scale * (sra::sigmoid(a[i]) - (*b)[i]);
          db[i] = -scale * a[i];
        }
        accumulate(adj, ia, std::move(da), n.kind);
        accumulate(adj, ib, std::move(db), n.kind);
        return;
      }
      case PrimitiveKind::kMse: {
        const double scale = 2.0 * g[0] / static_cast<double>(a.size());
        Tensor da(a.shape()), db(b->shape());
        for (std::size_t i = 0; i < a.size(); ++i) {
          const double d = scale * (a[i] - (*b)[i]);
          da[i] = d;
          db[i] = -d;
        }
        accumulate(adj, ia, std::move(da), n.kind);
        accumulate(adj, ib, std::move(db), n.kind);
        return;
      }
    }
  }

  std::vector<Node> nodes_;
  std::vector<std::size_t> params_;
  std::optional<std::pair<PrimitiveKind, double>> fault_;
};

}  // namespace sra
