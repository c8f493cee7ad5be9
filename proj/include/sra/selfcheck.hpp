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

// Gradient checks of every primitive and every model loss on random inputs.

#pragma once

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sra/gradcheck.hpp"
#include "sra/model.hpp"
#include "sra/rng.hpp"
#include "sra/tape.hpp"

namespace sra {

struct AdjointFault {
  PrimitiveKind kind = PrimitiveKind::kMatmul;
  double factor = 1.0;
};

struct NamedCheck {
  std::string name;
  GradCheckReport report;
};

namespace detail {

inline Tensor uniform_tensor(const Shape& shape, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t(shape);
  for (double& v : t.values()) v = u(rng);
  return t;
}

/// mean(out * w) with a random constant weight, so every output entry
/// receives a distinct adjoint.
inline NodeRef weighted_mean(Tape& tape, NodeRef out, Rng& rng) {
  const Shape s = tape.value(out).shape();
  return tape.mean(tape.mul(out, tape.constant(uniform_tensor(s, -2.0, 2.0, rng))));
}

}  // namespace detail

/// One check per primitive kind, inputs drawn uniformly from [-2, 2].
inline std::vector<NamedCheck> primitive_gradchecks(std::uint64_t seed, double step, double tol,
                                                    std::optional<AdjointFault> fault = {}) {
  Rng rng = stream(seed, "gradcheck/primitives");
  auto u = [&](Shape s) { return detail::uniform_tensor(s, -2.0, 2.0, rng); };
  std::vector<NamedCheck> out;
  auto run = [&](PrimitiveKind kind, auto build) {
    Tape tape;
    if (fault) tape.inject_adjoint_fault(fault->kind, fault->factor);
    const NodeRef root = build(tape);
    out.push_back({primitive_name(kind), finite_diff_check(tape, root, step, tol)});
  };
  run(PrimitiveKind::kMatmul, [&](Tape& t) {
    return detail::weighted_mean(t, t.matmul(t.parameter("a", u(Shape{3, 4})),
                                             t.parameter("b", u(Shape{4, 2}))), rng);
  });
  run(PrimitiveKind::kAdd, [&](Tape& t) {
    const NodeRef a = t.parameter("a", u(Shape{3, 4}));
    const NodeRef b = t.parameter("b", u(Shape{3, 4}));
    const NodeRef row = t.parameter("row", u(Shape{4}));
    return detail::weighted_mean(t, t.add(t.add(a, b), row), rng);
  });
  run(PrimitiveKind::kSub, [&](Tape& t) {
    return detail::weighted_mean(
        t, t.sub(t.parameter("a", u(Shape{3, 4})), t.parameter("b", u(Shape{3, 4}))), rng);
  });
  run(PrimitiveKind::kMul, [&](Tape& t) {
    return detail::weighted_mean(
        t, t.mul(t.parameter("a", u(Shape{3, 4})), t.parameter("b", u(Shape{3, 4}))), rng);
  });
  run(PrimitiveKind::kScale, [&](Tape& t) {
    return detail::weighted_mean(t, t.scale(t.parameter("a", u(Shape{3, 4})), -1.7), rng);
  });
  run(PrimitiveKind::kSigmoid, [&](Tape& t) {
    return detail::weighted_mean(t, t.sigmoid(t.parameter("a", u(Shape{3, 4}))), rng);
  });
  run(PrimitiveKind::kRelu, [&](Tape& t) {
    return detail::weighted_mean(t, t.relu(t.parameter("a", u(Shape{3, 4}))), rng);
  });
  run(PrimitiveKind::kSumLastAxis, [&](Tape& t) {
    return detail::weighted_mean(t, t.sum_last_axis(t.parameter("a", u(Shape{2, 3, 4}))), rng);
  });
  run(PrimitiveKind::kReshape, [&](Tape& t) {
    return detail::weighted_mean(t, t.reshape(t.parameter("a", u(Shape{3, 4})), Shape{2, 6}),
                                 rng);
  });
  run(PrimitiveKind::kMean, [&](Tape& t) {
    const NodeRef a = t.parameter("a", u(Shape{3, 4}));
    return t.mean(t.mul(a, a));
  });
  run(PrimitiveKind::kBceWithLogits, [&](Tape& t) {
    std::bernoulli_distribution coin(0.5);
    Tensor y(Shape{6, 1});
    for (double& v : y.values()) v = coin(rng) ? 1.0 : 0.0;
    return t.bce_with_logits(t.parameter("logits", u(Shape{6, 1})), t.constant(std::move(y)));
  });
  run(PrimitiveKind::kMse, [&](Tape& t) {
    return t.mse(t.parameter("pred", u(Shape{6, 1})), t.constant(u(Shape{6, 1})));
  });
  return out;
}

/// Loss of a randomly initialised model on a random batch, with every
/// parameter (including the zero-initialised ones) redrawn so no gradient
/// is trivially zero.
struct ModelCheckCase {
  ModelKind kind = ModelKind::kSraLinear;
  TaskKind task = TaskKind::kBinary;
  std::size_t p = 0;
  std::size_t batch = 0;
  std::size_t dk = 0;
  std::uint64_t seed = 0;
};

inline ModelCheckCase random_case(ModelKind kind, TaskKind task, std::uint64_t seed) {
  Rng rng = stream(seed, "gradcheck/case/" + std::string(model_name(kind)));
  std::uniform_int_distribution<std::size_t> p(2, 8), b(4, 16), dk(1, 2);
  ModelCheckCase c{kind, task, p(rng), b(rng), 4 * dk(rng), seed};
  return c;
}

inline GradCheckReport model_gradcheck(const ModelCheckCase& c, double step, double tol,
                                       std::optional<AdjointFault> fault = {}) {
  Rng rng = stream(c.seed, "gradcheck/model/" + std::string(model_name(c.kind)));
  AnyModel model = init_model(c.kind, c.p, c.dk, c.task, c.seed);
  std::visit(
      [&](auto& m) {
        for (Parameter& param : m.params()) {
          param.value = detail::uniform_tensor(param.value.shape(), -1.0, 1.0, rng);
        }
      },
      model);
  Tape tape;
  if (fault) tape.inject_adjoint_fault(fault->kind, fault->factor);
  const NodeRef x = tape.constant(detail::uniform_tensor(Shape{c.batch, c.p}, -2.0, 2.0, rng));
  Tensor y(Shape{c.batch, 1});
  if (c.task == TaskKind::kBinary) {
    std::bernoulli_distribution coin(0.5);
    for (double& v : y.values()) v = coin(rng) ? 1.0 : 0.0;
  } else {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : y.values()) v = normal(rng);
  }
  const NodeRef target = tape.constant(std::move(y));
  const NodeRef z = std::visit(
      [&](const auto& m) { return m.record_logit(tape, x, ForwardOptions::eval()); }, model);
  const NodeRef loss =
      c.task == TaskKind::kBinary ? tape.bce_with_logits(z, target) : tape.mse(z, target);
  return finite_diff_check(tape, loss, step, tol);
}

}  // namespace sra
