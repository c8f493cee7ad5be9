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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "sra/checkpoint.hpp"
#include "sra/explain.hpp"
#include "sra/model.hpp"

namespace sra {
namespace {

SraLinearModel zero_encoders(std::size_t p, std::size_t dk) {
  SraLinearModel m = SraLinearModel::init(p, dk, TaskKind::kBinary, 0);
  for (Parameter& param : m.params()) {
    for (double& v : param.value.values()) v = 0.0;
  }
  return m;
}

Tensor random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Tensor t(Shape{r, c});
  for (double& v : t.values()) v = u(rng);
  return t;
}

SraLinearModel random_sra(std::size_t p, std::size_t dk, std::uint64_t seed, double scale) {
  SraLinearModel m = SraLinearModel::init(p, dk, TaskKind::kBinary, seed);
  Rng rng = stream(seed, "test/params");
  std::uniform_real_distribution<double> u(-scale, scale);
  for (Parameter& param : m.params()) {
    for (double& v : param.value.values()) v = u(rng);
  }
  return m;
}

Tensor logits_with_mask(const SraLinearModel& m, const Tensor& x, const Tensor& mask) {
  Tape t;
  ForwardOptions opts = ForwardOptions::eval();
  opts.attention_mask = &mask;
  return t.value(m.record(t, t.constant(x), opts).logit);
}

TEST(Attention, ZeroEncodersGiveQuarter) {
  const SraLinearModel m = zero_encoders(3, 4);
  Rng rng(1);
  const Tensor a = m.attention(random_matrix(7, 3, rng));
  for (double v : a.values()) EXPECT_EQ(v, 0.25);
}

TEST(Attention, SaturatedEncodersApproachOne) {
  SraLinearModel m = zero_encoders(4, 8);
  for (double& v : m.get("key.b3").values()) v = 60.0;
  for (double& v : m.get("query.b3").values()) v = 60.0;
  Rng rng(2);
  const Tensor a = m.attention(random_matrix(5, 4, rng));
  for (double v : a.values()) {
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(v, 1.0, 1e-15);
  }
}

TEST(Attention, BoundedForRandomParameters) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng = stream(seed, "test/bounds");
    std::uniform_int_distribution<std::size_t> pd(1, 6);
    const std::size_t p = pd(rng);
    const SraLinearModel m = random_sra(p, 4, seed, 3.0);
    const Tensor a = m.attention(random_matrix(3, p, rng, 5.0));
    for (double v : a.values()) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

TEST(Attention, PreservesFeatureDimension) {
  const SraLinearModel m = SraLinearModel::init(6, 8, TaskKind::kBinary, 3);
  Rng rng(3);
  EXPECT_EQ(m.attention(random_matrix(11, 6, rng)).shape(), Shape({11, 6}));
}

TEST(Attention, WrongWidthIsShapeError) {
  const SraLinearModel m = SraLinearModel::init(3, 4, TaskKind::kBinary, 3);
  EXPECT_THROW(m.attention(Tensor(Shape{2, 4})), ShapeError);
}

TEST(Reinforce, IdentityAndSuppression) {
  const Tensor x = Tensor::matrix(1, 3, {2, -4, 7});
  EXPECT_EQ(reinforce(Tensor(Shape{1, 3}, 1.0), x), x);
  EXPECT_EQ(reinforce(Tensor(Shape{1, 3}, 0.0), x), Tensor(Shape{1, 3}, 0.0));
}

TEST(Reinforce, DirectProduct) {
  const Tensor o = reinforce(Tensor::matrix(1, 2, {0.25, 0.5}), Tensor::matrix(1, 2, {2, -4}));
  EXPECT_EQ(o, Tensor::matrix(1, 2, {0.5, -2.0}));
  EXPECT_THROW(reinforce(Tensor(Shape{1, 2}), Tensor(Shape{2, 1})), ShapeError);
}

TEST(PredictLogit, HandEvaluatedDecomposition) {
  SraLinearModel m = zero_encoders(2, 4);
  m.get("beta") = Tensor::matrix(2, 1, {2, -1});
  // zero encoders give a = 0.25; the mask lifts it to (0.5, 1)
  const Tensor z = logits_with_mask(m, Tensor::matrix(1, 2, {1, 2}), Tensor::matrix(1, 2, {2, 4}));
  EXPECT_DOUBLE_EQ(z[0], -1.0);
  EXPECT_NEAR(sigmoid(z[0]), 0.2689414213699951, 1e-12);
}

TEST(PredictLogit, ZeroInputGivesIntercept) {
  SraLinearModel m = random_sra(3, 8, 4, 1.0);
  m.get("intercept")[0] = 0.75;
  const Tensor z = m.logits(Tensor(Shape{2, 3}));
  EXPECT_EQ(z[0], 0.75);
  EXPECT_EQ(z[1], 0.75);
}

TEST(PredictLogit, ComposesWithZeroEncoders) {
  SraLinearModel m = zero_encoders(2, 4);
  m.get("beta") = Tensor::matrix(2, 1, {4, 4});
  EXPECT_DOUBLE_EQ(m.logits(Tensor::matrix(1, 2, {1, 1}))[0], 2.0);
}

TEST(PredictLogit, NonFiniteInputRejected) {
  const SraLinearModel m = SraLinearModel::init(2, 4, TaskKind::kBinary, 0);
  EXPECT_THROW(m.logits(Tensor::matrix(1, 2, {1, std::numeric_limits<double>::quiet_NaN()})),
               NumericError);
  EXPECT_THROW(m.logits(Tensor::matrix(1, 2, {std::numeric_limits<double>::infinity(), 0})),
               NumericError);
}

TEST(PredictLogit, BinaryAppliesSigmoidRegressionIdentity) {
  SraLinearModel b = zero_encoders(2, 4);
  b.get("intercept")[0] = 1.0;
  const Tensor x = Tensor::matrix(1, 2, {0, 0});
  EXPECT_DOUBLE_EQ(predict(b, x)[0], sigmoid(1.0));
  SraLinearModel r = SraLinearModel::init(2, 4, TaskKind::kRegression, 0);
  r.get("intercept")[0] = 1.0;
  EXPECT_DOUBLE_EQ(predict(r, x)[0], 1.0);
}

TEST(Decomposition, ExactForRandomModels) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SraLinearModel m = random_sra(5, 8, seed, 1.5);
    Rng rng = stream(seed, "test/x");
    const Tensor x = random_matrix(20, 5, rng);
    for (const Explanation& e : explain_batch(m, x)) {
      ASSERT_NEAR(e.residual(), 0.0, 1e-9);
    }
  }
}

TEST(Decomposition, MaskingShiftsLogitByContribution) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SraLinearModel m = random_sra(4, 4, seed, 1.5);
    Rng rng = stream(seed, "test/mask");
    const Tensor x = random_matrix(10, 4, rng);
    const auto ex = explain_batch(m, x);
    const Tensor base = m.logits(x);
    for (std::size_t j = 0; j < 4; ++j) {
      const Tensor masked = masked_logits(m, x, j);
      for (std::size_t i = 0; i < x.rows(); ++i) {
        ASSERT_NEAR(masked[i] - base[i], -ex[i].contributions[j], 1e-9);
      }
    }
  }
}

TEST(InitModel, SameSeedBitIdentical) {
  for (ModelKind k : {ModelKind::kSraLinear, ModelKind::kLinear, ModelKind::kMlp}) {
    const AnyModel a = init_model(k, 5, 8, TaskKind::kBinary, 9);
    const AnyModel b = init_model(k, 5, 8, TaskKind::kBinary, 9);
    EXPECT_EQ(checkpoint_string(a), checkpoint_string(b));
  }
  EXPECT_FALSE(SraLinearModel::init(5, 8, TaskKind::kBinary, 1) ==
               SraLinearModel::init(5, 8, TaskKind::kBinary, 2));
}

TEST(InitModel, EncoderLayerDims) {
  const SraLinearModel m = SraLinearModel::init(10, 8, TaskKind::kBinary, 0);
  for (const char* enc : {"key", "query"}) {
    const std::string e(enc);
    EXPECT_EQ(m.get(e + ".w1").shape(), Shape({10, 20}));
    EXPECT_EQ(m.get(e + ".w2").shape(), Shape({20, 40}));
    EXPECT_EQ(m.get(e + ".w3").shape(), Shape({40, 80}));
  }
  EXPECT_EQ(m.get("beta").shape(), Shape({10, 1}));
}

TEST(InitModel, MlpHiddenDims) {
  const MlpModel m = MlpModel::init(10, TaskKind::kBinary, 0);
  EXPECT_EQ(m.get("l1.w").shape(), Shape({10, 40}));
  EXPECT_EQ(m.get("l2.w").shape(), Shape({40, 20}));
  EXPECT_EQ(m.get("out.w").shape(), Shape({20, 1}));
}

TEST(InitModel, HeadStartsAtZeroAndWeightsWithinGlorotBound) {
  const SraLinearModel m = SraLinearModel::init(6, 8, TaskKind::kBinary, 5);
  for (double v : m.get("beta").values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(m.get("intercept")[0], 0.0);
  const double bound = std::sqrt(6.0 / (6 + 12));
  for (double v : m.get("key.w1").values()) EXPECT_LE(std::abs(v), bound);
}

TEST(InitModel, InvalidKeyWidth) {
  EXPECT_THROW(SraLinearModel::init(3, 2, TaskKind::kBinary, 0), ConfigError);
  EXPECT_THROW(SraLinearModel::init(3, 6, TaskKind::kBinary, 0), ConfigError);
  EXPECT_THROW(SraLinearModel::init(3, 0, TaskKind::kBinary, 0), ConfigError);
  EXPECT_NO_THROW(SraLinearModel::init(3, 12, TaskKind::kBinary, 0));
  EXPECT_THROW(init_model(ModelKind::kSraLinear, 0, 8, TaskKind::kBinary, 0), ConfigError);
}

TEST(InitModel, DecayOnlyOnEncoderWeights) {
  const SraLinearModel m = SraLinearModel::init(3, 4, TaskKind::kBinary, 0);
  for (const Parameter& p : m.params()) {
    const bool weight = p.name.find(".w") != std::string::npos;
    EXPECT_EQ(p.decay, weight) << p.name;
  }
  const LinearModel lr = LinearModel::init(3, TaskKind::kBinary);
  for (const Parameter& p : lr.params()) EXPECT_FALSE(p.decay) << p.name;
}

TEST(Baselines, ZeroWeightLogisticGivesHalf) {
  const LinearModel m = LinearModel::init(3, TaskKind::kBinary);
  Rng rng(4);
  const std::vector<double> prob = predict(m, random_matrix(6, 3, rng));
  for (double v : prob) EXPECT_EQ(v, 0.5);
}

TEST(Baselines, SingleFeatureAffine) {
  LinearModel m = LinearModel::init(3, TaskKind::kBinary);
  m.get("weight")[0] = 1.0;
  EXPECT_EQ(m.logits(Tensor::matrix(1, 3, {3, 5, -7}))[0], 3.0);
}

TEST(Baselines, MlpZeroFinalLayerIsConstant) {
  MlpModel m = MlpModel::init(4, TaskKind::kBinary, 2);
  for (double& v : m.get("out.w").values()) v = 0.0;
  m.get("out.b")[0] = -0.4;
  Rng rng(5);
  const Tensor z = m.logits(random_matrix(8, 4, rng));
  for (double v : z.values()) EXPECT_EQ(v, -0.4);
}

TEST(Baselines, ShapeMismatch) {
  EXPECT_THROW(LinearModel::init(3, TaskKind::kBinary).logits(Tensor(Shape{1, 2})), ShapeError);
  EXPECT_THROW(MlpModel::init(3, TaskKind::kBinary, 0).logits(Tensor(Shape{1, 4})), ShapeError);
}

TEST(Dropout, MaskValuesAndRateValidation) {
  Rng rng(6);
  const Tensor ones = dropout_mask(Shape{10, 10}, 0.0, rng);
  for (double v : ones.values()) EXPECT_EQ(v, 1.0);
  const Tensor m = dropout_mask(Shape{200, 200}, 0.25, rng);
  double sum = 0.0;
  for (double v : m.values()) {
    EXPECT_TRUE(v == 0.0 || std::abs(v - 1.0 / 0.75) < 1e-15);
    sum += v;
  }
  EXPECT_NEAR(sum / m.size(), 1.0, 0.02);
  EXPECT_THROW(dropout_mask(Shape{2}, 1.0, rng), ConfigError);
  EXPECT_THROW(dropout_mask(Shape{2}, -0.1, rng), ConfigError);
}

TEST(Dropout, OnlyActiveInTrainingMode) {
  const SraLinearModel m = random_sra(4, 8, 3, 1.0);
  Rng xr(7);
  const Tensor x = random_matrix(16, 4, xr);
  const Tensor eval1 = m.logits(x);
  EXPECT_EQ(eval1, m.logits(x));
  Rng dr(8);
  Tape t;
  const Tensor train =
      t.value(m.record_logit(t, t.constant(x), ForwardOptions::training(0.5, dr)));
  EXPECT_NE(train, eval1);
}

TEST(Checkpoint, RoundTripIsByteIdentical) {
  for (ModelKind k : {ModelKind::kSraLinear, ModelKind::kLinear, ModelKind::kMlp}) {
    for (TaskKind task : {TaskKind::kBinary, TaskKind::kRegression}) {
      AnyModel m = init_model(k, 4, 8, task, 21);
      std::visit(
          [](auto& model) {
            Rng rng(99);
            std::normal_distribution<double> n(0, 1);
            for (Parameter& p : model.params()) {
              for (double& v : p.value.values()) v = n(rng) / 3.0;
            }
          },
          m);
      const std::string first = checkpoint_string(m);
      std::istringstream in(first);
      const AnyModel back = read_checkpoint(in);
      EXPECT_EQ(checkpoint_string(back), first);
      EXPECT_EQ(kind_of(back), k);
      EXPECT_EQ(task_of(back), task);
      Rng rng(1);
      const Tensor x = random_matrix(3, 4, rng);
      EXPECT_EQ(predict_logit(back, x), predict_logit(m, x));
    }
  }
}

TEST(Checkpoint, RejectsMalformedInput) {
  std::istringstream bad_magic("not-a-checkpoint 1 sralinear p=2 dk=4 task=binary\n");
  EXPECT_ANY_THROW(read_checkpoint(bad_magic));
  const std::string good = checkpoint_string(init_model(ModelKind::kLinear, 2, 0,
                                                        TaskKind::kBinary, 0));
  std::istringstream truncated(good.substr(0, good.size() / 2));
  EXPECT_ANY_THROW(read_checkpoint(truncated));
  std::string renamed = good;
  renamed.replace(renamed.find("weight"), 6, "wieght");
  std::istringstream wrong_name(renamed);
  EXPECT_ANY_THROW(read_checkpoint(wrong_name));
}

}  // namespace
}  // namespace sra
