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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sra/synthgen.hpp"

namespace sra::synth {
namespace {

// P(inside either unit disk) under N(0, I), by adaptive 2-D quadrature
// (scipy.integrate.dblquad, epsabs 1e-13).
constexpr double kSynthetic2Rate = 0.04647283429332369;

// Midpoint rule in polar coordinates around each disk centre.
double disk_mass(double cx, double cy) {
  const int nr = 400, nt = 800;
  double total = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) / nr;
    for (int j = 0; j < nt; ++j) {
      const double t = 2.0 * std::numbers::pi * (j + 0.5) / nt;
      const double x = cx + r * std::cos(t), y = cy + r * std::sin(t);
      total += r * std::exp(-(x * x + y * y) / 2.0);
    }
  }
  return total * (1.0 / nr) * (2.0 * std::numbers::pi / nt) / (2.0 * std::numbers::pi);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

TEST(F1Label, HandEvaluatedPoints) {
  EXPECT_EQ(f1_score(1, 1), 0.0);
  EXPECT_EQ(f1_label(1, 1), 0.0);
  EXPECT_EQ(f1_score(1, -1), 10.0);
  EXPECT_EQ(f1_label(1, -1), 1.0);
  EXPECT_EQ(f1_score(-2, 7), -10.0);
  EXPECT_EQ(f1_label(-2, 7), 0.0);
}

TEST(Synthetic1Target, PiecewiseBranches) {
  const std::vector<double> a{1, 0, 9, 9, -1};
  const std::vector<double> b{9, 9, 1, 0, 1};
  const std::vector<double> c{0, 0, 0, 0, 3.7};
  EXPECT_EQ(synthetic1_target(a), 5.0);
  EXPECT_EQ(synthetic1_target(b), 5.0);
  EXPECT_EQ(synthetic1_target(c), 0.0);
}

TEST(Synthetic2Label, CentresAndOrigin) {
  EXPECT_EQ(synthetic2_label(-2.5, 0), 1.0);
  EXPECT_EQ(synthetic2_label(2.5, 1.5), 1.0);
  EXPECT_EQ(synthetic2_label(0, 0), 0.0);
  EXPECT_EQ(synthetic2_label(-1.5, 0), 0.0);  // boundary is open
}

TEST(Synthetic2, QuadratureOraclesAgree) {
  EXPECT_NEAR(disk_mass(-2.5, 0) + disk_mass(2.5, 1.5), kSynthetic2Rate, 1e-5);
}

TEST(Synthetic2, PositiveRateWithinThreeSigma) {
  const std::size_t n = 60000;
  const double sigma = std::sqrt(kSynthetic2Rate * (1 - kSynthetic2Rate) / n);
  for (std::uint64_t seed : {0u, 1u, 42u}) {
    const Sample s = gen_synthetic2(n, seed);
    EXPECT_NEAR(mean(s.y), kSynthetic2Rate, 3 * sigma) << "seed " << seed;
  }
}

TEST(Generators, BitExactUnderSeed) {
  for (const KindInfo& k : kKinds) {
    const SynthSpec spec{k.kind, 300, 5, -1.0};
    const Sample a = generate(spec);
    const Sample b = generate(spec);
    EXPECT_EQ(a.x, b.x) << k.name;
    EXPECT_EQ(a.y, b.y) << k.name;
    EXPECT_FALSE(generate(SynthSpec{k.kind, 300, 6, -1.0}).x == a.x) << k.name;
  }
}

TEST(Generators, LabelsRederiveFromFeatures) {
  const Sample f = gen_f1(2000, 3);
  const Sample s1 = gen_synthetic1(2000, 3);
  const Sample s2 = gen_synthetic2(2000, 3);
  for (std::size_t i = 0; i < 2000; ++i) {
    ASSERT_EQ(f.y[i], f1_label(f.x.at(i, 0), f.x.at(i, 1)));
    ASSERT_EQ(s1.y[i], synthetic1_target(s1.x.row(i)));
    ASSERT_EQ(s2.y[i], synthetic2_label(s2.x.at(i, 0), s2.x.at(i, 1)));
    if (s1.x.at(i, 4) <= 0.0) ASSERT_EQ(s1.y[i], 5 * s1.x.at(i, 0) - 5 * s1.x.at(i, 1));
  }
}

TEST(Generators, StandardNormalFeatures) {
  const Sample s = gen_synthetic1(30000, 1);
  for (std::size_t j = 0; j < 5; ++j) {
    double m = 0, v = 0;
    for (std::size_t i = 0; i < s.x.rows(); ++i) m += s.x.at(i, j);
    m /= s.x.rows();
    for (std::size_t i = 0; i < s.x.rows(); ++i) v += (s.x.at(i, j) - m) * (s.x.at(i, j) - m);
    v /= s.x.rows();
    EXPECT_NEAR(m, 0.0, 0.03);
    EXPECT_NEAR(v, 1.0, 0.05);
  }
  EXPECT_EQ(s.task, TaskKind::kRegression);
}

TEST(Shapes, TwoMoonsWithoutNoiseLieOnArcs) {
  const Sample s = gen_shape2d(Kind::kTwoMoons, 373, 2, 0.0);
  for (std::size_t i = 0; i < s.x.rows(); ++i) {
    const double a = s.x.at(i, 0), b = s.x.at(i, 1);
    if (s.y[i] == 0.0) {
      EXPECT_NEAR(a * a + b * b, 1.0, 1e-12);
      EXPECT_GE(b, 0.0);
    } else {
      EXPECT_NEAR((a - 1) * (a - 1) + (b - 0.5) * (b - 0.5), 1.0, 1e-12);
      EXPECT_LE(b, 0.5 + 1e-15);
    }
  }
}

TEST(Shapes, RingsRadiallySeparable) {
  const Sample s = generate(SynthSpec{Kind::kRings, 0, 3, -1.0});
  EXPECT_EQ(s.x.rows(), 1000u);
  double max_inner = 0.0, min_outer = 1e9;
  for (std::size_t i = 0; i < s.x.rows(); ++i) {
    const double r = std::hypot(s.x.at(i, 0), s.x.at(i, 1));
    if (s.y[i] == 1.0) {
      max_inner = std::max(max_inner, r);
    } else {
      min_outer = std::min(min_outer, r);
    }
  }
  EXPECT_LT(max_inner, min_outer);
}

TEST(Shapes, DefaultCountsMatchFigureCaptions) {
  const std::pair<Kind, std::size_t> expected[] = {
      {Kind::kTwoMoons, 373}, {Kind::kRings, 1000},     {Kind::kChainlink2d, 1000},
      {Kind::kTwoDisks, 800}, {Kind::kDenseDisk, 3000}, {Kind::kFiveSpheres, 250},
      {Kind::kF1Toy, 7500},   {Kind::kSynthetic1, 30000}, {Kind::kSynthetic2, 60000}};
  for (const auto& [kind, n] : expected) {
    const Sample s = generate(SynthSpec{kind, 0, 0, -1.0});
    EXPECT_EQ(s.x.rows(), n) << info(kind).name;
    EXPECT_EQ(s.y.size(), n) << info(kind).name;
  }
}

TEST(Shapes, BothClassesPresent) {
  for (const KindInfo& k : kKinds) {
    if (k.kind == Kind::kSynthetic1) continue;
    const Sample s = generate(SynthSpec{k.kind, 0, 1, -1.0});
    const double rate = mean(s.y);
    EXPECT_GT(rate, 0.0) << k.name;
    EXPECT_LT(rate, 1.0) << k.name;
  }
}

TEST(Shapes, Errors) {
  EXPECT_THROW(parse_kind("swiss-roll"), ConfigError);
  EXPECT_THROW(gen_shape2d(Kind::kF1Toy, 10, 0, 0.0), ConfigError);
  EXPECT_THROW(gen_shape2d(Kind::kRings, 10, 0, -0.5), ConfigError);
  EXPECT_THROW(gen_f1(0, 0), ConfigError);
  EXPECT_EQ(parse_kind("chainlink2d"), Kind::kChainlink2d);
}

}  // namespace
}  // namespace sra::synth
