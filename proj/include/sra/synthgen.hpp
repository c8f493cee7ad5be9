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

// Deterministic synthetic datasets. Every generator is a pure function of
// (kind, n, seed, noise); labels are deterministic functions of the sampled
// features.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sra/dataset.hpp"
#include "sra/errors.hpp"
#include "sra/rng.hpp"
#include "sra/tensor.hpp"

namespace sra::synth {

enum class Kind {
  kF1Toy,
  kSynthetic1,
  kSynthetic2,
  kGauss2d,
  kTwoMoons,
  kRings,
  kTwoDisks,
  kDenseDisk,
  kChainlink2d,
  kFiveSpheres,
};

struct KindInfo {
  Kind kind;
  std::string_view name;
  std::size_t default_n;
  double default_noise;
};

inline constexpr KindInfo kKinds[] = {
    {Kind::kF1Toy, "f1-toy", 7500, 0.0},
    {Kind::kSynthetic1, "synthetic1", 30000, 0.0},
    {Kind::kSynthetic2, "synthetic2", 60000, 0.0},
    {Kind::kGauss2d, "gauss2d", 1000, 1.0},
    {Kind::kTwoMoons, "two-moons", 373, 0.1},
    {Kind::kRings, "rings", 1000, 0.05},
    {Kind::kTwoDisks, "two-disks", 800, 0.0},
    {Kind::kDenseDisk, "dense-disk", 3000, 0.0},
    {Kind::kChainlink2d, "chainlink2d", 1000, 0.05},
    {Kind::kFiveSpheres, "five-spheres", 250, 0.5},
};

inline const KindInfo& info(Kind k) {
  for (const auto& i : kKinds) {
    if (i.kind == k) return i;
  }
  throw ConfigError("unknown synthetic kind");
}

inline Kind parse_kind(std::string_view s) {
  for (const auto& i : kKinds) {
    if (i.name == s) return i.kind;
  }
  throw ConfigError("unknown synthetic dataset kind '" + std::string(s) + "'");
}

/// Generated features (n x p) with targets. Binary kinds use 0/1 targets.
struct Sample {
  Tensor x;
  std::vector<double> y;
  TaskKind task = TaskKind::kBinary;

  std::vector<std::string> feature_names() const {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < x.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
    return names;
  }

  TabularDataset dataset(std::string provenance = {}) const {
    TabularDataset d = TabularDataset::from_matrix(x, y, feature_names(), "y");
    d.provenance = std::move(provenance);
    return d;
  }
};

// Label functions.

/// F1 = 5 x1 - 5 x2 1[x1 > 0]
inline double f1_score(double x1, double x2) { return 5.0 * x1 - 5.0 * x2 * (x1 > 0.0 ? 1.0 : 0.0); }

/// y = 1[sigmoid(F1) > 0.5], i.e. 1[F1 > 0].
inline double f1_label(double x1, double x2) {
  const double p = 1.0 / (1.0 + std::exp(-f1_score(x1, x2)));
  return p > 0.5 ? 1.0 : 0.0;
}

/// y = (5 x1 - 5 x2) 1[x5 <= 0] + (5 x3 - 5 x4) 1[x5 > 0]
inline double synthetic1_target(std::span<const double> x) {
  return x[4] <= 0.0 ? 5.0 * x[0] - 5.0 * x[1] : 5.0 * x[2] - 5.0 * x[3];
}

/// 1 inside either unit disk centred at (-2.5, 0) or (2.5, 1.5).
inline double synthetic2_label(double x1, double x2) {
  const bool a = (x1 + 2.5) * (x1 + 2.5) + x2 * x2 < 1.0;
  const bool b = (x1 - 2.5) * (x1 - 2.5) + (x2 - 1.5) * (x2 - 1.5) < 1.0;
  return (a || b) ? 1.0 : 0.0;
}

namespace detail {

inline void require_n(std::size_t n) {
  if (n < 1) throw ConfigError("sample count must be >= 1");
}

inline Tensor standard_normal(std::size_t n, std::size_t p, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor x(Shape{n, p});
  for (double& v : x.values()) v = normal(rng);
  return x;
}

/// Point uniform in the annulus lo <= r <= hi.
inline std::pair<double, double> uniform_annulus(double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = std::sqrt(lo * lo + (hi * hi - lo * lo) * u(rng));
  const double t = 2.0 * std::numbers::pi * u(rng);
  return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace detail

inline Sample gen_f1(std::size_t n, std::uint64_t seed) {
  detail::require_n(n);
  Rng rng = stream(seed, "synth/f1-toy");
  Sample s{detail::standard_normal(n, 2, rng), std::vector<double>(n), TaskKind::kBinary};
  for (std::size_t i = 0; i < n; ++i) s.y[i] = f1_label(s.x.at(i, 0), s.x.at(i, 1));
  return s;
}

inline Sample gen_synthetic1(std::size_t n, std::uint64_t seed) {
  detail::require_n(n);
  Rng rng = stream(seed, "synth/synthetic1");
  Sample s{detail::standard_normal(n, 5, rng), std::vector<double>(n), TaskKind::kRegression};
  for (std::size_t i = 0; i < n; ++i) s.y[i] = synthetic1_target(s.x.row(i));
  return s;
}

inline Sample gen_synthetic2(std::size_t n, std::uint64_t seed) {
  detail::require_n(n);
  Rng rng = stream(seed, "synth/synthetic2");
  Sample s{detail::standard_normal(n, 5, rng), std::vector<double>(n), TaskKind::kBinary};
  for (std::size_t i = 0; i < n; ++i) s.y[i] = synthetic2_label(s.x.at(i, 0), s.x.at(i, 1));
  return s;
}

/// Two-class planar shapes. Geometry (all classes split as evenly as n
/// allows, first half class 0):
///   gauss2d      N((-1,0), noise^2 I) vs N((1,0), noise^2 I)
///   two-moons    unit upper arc vs lower arc shifted by (1, 0.5), Gaussian noise
///   rings        class 1 radii in [0.5, 1], class 0 radii in [1.5, 2]; noise
///                jitters the radius but is clipped to the ring
///   two-disks    unit disks centred at (-1.25, 0) and (1.25, 0)
///   dense-disk   class 1 fills r <= 0.5, class 0 the sparse annulus [1, 3]
///   chainlink2d  two interlocking unit rings (xy-plane at the origin and
///                xz-plane at (1,0,0)) projected onto (x, 0.5 y + 0.8 z)
///   five-spheres Gaussian blobs at (0,0) (class 1) and (+-2.5, +-2.5)
inline Sample gen_shape2d(Kind kind, std::size_t n, std::uint64_t seed, double noise) {
  detail::require_n(n);
  if (noise < 0.0) throw ConfigError("noise scale must be non-negative");
  Rng rng = stream(seed, std::string("synth/") + std::string(info(kind).name));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Sample s{Tensor(Shape{n, 2}), std::vector<double>(n), TaskKind::kBinary};
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const bool positive = i >= half;
    double a = 0.0, b = 0.0, label = positive ? 1.0 : 0.0;
    bool isotropic_noise = true;
    switch (kind) {
      case Kind::kGauss2d:
        a = (positive ? 1.0 : -1.0) + noise * normal(rng);
        b = noise * normal(rng);
        isotropic_noise = false;
        break;
      case Kind::kTwoMoons: {
        const double t = std::numbers::pi * unit(rng);
        a = positive ? 1.0 - std::cos(t) : std::cos(t);
        b = positive ? 0.5 - std::sin(t) : std::sin(t);
        break;
      }
      case Kind::kRings: {
        const double lo = positive ? 0.5 : 1.5, hi = lo + 0.5;
        const double t = 2.0 * std::numbers::pi * unit(rng);
        double r = lo + (hi - lo) * unit(rng) + noise * normal(rng);
        r = std::clamp(r, lo, hi);
        a = r * std::cos(t);
        b = r * std::sin(t);
        isotropic_noise = false;
        break;
      }
      case Kind::kTwoDisks: {
        auto [u, v] = detail::uniform_annulus(0.0, 1.0, rng);
        a = u + (positive ? 1.25 : -1.25);
        b = v;
        break;
      }
      case Kind::kDenseDisk: {
        auto [u, v] = positive ? detail::uniform_annulus(0.0, 0.5, rng)
                               : detail::uniform_annulus(1.0, 3.0, rng);
        a = u;
        b = v;
        break;
      }
      case Kind::kChainlink2d: {
        const double t = 2.0 * std::numbers::pi * unit(rng);
        if (positive) {
          a = 1.0 + std::cos(t);
          b = 0.8 * std::sin(t);
        } else {
          a = std::cos(t);
          b = 0.5 * std::sin(t);
        }
        break;
      }
      case Kind::kFiveSpheres: {
        static constexpr double kCenters[5][2] = {
            {0.0, 0.0}, {2.5, 2.5}, {-2.5, 2.5}, {-2.5, -2.5}, {2.5, -2.5}};
        const std::size_t c = i % 5;
        a = kCenters[c][0] + noise * normal(rng);
        b = kCenters[c][1] + noise * normal(rng);
        label = c == 0 ? 1.0 : 0.0;
        isotropic_noise = false;
        break;
      }
      default:
        throw ConfigError("'" + std::string(info(kind).name) + "' is not a 2-D shape kind");
    }
    if (isotropic_noise && noise > 0.0) {
      a += noise * normal(rng);
      b += noise * normal(rng);
    }
    s.x.at(i, 0) = a;
    s.x.at(i, 1) = b;
    s.y[i] = label;
  }
  return s;
}

struct SynthSpec {
  Kind kind = Kind::kF1Toy;
  std::size_t n = 0;  // 0 selects the kind's default count
  std::uint64_t seed = 0;
  double noise = -1.0;  // negative selects the kind's default noise
};

inline Sample generate(const SynthSpec& spec) {
  const KindInfo& ki = info(spec.kind);
  const std::size_t n = spec.n ? spec.n : ki.default_n;
  const double noise = spec.noise < 0.0 ? ki.default_noise : spec.noise;
  switch (spec.kind) {
    case Kind::kF1Toy: return gen_f1(n, spec.seed);
    case Kind::kSynthetic1: return gen_synthetic1(n, spec.seed);
    case Kind::kSynthetic2: return gen_synthetic2(n, spec.seed);
    default: return gen_shape2d(spec.kind, n, spec.seed, noise);
  }
}

}  // namespace sra::synth
