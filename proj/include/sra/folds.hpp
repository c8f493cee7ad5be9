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
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sra/errors.hpp"
#include "sra/rng.hpp"

namespace sra {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

namespace detail {

/// Indices grouped by class label (ascending label), each group shuffled.
inline std::vector<std::vector<std::size_t>> shuffled_classes(std::span<const double> labels,
                                                              Rng& rng) {
  std::map<double, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [label, idx] : groups) {
    std::shuffle(idx.begin(), idx.end(), rng);
    out.push_back(std::move(idx));
  }
  return out;
}

}  // namespace detail

/// k disjoint test folds covering every index. Indices are grouped by class,
/// shuffled within class, then dealt round-robin across folds with one
/// counter running through all classes, so per-fold class counts differ by
/// at most one. Pass `stratify = false` to treat all rows as one class.
inline std::vector<Split> stratified_kfold(std::span<const double> labels, std::size_t k,
                                           std::uint64_t seed, bool stratify = true) {
  if (k < 2) throw ConfigError("k-fold requires k >= 2, got " + std::to_string(k));
  if (k > labels.size()) {
    throw ConfigError("k-fold: k=" + std::to_string(k) + " exceeds " +
                      std::to_string(labels.size()) + " rows");
  }
  Rng rng = stream(seed, "folds");
  std::vector<double> flat;
  if (!stratify) flat.assign(labels.size(), 0.0);
  const auto groups = detail::shuffled_classes(stratify ? labels : std::span<const double>(flat), rng);

  std::vector<Split> folds(k);
  std::size_t counter = 0;
  for (const auto& g : groups) {
    for (std::size_t i : g) folds[counter++ % k].test.push_back(i);
  }
  std::vector<std::size_t> owner(labels.size());
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(folds[f].test.begin(), folds[f].test.end());
    for (std::size_t i : folds[f].test) owner[i] = f;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      if (owner[i] != f) folds[f].train.push_back(i);
    }
  }
  return folds;
}

/// Splits positions 0..labels.size()-1 into (train, validation) with
/// round(fraction * class size) validation rows per class, at least one
/// overall. Returned positions are sorted.
inline Split validation_split(std::span<const double> labels, double fraction,
                              std::uint64_t seed, bool stratify = true) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("validation fraction must lie in (0, 1)");
  }
  if (labels.size() < 2) throw DataError("need at least two rows to carve a validation split");
  Rng rng = stream(seed, "validation");
  std::vector<double> flat;
  if (!stratify) flat.assign(labels.size(), 0.0);
  const auto groups = detail::shuffled_classes(stratify ? labels : std::span<const double>(flat), rng);
  Split s;
  for (const auto& g : groups) {
    std::size_t take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(g.size())));
    take = std::min(take, g.size() > 1 ? g.size() - 1 : g.size());
    s.test.insert(s.test.end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(take));
    s.train.insert(s.train.end(), g.begin() + static_cast<std::ptrdiff_t>(take), g.end());
  }
  if (s.test.empty()) {
    s.test.push_back(s.train.back());
    s.train.pop_back();
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

}  // namespace sra
