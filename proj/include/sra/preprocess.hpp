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
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sra/dataset.hpp"
#include "sra/errors.hpp"
#include "sra/tensor.hpp"

namespace sra {

/// Standardization for numeric columns and one-hot encoding for categorical
/// columns, fitted on a training split only.
///
/// Numeric: (v - mean) / std with the population std; a zero-variance column
/// maps to zeros and a missing value is imputed with the fitted mean (so it
/// also maps to zero). Categorical: one indicator per fitted vocabulary entry
/// in sorted order; categories unseen during fit encode as an all-zero block.
class Preprocessor {
 public:
  struct ColumnStats {
    std::string name;
    ColumnKind kind = ColumnKind::kNumeric;
    double mean = 0.0;
    double std = 0.0;
    std::vector<std::string> vocabulary;

    friend bool operator==(const ColumnStats&, const ColumnStats&) = default;
  };

  bool fitted() const { return fitted_; }
  const std::vector<ColumnStats>& columns() const { return columns_; }

  void fit(const TabularDataset& train) {
    columns_.clear();
    for (const auto& c : train.features) {
      ColumnStats s;
      s.name = c.name;
      s.kind = c.kind;
      if (c.kind == ColumnKind::kNumeric) {
        double sum = 0.0;
        std::size_t n = 0;
        for (double v : c.numeric) {
          if (std::isnan(v)) continue;
          sum += v;
          ++n;
        }
        s.mean = n ? sum / static_cast<double>(n) : 0.0;
        double ss = 0.0;
        for (double v : c.numeric) {
          if (!std::isnan(v)) ss += (v - s.mean) * (v - s.mean);
        }
        s.std = n ? std::sqrt(ss / static_cast<double>(n)) : 0.0;
      } else {
        std::set<std::string> vocab(c.categorical.begin(), c.categorical.end());
        s.vocabulary.assign(vocab.begin(), vocab.end());
        if (s.vocabulary.empty()) {
          throw DataError("categorical column '" + c.name + "' has no values to fit");
        }
      }
      columns_.push_back(std::move(s));
    }
    fitted_ = true;
  }

  /// Encoded width after one-hot expansion.
  std::size_t width() const {
    require_fitted();
    std::size_t p = 0;
    for (const auto& c : columns_) p += c.kind == ColumnKind::kNumeric ? 1 : c.vocabulary.size();
    return p;
  }

  /// Encoded feature names: numeric columns keep their name, indicators are
  /// "column=value".
  std::vector<std::string> feature_names() const {
    require_fitted();
    std::vector<std::string> out;
    for (const auto& c : columns_) {
      if (c.kind == ColumnKind::kNumeric) {
        out.push_back(c.name);
      } else {
        for (const auto& v : c.vocabulary) out.push_back(c.name + "=" + v);
      }
    }
    return out;
  }

  Tensor transform(const TabularDataset& data) const {
    require_fitted();
    if (data.features.size() != columns_.size()) {
      throw DataError("transform: dataset has " + std::to_string(data.features.size()) +
                      " feature columns, preprocessor was fitted on " +
                      std::to_string(columns_.size()));
    }
    const std::size_t n = data.rows();
    const std::size_t p = width();
    Tensor x(Shape{n, p});
    std::size_t offset = 0;
    for (std::size_t j = 0; j < columns_.size(); ++j) {
      const ColumnStats& s = columns_[j];
      const Column& c = data.features[j];
      if (c.name != s.name || c.kind != s.kind) {
        throw DataError("transform: column '" + c.name + "' does not match fitted column '" +
                        s.name + "'");
      }
      if (s.kind == ColumnKind::kNumeric) {
        for (std::size_t i = 0; i < n; ++i) {
          const double v = std::isnan(c.numeric[i]) ? s.mean : c.numeric[i];
          x.at(i, offset) = s.std > 0.0 ? (v - s.mean) / s.std : 0.0;
        }
        offset += 1;
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          auto it = std::lower_bound(s.vocabulary.begin(), s.vocabulary.end(), c.categorical[i]);
          if (it != s.vocabulary.end() && *it == c.categorical[i]) {
            x.at(i, offset + static_cast<std::size_t>(it - s.vocabulary.begin())) = 1.0;
          }
        }
        offset += s.vocabulary.size();
      }
    }
    return x;
  }

  Tensor fit_transform(const TabularDataset& train) {
    fit(train);
    return transform(train);
  }

  nlohmann::json to_json() const {
    require_fitted();
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : columns_) {
      nlohmann::json j{{"name", c.name}, {"kind", std::string(column_kind_name(c.kind))}};
      if (c.kind == ColumnKind::kNumeric) {
        j["mean"] = c.mean;
        j["std"] = c.std;
      } else {
        j["vocabulary"] = c.vocabulary;
      }
      cols.push_back(std::move(j));
    }
    return {{"format", "sra-preprocessor"}, {"version", 1}, {"columns", cols}};
  }

  static Preprocessor from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "sra-preprocessor") throw DataError("not a preprocessor file");
    Preprocessor p;
    for (const auto& c : j.at("columns")) {
      ColumnStats s;
      s.name = c.at("name").get<std::string>();
      s.kind = parse_column_kind(c.at("kind").get<std::string>());
      if (s.kind == ColumnKind::kNumeric) {
        s.mean = c.at("mean").get<double>();
        s.std = c.at("std").get<double>();
      } else {
        s.vocabulary = c.at("vocabulary").get<std::vector<std::string>>();
      }
      p.columns_.push_back(std::move(s));
    }
    p.fitted_ = true;
    return p;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << to_json().dump(2) << '\n';
  }

  static Preprocessor load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open preprocessor '" + path + "'");
    return from_json(nlohmann::json::parse(in));
  }

  friend bool operator==(const Preprocessor&, const Preprocessor&) = default;

 private:
  void require_fitted() const {
    if (!fitted_) throw std::logic_error("preprocessor used before fit");
  }

  std::vector<ColumnStats> columns_;
  bool fitted_ = false;
};

}  // namespace sra
