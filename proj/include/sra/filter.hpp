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

// Row filters of the form "x5<=0" or "x5<=0 and y==1". Each clause compares
// one column (raw units, or the target) against a constant.

#pragma once

#include <cctype>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "sra/dataset.hpp"
#include "sra/errors.hpp"
#include "sra/format.hpp"

namespace sra {

class RowFilter {
 public:
  enum class Op { kLt, kLe, kGt, kGe, kEq, kNe };

  struct Clause {
    std::string column;
    Op op = Op::kEq;
    std::string constant;
  };

  RowFilter() = default;

  static RowFilter parse(std::string_view expr) {
    RowFilter f;
    std::size_t pos = 0;
    while (true) {
      const std::size_t next = find_and(expr, pos);
      f.clauses_.push_back(parse_clause(expr.substr(pos, next - pos)));
      if (next == expr.size()) break;
      pos = next + 5;  // " and "
    }
    return f;
  }

  bool empty() const { return clauses_.empty(); }
  const std::vector<Clause>& clauses() const { return clauses_; }

  /// Throws ConfigError if a clause names a column `data` does not have.
  void validate(const TabularDataset& data) const {
    for (const auto& c : clauses_) {
      const Column* col = data.find(c.column);
      if (c.column == data.target_name) continue;
      if (!col) throw ConfigError("filter references unknown feature '" + c.column + "'");
      if (col->kind == ColumnKind::kCategorical && c.op != Op::kEq && c.op != Op::kNe) {
        throw ConfigError("filter: categorical column '" + c.column + "' supports only == and !=");
      }
      if (col->kind == ColumnKind::kNumeric) parse_double(c.constant);
    }
  }

  bool matches(const TabularDataset& data, std::size_t row) const {
    for (const auto& c : clauses_) {
      if (c.column == data.target_name) {
        if (!compare(data.target[row], c.op, parse_double(c.constant))) return false;
        continue;
      }
      const Column* col = data.find(c.column);
      if (!col) throw ConfigError("filter references unknown feature '" + c.column + "'");
      if (col->kind == ColumnKind::kCategorical) {
        const bool eq = col->categorical[row] == c.constant;
        if (eq != (c.op == Op::kEq)) return false;
      } else {
        const double v = col->numeric[row];
        if (std::isnan(v) || !compare(v, c.op, parse_double(c.constant))) return false;
      }
    }
    return true;
  }

  /// Rows of `candidates` (all rows when empty) that satisfy every clause.
  std::vector<std::size_t> select(const TabularDataset& data,
                                  const std::vector<std::size_t>& candidates = {}) const {
    validate(data);
    std::vector<std::size_t> out;
    auto consider = [&](std::size_t r) {
      if (matches(data, r)) out.push_back(r);
    };
    if (candidates.empty()) {
      for (std::size_t r = 0; r < data.rows(); ++r) consider(r);
    } else {
      for (std::size_t r : candidates) consider(r);
    }
    return out;
  }

 private:
  static std::size_t find_and(std::string_view expr, std::size_t from) {
    const std::size_t p = expr.find(" and ", from);
    return p == std::string_view::npos ? expr.size() : p;
  }

  static std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
  }

  static Clause parse_clause(std::string_view text) {
    static constexpr std::pair<std::string_view, Op> kOps[] = {
        {"<=", Op::kLe}, {">=", Op::kGe}, {"==", Op::kEq}, {"!=", Op::kNe},
        {"<", Op::kLt},  {">", Op::kGt},  {"=", Op::kEq}};
    for (const auto& [tok, op] : kOps) {
      const std::size_t p = text.find(tok);
      if (p == std::string_view::npos) continue;
      Clause c{trim(text.substr(0, p)), op, trim(text.substr(p + tok.size()))};
      if (c.column.empty() || c.constant.empty()) break;
      return c;
    }
    throw ConfigError("cannot parse filter clause '" + std::string(text) +
                      "' (expected 'feature op constant')");
  }

  static bool compare(double v, Op op, double k) {
    switch (op) {
      case Op::kLt: return v < k;
      case Op::kLe: return v <= k;
      case Op::kGt: return v > k;
      case Op::kGe: return v >= k;
      case Op::kEq: return v == k;
      case Op::kNe: return v != k;
    }
    return false;
  }

  std::vector<Clause> clauses_;
};

}  // namespace sra
