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

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sra/csv.hpp"
#include "sra/errors.hpp"
#include "sra/format.hpp"
#include "sra/model.hpp"

namespace sra {

enum class ColumnKind { kNumeric, kCategorical, kTarget };

inline std::string_view column_kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::kNumeric: return "numeric";
    case ColumnKind::kCategorical: return "categorical";
    case ColumnKind::kTarget: return "target";
  }
  return "unknown";
}

inline ColumnKind parse_column_kind(std::string_view s) {
  if (s == "numeric") return ColumnKind::kNumeric;
  if (s == "categorical") return ColumnKind::kCategorical;
  if (s == "target") return ColumnKind::kTarget;
  throw DataError("unknown column kind '" + std::string(s) + "'");
}

/// Token used for absent categorical values.
inline constexpr std::string_view kMissingCategory = "<missing>";

inline bool is_missing_token(std::string_view s) {
  return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "?";
}

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
};

/// Ordered column descriptors; exactly one target.
struct SchemaSpec {
  std::vector<ColumnSpec> columns;

  const ColumnSpec& target() const {
    for (const auto& c : columns) {
      if (c.kind == ColumnKind::kTarget) return c;
    }
    throw DataError("schema has no target column");
  }

  void validate() const {
    std::size_t targets = 0;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      targets += columns[i].kind == ColumnKind::kTarget;
      for (std::size_t j = 0; j < i; ++j) {
        if (columns[i].name == columns[j].name) {
          throw DataError("schema lists column '" + columns[i].name + "' twice");
        }
      }
    }
    if (targets != 1) {
      throw DataError("schema must declare exactly one target column, found " +
                      std::to_string(targets));
    }
  }

  /// "name,kind" lines; blank lines and '#' comments are ignored.
  static SchemaSpec parse(std::istream& in) {
    SchemaSpec spec;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.rfind(',');
      if (comma == std::string::npos) {
        throw DataError("schema line " + std::to_string(lineno) + ": expected 'name,kind'");
      }
      spec.columns.push_back({line.substr(0, comma), parse_column_kind(line.substr(comma + 1))});
    }
    spec.validate();
    return spec;
  }

  static SchemaSpec load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open schema '" + path + "'");
    return parse(in);
  }

  void write(std::ostream& out) const {
    for (const auto& c : columns) out << c.name << ',' << column_kind_name(c.kind) << '\n';
  }
};

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  std::vector<double> numeric;           // NaN marks a missing value
  std::vector<std::string> categorical;  // kMissingCategory marks a missing value
};

/// Raw typed rows plus targets.
struct TabularDataset {
  std::vector<Column> features;
  std::string target_name;
  std::vector<double> target;
  std::string provenance;

  std::size_t rows() const { return target.size(); }

  const Column* find(std::string_view name) const {
    for (const auto& c : features) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

  /// Binary when every target is 0 or 1.
  TaskKind infer_task() const {
    for (double y : target) {
      if (y != 0.0 && y != 1.0) return TaskKind::kRegression;
    }
    return TaskKind::kBinary;
  }

  TabularDataset subset(std::span<const std::size_t> idx) const {
    TabularDataset out;
    out.target_name = target_name;
    out.provenance = provenance;
    out.target.reserve(idx.size());
    for (std::size_t i : idx) out.target.push_back(target.at(i));
    for (const auto& c : features) {
      Column col{c.name, c.kind, {}, {}};
      if (c.kind == ColumnKind::kNumeric) {
        for (std::size_t i : idx) col.numeric.push_back(c.numeric.at(i));
      } else {
        for (std::size_t i : idx) col.categorical.push_back(c.categorical.at(i));
      }
      out.features.push_back(std::move(col));
    }
    return out;
  }

  /// All-numeric dataset from a dense feature matrix.
  static TabularDataset from_matrix(const Tensor& x, std::vector<double> y,
                                    const std::vector<std::string>& names,
                                    std::string target_name = "y") {
    if (x.rows() != y.size() || names.size() != x.cols()) {
      throw ShapeError("from_matrix: inconsistent feature/target sizes");
    }
    TabularDataset d;
    d.target_name = std::move(target_name);
    d.target = std::move(y);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      Column c{names[j], ColumnKind::kNumeric, {}, {}};
      c.numeric.reserve(x.rows());
      for (std::size_t i = 0; i < x.rows(); ++i) c.numeric.push_back(x.at(i, j));
      d.features.push_back(std::move(c));
    }
    return d;
  }

  SchemaSpec schema() const {
    SchemaSpec s;
    for (const auto& c : features) s.columns.push_back({c.name, c.kind});
    s.columns.push_back({target_name, ColumnKind::kTarget});
    return s;
  }

  /// Writes the features in schema order followed by the target column.
  void write_csv(std::ostream& out) const {
    for (const auto& c : features) out << csv::escape(c.name) << ',';
    out << csv::escape(target_name) << '\n';
    for (std::size_t i = 0; i < rows(); ++i) {
      for (const auto& c : features) {
        if (c.kind == ColumnKind::kNumeric) {
          if (!std::isnan(c.numeric[i])) out << format_double(c.numeric[i]);
        } else if (c.categorical[i] != kMissingCategory) {
          out << csv::escape(c.categorical[i]);
        }
        out << ',';
      }
      out << format_double(target[i]) << '\n';
    }
  }
};

/// Reads `in` with a header row; only columns named by `schema` are kept.
inline TabularDataset read_csv(std::istream& in, const SchemaSpec& schema,
                               std::string provenance = {}) {
  schema.validate();
  csv::Reader reader(in);
  csv::Record header;
  if (!reader.next(header)) throw DataError("csv input is empty");

  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.fields.size(); ++i) position[header.fields[i]] = i;

  TabularDataset d;
  d.provenance = std::move(provenance);
  std::vector<std::size_t> where;
  std::size_t target_pos = 0;
  for (const auto& spec : schema.columns) {
    auto it = position.find(spec.name);
    if (it == position.end()) {
      throw DataError(spec.kind == ColumnKind::kTarget
                          ? "target column '" + spec.name + "' not found in csv header"
                          : "column '" + spec.name + "' not found in csv header");
    }
    if (spec.kind == ColumnKind::kTarget) {
      d.target_name = spec.name;
      target_pos = it->second;
    } else {
      d.features.push_back({spec.name, spec.kind, {}, {}});
      where.push_back(it->second);
    }
  }

  csv::Record rec;
  while (reader.next(rec)) {
    if (rec.fields.size() != header.fields.size()) {
      throw DataError("csv line " + std::to_string(rec.line) + ": expected " +
                      std::to_string(header.fields.size()) + " fields, found " +
                      std::to_string(rec.fields.size()));
    }
    for (std::size_t j = 0; j < d.features.size(); ++j) {
      Column& col = d.features[j];
      const std::string& tok = rec.fields[where[j]];
      if (col.kind == ColumnKind::kCategorical) {
        col.categorical.push_back(is_missing_token(tok) ? std::string(kMissingCategory) : tok);
        continue;
      }
      if (is_missing_token(tok)) {
        col.numeric.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      try {
        const double v = parse_double(tok);
        if (!std::isfinite(v)) throw DataError("non-finite");
        col.numeric.push_back(v);
      } catch (const DataError&) {
        throw DataError("csv line " + std::to_string(rec.line) + ", column '" + col.name +
                        "': cannot parse '" + tok + "' as a number");
      }
    }
    const std::string& ytok = rec.fields[target_pos];
    try {
      const double y = parse_double(ytok);
      if (!std::isfinite(y)) throw DataError("non-finite");
      d.target.push_back(y);
    } catch (const DataError&) {
      throw DataError("csv line " + std::to_string(rec.line) + ", target column '" +
                      d.target_name + "': cannot parse '" + ytok + "' as a number");
    }
  }
  if (d.rows() == 0) throw DataError("csv input has a header but no data rows");
  return d;
}

inline TabularDataset load_csv(const std::string& path, const SchemaSpec& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open csv '" + path + "'");
  return read_csv(in, schema, path);
}

}  // namespace sra
