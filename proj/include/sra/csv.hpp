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

#include <istream>
#include <string>
#include <vector>

#include "sra/errors.hpp"

namespace sra::csv {

struct Record {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

/// Comma-separated records with RFC 4180 quoting ("" escapes a quote and
/// quoted fields may span lines). A leading UTF-8 byte-order mark is dropped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {
    if (in_.peek() == 0xEF) {
      char bom[3];
      in_.read(bom, 3);
      if (!(static_cast<unsigned char>(bom[1]) == 0xBB &&
            static_cast<unsigned char>(bom[2]) == 0xBF)) {
        throw DataError("csv: unexpected bytes at start of input");
      }
    }
  }

  /// Next record; false at end of input. Blank lines are skipped.
  bool next(Record& rec) {
    rec.fields.clear();
    std::string field;
    bool quoted = false, any = false, after_quote = false;
    int c;
    while ((c = in_.get()) != EOF) {
      if (!any) {
        if (c == '\n') {
          ++line_;
          continue;
        }
        if (c == '\r') continue;
        rec.line = line_ + 1;
        any = true;
      }
      if (quoted) {
        if (c == '"') {
          if (in_.peek() == '"') {
            field.push_back('"');
            in_.get();
          } else {
            quoted = false;
            after_quote = true;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(static_cast<char>(c));
        }
        continue;
      }
      if (c == ',') {
        rec.fields.push_back(std::move(field));
        field.clear();
        after_quote = false;
      } else if (c == '\n') {
        ++line_;
        break;
      } else if (c == '\r') {
        // dropped; \r\n handled on the following \n
      } else if (c == '"' && field.empty() && !after_quote) {
        quoted = true;
      } else {
        if (after_quote) {
          throw DataError("csv line " + std::to_string(rec.line) +
                          ": characters after closing quote");
        }
        field.push_back(static_cast<char>(c));
      }
    }
    if (quoted) throw DataError("csv line " + std::to_string(rec.line) + ": unterminated quote");
    if (!any) return false;
    rec.fields.push_back(std::move(field));
    return true;
  }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

/// Quotes `s` when it contains a delimiter, quote or line break.
inline std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace sra::csv
