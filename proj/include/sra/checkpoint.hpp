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

// Text checkpoint format, version 1:
//
//   sra-checkpoint 1 <kind> p=<p> dk=<dk> task=<binary|regression>
//   param <name> <rank> <extent>...
//   <row-major values, one matrix row per line>
//   ...
//   end
//
// Values use the shortest decimal form that round-trips, so
// write -> read -> write reproduces the file byte for byte.

#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "sra/errors.hpp"
#include "sra/format.hpp"
#include "sra/model.hpp"

namespace sra {

inline constexpr int kCheckpointVersion = 1;

inline void write_checkpoint(std::ostream& out, const AnyModel& model) {
  const std::size_t dk = std::holds_alternative<SraLinearModel>(model)
                             ? std::get<SraLinearModel>(model).encoder().dk
                             : 0;
  out << "sra-checkpoint " << kCheckpointVersion << ' ' << model_name(kind_of(model))
      << " p=" << features_of(model) << " dk=" << dk << " task=" << task_name(task_of(model))
      << '\n';
  const auto& params =
      std::visit([](const auto& m) -> const std::vector<Parameter>& { return m.params(); },
                 model);
  for (const auto& p : params) {
    const Shape& s = p.value.shape();
    out << "param " << p.name << ' ' << s.rank();
    for (std::size_t d : s.dims()) out << ' ' << d;
    out << '\n';
    const std::size_t width = s.last();
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      out << format_double(p.value[i]) << ((i + 1) % width == 0 ? '\n' : ' ');
    }
  }
  out << "end\n";
}

inline std::string checkpoint_string(const AnyModel& model) {
  std::ostringstream out;
  write_checkpoint(out, model);
  return out.str();
}

inline AnyModel read_checkpoint(std::istream& in) {
  std::string magic, kind_s, p_s, dk_s, task_s;
  int version = 0;
  if (!(in >> magic >> version >> kind_s >> p_s >> dk_s >> task_s) ||
      magic != "sra-checkpoint") {
    throw DataError("not an sra checkpoint");
  }
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  auto field = [](const std::string& tok, std::string_view key) {
    if (tok.rfind(key, 0) != 0) throw DataError("checkpoint header: expected " + std::string(key));
    return tok.substr(key.size());
  };
  const ModelKind kind = parse_model(kind_s);
  const std::size_t p = std::stoul(field(p_s, "p="));
  const std::size_t dk = std::stoul(field(dk_s, "dk="));
  const TaskKind task = parse_task(field(task_s, "task="));

  AnyModel model = [&]() -> AnyModel {
    switch (kind) {
      case ModelKind::kSraLinear: return SraLinearModel::layout(p, dk, task);
      case ModelKind::kLinear: return LinearModel::layout(p, task);
      case ModelKind::kMlp: return MlpModel::layout(p, task);
    }
    throw DataError("unknown model kind");
  }();
  auto& params = std::visit(
      [](auto& m) -> std::vector<Parameter>& { return m.params(); }, model);
  for (auto& p_ref : params) {
    std::string tag, name;
    std::size_t rank = 0;
    if (!(in >> tag >> name >> rank) || tag != "param") {
      throw DataError("checkpoint: expected parameter block for '" + p_ref.name + "'");
    }
    if (name != p_ref.name) {
      throw DataError("checkpoint: expected parameter '" + p_ref.name + "', found '" + name + "'");
    }
    std::vector<std::size_t> dims(rank);
    for (auto& d : dims) in >> d;
    if (Shape(dims) != p_ref.value.shape()) {
      throw DataError("checkpoint: parameter '" + name + "' has shape " + Shape(dims).str() +
                      ", expected " + p_ref.value.shape().str());
    }
    for (double& v : p_ref.value.values()) {
      std::string tok;
      if (!(in >> tok)) throw DataError("checkpoint: truncated values for '" + name + "'");
      v = parse_double(tok);
    }
  }
  std::string end;
  if (!(in >> end) || end != "end") throw DataError("checkpoint: missing end marker");
  return model;
}

inline void save_checkpoint(const std::string& path, const AnyModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  write_checkpoint(out, model);
}

inline AnyModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  return read_checkpoint(in);
}

}  // namespace sra
