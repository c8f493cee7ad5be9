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
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sra/csv.hpp"
#include "sra/errors.hpp"
#include "sra/format.hpp"
#include "sra/metrics.hpp"
#include "sra/model.hpp"
#include "sra/svg.hpp"
#include "sra/tape.hpp"

namespace sra {

/// Attention below this value marks a feature as suppressed.
inline constexpr double kSuppressedBelow = 1e-6;

/// Attribution of one instance: logit = intercept + sum(contributions).
struct Explanation {
  std::size_t instance = 0;
  std::vector<double> x;
  std::vector<double> attention;
  std::vector<double> reinforced;
  std::vector<double> contributions;
  double intercept = 0.0;
  double logit = 0.0;
  double output = 0.0;  // probability for binary tasks, prediction otherwise
  std::vector<std::size_t> ranking;  // by |contribution| descending, ties to lower index
  std::vector<bool> suppressed;

  double residual() const {
    return logit - intercept -
           std::accumulate(contributions.begin(), contributions.end(), 0.0);
  }
};

namespace detail {

inline Explanation make_explanation(std::size_t instance, std::span<const double> x,
                                    std::span<const double> a, std::span<const double> beta,
                                    double intercept, double logit, TaskKind task) {
  Explanation e;
  e.instance = instance;
  e.x.assign(x.begin(), x.end());
  e.attention.assign(a.begin(), a.end());
  e.intercept = intercept;
  e.logit = logit;
  e.output = task == TaskKind::kBinary ? sigmoid(logit) : logit;
  for (std::size_t i = 0; i < x.size(); ++i) {
    e.reinforced.push_back(a[i] * x[i]);
    e.contributions.push_back(beta[i] * (a[i] * x[i]));
    e.suppressed.push_back(a[i] < kSuppressedBelow);
  }
  e.ranking = metrics::top_k_features(e.contributions, e.contributions.size());
  return e;
}

}  // namespace detail

/// Per-row explanations of an SRALinear model in eval mode.
inline std::vector<Explanation> explain_batch(const SraLinearModel& model, const Tensor& x) {
  check_input(x, model.features(), "explain");
  const Tensor a = model.attention(x);
  const Tensor z = model.logits(x);
  const auto beta = model.get("beta").values();
  const double b0 = model.get("intercept").values()[0];
  std::vector<Explanation> out;
  out.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    out.push_back(detail::make_explanation(i, x.row(i), a.row(i), beta, b0, z.at(i, 0),
                                           model.task()));
  }
  return out;
}

/// Linear baseline explanations with attention fixed at 1.
inline std::vector<Explanation> explain_linear(const LinearModel& model, const Tensor& x) {
  check_input(x, model.features(), "explain");
  const Tensor z = model.logits(x);
  const auto w = model.get("weight").values();
  const double b0 = model.get("intercept").values()[0];
  const std::vector<double> ones(model.features(), 1.0);
  std::vector<Explanation> out;
  out.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    out.push_back(
        detail::make_explanation(i, x.row(i), ones, w, b0, z.at(i, 0), model.task()));
  }
  return out;
}

inline std::vector<Explanation> explain_any(const AnyModel& model, const Tensor& x) {
  if (const auto* m = std::get_if<SraLinearModel>(&model)) return explain_batch(*m, x);
  if (const auto* m = std::get_if<LinearModel>(&model)) return explain_linear(*m, x);
  throw UnsupportedModelError("model kind '" + std::string(model_name(kind_of(model))) +
                              "' has no intrinsic attribution");
}

/// (n x p) matrix of contributions.
inline Tensor contribution_matrix(const std::vector<Explanation>& ex) {
  const std::size_t p = ex.empty() ? 0 : ex.front().contributions.size();
  Tensor c(Shape{ex.size(), p});
  for (std::size_t i = 0; i < ex.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) c.at(i, j) = ex[i].contributions[j];
  }
  return c;
}

/// Logits with attention of feature `j` forced to zero.
inline Tensor masked_logits(const SraLinearModel& model, const Tensor& x, std::size_t j) {
  check_input(x, model.features(), "masked_logits");
  if (j >= model.features()) throw std::out_of_range("masked_logits: feature index out of range");
  return evaluate_rows(x, [&](Tape& t, NodeRef in) {
    const std::size_t b = t.value(in).rows();
    Tensor mask(Shape{b, model.features()}, 1.0);
    for (std::size_t r = 0; r < b; ++r) mask.at(r, j) = 0.0;
    ForwardOptions opts = ForwardOptions::eval();
    opts.attention_mask = &mask;
    return model.record(t, in, opts).logit;
  });
}

/// Attribution CSV: instance_id, x_i, a_i, contrib_i per feature, then
/// intercept, logit, output.
inline void write_attributions(std::ostream& out, const std::vector<Explanation>& ex,
                               const std::vector<std::string>& names,
                               std::span<const std::size_t> ids = {}) {
  out << "instance_id";
  for (const auto& n : names) {
    out << ',' << csv::escape("x_" + n) << ',' << csv::escape("a_" + n) << ','
        << csv::escape("contrib_" + n);
  }
  out << ",intercept,logit,output\n";
  for (std::size_t r = 0; r < ex.size(); ++r) {
    const Explanation& e = ex[r];
    out << (ids.empty() ? e.instance : ids[r]);
    for (std::size_t i = 0; i < e.x.size(); ++i) {
      out << ',' << format_double(e.x[i]) << ',' << format_double(e.attention[i]) << ','
          << format_double(e.contributions[i]);
    }
    out << ',' << format_double(e.intercept) << ',' << format_double(e.logit) << ','
        << format_double(e.output) << '\n';
  }
}

/// CSV of x, a, o, y and prediction; for p = 2 also the two scatter plots.
struct ReinforcedExport {
  std::string csv_path;
  std::vector<std::string> svg_paths;
};

inline ReinforcedExport export_reinforced(const SraLinearModel& model, const Tensor& x,
                                          std::span<const double> y, const std::string& dir) {
  if (y.size() != x.rows()) throw ShapeError("export_reinforced: target length mismatch");
  const auto ex = explain_batch(model, x);
  const std::size_t p = model.features();
  ReinforcedExport result;
  result.csv_path = dir + "/reinforced.csv";
  std::ofstream out(result.csv_path);
  if (!out) throw std::runtime_error("cannot write '" + result.csv_path + "'");
  for (const char* prefix : {"x", "a", "o"}) {
    for (std::size_t i = 1; i <= p; ++i) out << prefix << i << ',';
  }
  out << "y,prediction\n";
  for (std::size_t r = 0; r < ex.size(); ++r) {
    for (const auto* v : {&ex[r].x, &ex[r].attention, &ex[r].reinforced}) {
      for (double d : *v) out << format_double(d) << ',';
    }
    out << format_double(y[r]) << ',' << format_double(ex[r].output) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + result.csv_path + "'");
  if (p != 2) return result;

  std::vector<double> x1, x2, o1, o2;
  for (const auto& e : ex) {
    x1.push_back(e.x[0]);
    x2.push_back(e.x[1]);
    o1.push_back(e.reinforced[0]);
    o2.push_back(e.reinforced[1]);
  }
  const std::pair<std::string, std::string> figures[] = {
      {dir + "/original.svg", svg::scatter(x1, x2, y, "original inputs", "x1", "x2")},
      {dir + "/reinforced.svg", svg::scatter(o1, o2, y, "reinforced inputs", "o1", "o2")}};
  for (const auto& [path, body] : figures) {
    std::ofstream f(path);
    if (!f || !(f << body)) throw std::runtime_error("cannot write '" + path + "'");
    result.svg_paths.push_back(path);
  }
  return result;
}

/// Pairs (x_j, beta_i a_i x_i) over the rows of `x`.
inline std::vector<std::pair<double, double>> relevance_curve(const SraLinearModel& model,
                                                               const Tensor& x, std::size_t i,
                                                               std::size_t j) {
  const std::size_t p = model.features();
  if (i >= p || j >= p) {
    throw std::out_of_range("relevance_curve: feature index out of range (p=" +
                            std::to_string(p) + ")");
  }
  const auto ex = explain_batch(model, x);
  std::vector<std::pair<double, double>> out;
  out.reserve(ex.size());
  for (const auto& e : ex) out.emplace_back(e.x[j], e.contributions[i]);
  return out;
}

inline void write_relevance_curve(std::ostream& out,
                                  const std::vector<std::pair<double, double>>& curve,
                                  const std::string& feature, const std::string& condition) {
  out << csv::escape(condition) << ',' << csv::escape("contrib_" + feature) << '\n';
  for (const auto& [a, b] : curve) out << format_double(a) << ',' << format_double(b) << '\n';
}

}  // namespace sra
