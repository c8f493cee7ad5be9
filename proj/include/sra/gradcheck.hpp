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
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sra/tape.hpp"

namespace sra {

struct ParameterCheck {
  std::string name;
  std::size_t checked = 0;
  // Entries whose perturbation moved a rectifier input across zero; central
  // differences are not valid there, so they are counted but not scored.
  std::size_t kinks = 0;
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
};

struct GradCheckReport {
  double step = 0.0;
  double tolerance = 0.0;
  std::vector<ParameterCheck> parameters;
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t kinks = 0;
  bool passed = true;
};

/// Gradients below this magnitude are compared in absolute terms.
inline constexpr double kGradCheckFloor = 1e-6;

/// |a - n| / max(|a|, |n|, floor); two zero gradients agree exactly.
inline double gradient_rel_error(double analytic, double numeric) {
  const double diff = std::abs(analytic - numeric);
  if (diff == 0.0) return 0.0;
  return diff / std::max({std::abs(analytic), std::abs(numeric), kGradCheckFloor});
}

/// Compares backward() against central differences (f(t+h) - f(t-h)) / 2h for
/// every scalar entry of every parameter on the tape. Leaves the tape with its
/// original values.
inline GradCheckReport finite_diff_check(Tape& tape, NodeRef root, double step,
                                         double tolerance) {
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be > 0");
  tape.forward(root);
  const Gradients grads = tape.backward(root);
  const std::vector<bool> base_pattern = tape.relu_pattern(root);

  GradCheckReport report;
  report.step = step;
  report.tolerance = tolerance;
  double total = 0.0;
  for (const auto& [name, ref] : tape.parameters()) {
    const Tensor base = tape.value(ref);
    const Tensor& analytic = grads.at(name);
    ParameterCheck pc;
    pc.name = name;
    double sum = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
      auto eval = [&](double delta, bool& kink) {
        Tensor t = base;
        t[i] += delta;
        tape.set_value(ref, std::move(t));
        const double f = tape.forward(root)[0];
        if (!std::isfinite(f)) {
          tape.set_value(ref, base);
          tape.forward(root);
          throw NumericError("non-finite loss while perturbing parameter '" + name +
                             "' entry " + std::to_string(i));
        }
        if (tape.relu_pattern(root) != base_pattern) kink = true;
        return f;
      };
      bool kink = false;
      const double fp = eval(step, kink);
      const double fm = eval(-step, kink);
      if (kink) {
        ++pc.kinks;
        continue;
      }
      const double numeric = (fp - fm) / (2.0 * step);
      const double err = gradient_rel_error(analytic[i], numeric);
      pc.max_rel_error = std::max(pc.max_rel_error, err);
      sum += err;
      ++pc.checked;
    }
    tape.set_value(ref, base);
    pc.mean_rel_error = pc.checked ? sum / static_cast<double>(pc.checked) : 0.0;
    report.max_rel_error = std::max(report.max_rel_error, pc.max_rel_error);
    report.checked += pc.checked;
    report.kinks += pc.kinks;
    total += sum;
    report.parameters.push_back(std::move(pc));
  }
  tape.forward(root);
  report.mean_rel_error =
      report.checked ? total / static_cast<double>(report.checked) : 0.0;
  report.passed = report.max_rel_error < tolerance;
  return report;
}

}  // namespace sra
