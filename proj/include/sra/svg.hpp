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
#include <cstdio>
#include <span>
#include <sstream>
#include <string>

namespace sra::svg {

/// Static two-class scatter plot. Class 1 is drawn yellow, class 0 purple.
inline std::string scatter(std::span<const double> xs, std::span<const double> ys,
                           std::span<const double> labels, const std::string& title,
                           const std::string& x_label = "x1", const std::string& y_label = "x2") {
  constexpr double kSize = 480.0, kMargin = 48.0;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!xs.empty()) {
    auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
    auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
    x0 = *xmin;
    x1 = *xmax;
    y0 = *ymin;
    y1 = *ymax;
  }
  if (x1 - x0 < 1e-12) { x0 -= 1; x1 += 1; }
  if (y1 - y0 < 1e-12) { y0 -= 1; y1 += 1; }
  const double inner = kSize - 2 * kMargin;
  auto px = [&](double v) { return kMargin + (v - x0) / (x1 - x0) * inner; };
  auto py = [&](double v) { return kSize - kMargin - (v - y0) / (y1 - y0) * inner; };

  std::ostringstream out;
  char buf[160];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
      << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kSize / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">"
      << title << "</text>\n";
  std::snprintf(buf, sizeof(buf),
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                "stroke=\"#888\"/>\n",
                kMargin, kMargin, inner, inner);
  out << buf;
  if (x0 < 0 && x1 > 0) {
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.2f\" y1=\"%.1f\" x2=\"%.2f\" y2=\"%.1f\" stroke=\"#ccc\"/>\n", px(0),
                  kMargin, px(0), kSize - kMargin);
    out << buf;
  }
  if (y0 < 0 && y1 > 0) {
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.2f\" x2=\"%.1f\" y2=\"%.2f\" stroke=\"#ccc\"/>\n",
                  kMargin, py(0), kSize - kMargin, py(0));
    out << buf;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2\" fill=\"%s\"/>\n",
                  px(xs[i]), py(ys[i]), labels[i] > 0.5 ? "#fde725" : "#440154");
    out << buf;
  }
  out << "<text x=\"" << kSize / 2 << "\" y=\"" << kSize - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << kSize / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 "
      << kSize / 2 << ")\">" << y_label << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace sra::svg
