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
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sra/errors.hpp"

namespace sra {

/// Extents of a dense tensor. Rank is at most 3 (batch x rows x cols).
class Shape {
 public:
  static constexpr std::size_t kMaxRank = 3;

  Shape() = default;
  Shape(std::initializer_list<std::size_t> dims) : dims_(dims) { check(); }
  explicit Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    check();
  }

  std::size_t rank() const { return dims_.size(); }
  std::size_t operator[](std::size_t axis) const { return dims_.at(axis); }
  std::size_t last() const { return dims_.empty() ? 1 : dims_.back(); }
  const std::vector<std::size_t>& dims() const { return dims_; }

  std::size_t numel() const {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1},
                           [](std::size_t a, std::size_t b) { return a * b; });
  }

  friend bool operator==(const Shape&, const Shape&) = default;

  std::string str() const {
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (i) out << 'x';
      out << dims_[i];
    }
    out << ')';
    return out.str();
  }

 private:
  void check() const {
    if (dims_.size() > kMaxRank) {
      throw ShapeError("tensor rank " + std::to_string(dims_.size()) +
                       " exceeds the maximum of 3");
    }
  }

  std::vector<std::size_t> dims_;
};

/// Dense row-major array of doubles.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0)
      : shape_(std::move(shape)), values_(shape_.numel(), fill) {}
  Tensor(Shape shape, std::vector<double> values)
      : shape_(std::move(shape)), values_(std::move(values)) {
    if (values_.size() != shape_.numel()) {
      throw ShapeError("tensor of shape " + shape_.str() + " given " +
                       std::to_string(values_.size()) + " values");
    }
  }

  static Tensor scalar(double v) { return Tensor(Shape{1}, {v}); }
  static Tensor vector(std::vector<double> v) {
    const std::size_t n = v.size();
    return Tensor(Shape{n}, std::move(v));
  }
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> v) {
    return Tensor(Shape{rows, cols}, std::move(v));
  }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }
  std::size_t rank() const { return shape_.rank(); }
  std::size_t rows() const { return shape_.rank() >= 2 ? shape_[0] : 1; }
  std::size_t cols() const { return shape_.last(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double at(std::size_t r, std::size_t c) const {
    return values_[r * cols() + c];
  }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols(), cols());
  }

  Tensor reshaped(Shape shape) const {
    if (shape.numel() != values_.size()) {
      throw ShapeError("cannot reshape " + shape_.str() + " to " +
                       shape.str());
    }
    return Tensor(std::move(shape), values_);
  }

  /// Rows `indices` of a rank-2 tensor, in the given order.
  Tensor gather_rows(std::span<const std::size_t> indices) const {
    const std::size_t c = cols();
    std::vector<double> out;
    out.reserve(indices.size() * c);
    for (std::size_t r : indices) {
      auto src = row(r);
      out.insert(out.end(), src.begin(), src.end());
    }
    return Tensor(Shape{indices.size(), c}, std::move(out));
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

}  // namespace sra
