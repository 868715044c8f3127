// Copyright 2026 The rmdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace rmdp {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const double> flat() const { return data_; }
  std::span<double> flat() { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Dense rank-3 array indexed [i][j][k], stored row-major. Used for
/// transition kernels P[s][a][s'] and rewards r[s][a][s'].
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t n0, std::size_t n1, std::size_t n2, double fill = 0.0)
      : n0_(n0), n1_(n1), n2_(n2), data_(n0 * n1 * n2, fill) {}

  std::size_t dim0() const { return n0_; }
  std::size_t dim1() const { return n1_; }
  std::size_t dim2() const { return n2_; }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    assert(i < n0_ && j < n1_ && k < n2_);
    return data_[(i * n1_ + j) * n2_ + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    assert(i < n0_ && j < n1_ && k < n2_);
    return data_[(i * n1_ + j) * n2_ + k];
  }

  std::span<double> row(std::size_t i, std::size_t j) {
    return {data_.data() + (i * n1_ + j) * n2_, n2_};
  }
  std::span<const double> row(std::size_t i, std::size_t j) const {
    return {data_.data() + (i * n1_ + j) * n2_, n2_};
  }

  /// The n1 x n2 slab at index i, contiguous.
  std::span<const double> slab(std::size_t i) const {
    return {data_.data() + i * n1_ * n2_, n1_ * n2_};
  }
  std::span<double> slab(std::size_t i) {
    return {data_.data() + i * n1_ * n2_, n1_ * n2_};
  }

  std::span<const double> flat() const { return data_; }
  std::span<double> flat() { return data_; }

  bool operator==(const Tensor3&) const = default;

 private:
  std::size_t n0_ = 0;
  std::size_t n1_ = 0;
  std::size_t n2_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double sup_norm_diff(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace rmdp
