/*
 * Copyright 2026 The GradLens Authors.
 *
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

// Small dense linear algebra on 64-bit reals.
//
// Every reduction runs left to right in index order, with no FMA contraction
// or reassociation, so identical inputs give bit-identical outputs.

#ifndef GRADLENS_LINALG_H_
#define GRADLENS_LINALG_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace gradlens {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t size, double fill = 0.0) : data_(size, fill) {}
  explicit Vector(std::vector<double> data) : data_(std::move(data)) {}
  Vector(std::initializer_list<double> values) : data_(values) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }

  std::span<const double> span() const { return data_; }
  std::span<double> span() { return data_; }
  const std::vector<double>& values() const { return data_; }

  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  // Throws ContractViolation when data.size() != rows * cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }
  std::span<double> row(std::size_t r) {
    return std::span<double>(data_).subspan(r * cols_, cols_);
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);

// y = A x.
Vector matvec(const Matrix& a, std::span<const double> x);
// y = A^T x.
Vector matvec_transposed(const Matrix& a, std::span<const double> x);

// Element-wise a += scale * b. Dimensions must agree.
void axpy(double scale, std::span<const double> b, std::span<double> a);

double max_abs(std::span<const double> values);
bool all_finite(std::span<const double> values);

// Throws NumericError naming `tensor` if any entry is NaN or infinite.
void require_finite(std::span<const double> values, std::string_view tensor);

// Solves (A + ridge I) x = b for symmetric positive definite A (Eigen LLT).
// Throws NumericError if the factorization breaks down.
Vector solve_spd(const Matrix& a, const Vector& b, double ridge = 0.0);

}  // namespace gradlens

#endif  // GRADLENS_LINALG_H_
