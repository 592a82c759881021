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

#include "gradlens/linalg.h"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gradlens/error.h"

namespace gradlens {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ContractViolation("Matrix: data length " +
                            std::to_string(data_.size()) + " != " +
                            std::to_string(rows_) + "x" +
                            std::to_string(cols_));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ContractViolation("dot: length mismatch " + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) {
    throw ContractViolation("matvec: expected length " +
                            std::to_string(a.cols()) + ", got " +
                            std::to_string(x.size()));
  }
  Vector y(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) y[r] = dot(a.row(r), x);
  return y;
}

Vector matvec_transposed(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) {
    throw ContractViolation("matvec_transposed: expected length " +
                            std::to_string(a.rows()) + ", got " +
                            std::to_string(x.size()));
  }
  Vector y(a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    for (std::size_t c = 0; c < a.cols(); ++c) y[c] += row[c] * x[r];
  }
  return y;
}

void axpy(double scale, std::span<const double> b, std::span<double> a) {
  if (a.size() != b.size()) {
    throw ContractViolation("axpy: length mismatch");
  }
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += scale * b[i];
}

double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_finite(std::span<const double> values, std::string_view tensor) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericError(std::string(tensor),
                         "non-finite value at index " + std::to_string(i));
    }
  }
}

Vector solve_spd(const Matrix& a, const Vector& b, double ridge) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) {
    throw ContractViolation("solve_spd: dimension mismatch");
  }
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
    m(i, i) += ridge;
    rhs(i) = b[i];
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericError("cholesky", "matrix is not positive definite");
  }
  const Eigen::VectorXd solution = llt.solve(rhs);
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = solution(i);
  return x;
}

}  // namespace gradlens
