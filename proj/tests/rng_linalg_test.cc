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

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "gradlens/error.h"
#include "gradlens/linalg.h"
#include "gradlens/rng.h"

namespace gradlens {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_EQ(a.normal(), b.normal());
  }
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(1);
  double total = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    total += u;
  }
  EXPECT_NEAR(total / 20000.0, 0.5, 0.01);
}

TEST(Rng, NormalMoments) {
  Rng rng(7);
  double s = 0.0, s2 = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0, 0.03);
}

TEST(Rng, IndexCoversRange) {
  Rng rng(3);
  std::set<std::size_t> seen;
  for (int i = 0; i < 500; ++i) {
    const std::size_t k = rng.index(7);
    ASSERT_LT(k, 7u);
    seen.insert(k);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(0, 0), derive_seed(0, 1));
  EXPECT_NE(derive_seed(0, 0), derive_seed(1, 0));
  EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
}

TEST(Linalg, MatvecAndTranspose) {
  const Matrix a(2, 3, {1, 2, 3, 4, 5, 6});
  const Vector x{1, 0, -1};
  EXPECT_EQ(matvec(a, x.span()), (Vector{-2, -2}));
  const Vector y{1, 1};
  EXPECT_EQ(matvec_transposed(a, y.span()), (Vector{5, 7, 9}));
}

TEST(Linalg, MatrixLengthMismatchThrows) {
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), ContractViolation);
}

TEST(Linalg, RequireFiniteNamesTensor) {
  const std::vector<double> v{1.0, NAN};
  try {
    require_finite(v, "head_bias");
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_EQ(e.tensor(), "head_bias");
  }
}

TEST(Linalg, SolveSpdMatchesHandSolution) {
  const Matrix a(2, 2, {4, 1, 1, 3});
  const Vector b{1, 2};
  const Vector x = solve_spd(a, b);
  EXPECT_NEAR(x[0], 1.0 / 11.0, 1e-15);
  EXPECT_NEAR(x[1], 7.0 / 11.0, 1e-15);
}

TEST(Linalg, AxpyAndMaxAbs) {
  std::vector<double> a{1, 2};
  const std::vector<double> b{3, -10};
  axpy(0.5, b, a);
  EXPECT_EQ(a[0], 2.5);
  EXPECT_EQ(a[1], -3.0);
  EXPECT_EQ(max_abs(a), 3.0);
}

}  // namespace
}  // namespace gradlens
