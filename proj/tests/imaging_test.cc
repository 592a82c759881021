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
#include <vector>

#include <gtest/gtest.h>

#include "gradlens/error.h"
#include "gradlens/imaging.h"
#include "oracles.h"

namespace gradlens {
namespace {

Image random_image(std::uint64_t seed, Shape shape) {
  return oracle::uniform_batch(seed, 1, shape, 1).images.front();
}

TEST(Image, RejectsOutOfRangePixels) {
  EXPECT_THROW(Image(Shape{1, 1, 1}, {1.5}), ContractViolation);
  EXPECT_THROW(Image(Shape{1, 1, 1}, {NAN}), ContractViolation);
  EXPECT_THROW(Image(Shape{2, 1, 1}, {0.5}), ContractViolation);
  EXPECT_THROW(Image(Shape{1, 1, 2}, {0.5, 0.5}), ContractViolation);
}

TEST(FieldImage, RejectsNonFinite) {
  EXPECT_THROW(FieldImage(Shape{1, 1, 1}, {INFINITY}), NumericError);
  const FieldImage f(Shape{2, 1, 1}, {-3.0, 7.0});
  const Image c = f.clamped();
  EXPECT_EQ(c.at(0, 0), 0.0);
  EXPECT_EQ(c.at(0, 1), 1.0);
}

TEST(Rotate, ZeroIsIdentity) {
  const Image x = random_image(1, {5, 4, 3});
  EXPECT_EQ(rotate(x, 0.0), x);
}

TEST(Rotate, TwoByTwoCounterClockwise) {
  const double a = 0.1, b = 0.2, c = 0.3, d = 0.4;
  const Image x(Shape{2, 2, 1}, {a, b, c, d});
  EXPECT_EQ(rotate(x, 90.0), Image(Shape{2, 2, 1}, {b, d, a, c}));
}

TEST(Rotate, NinetyFourTimesIsIdentity) {
  const Image x = random_image(2, {7, 7, 3});
  Image y = x;
  for (int i = 0; i < 4; ++i) y = rotate(y, 90.0);
  EXPECT_EQ(y, x);
}

TEST(Rotate, HalfTurnTwiceIsIdentityOnRectangles) {
  const Image x = random_image(3, {6, 3, 1});
  EXPECT_EQ(rotate(rotate(x, 180.0), 180.0), x);
}

TEST(Rotate, NegativeNinetyUndoesNinety) {
  const Image x = random_image(4, {5, 5, 1});
  EXPECT_EQ(rotate(rotate(x, 90.0), -90.0), x);
}

TEST(Rotate, MajorRotationsPreserveMeanExactly) {
  const Image x = random_image(5, {16, 16, 1});
  for (double deg : {90.0, 180.0, 270.0}) {
    const Image y = rotate(x, deg);
    std::vector<double> a(x.pixels().begin(), x.pixels().end());
    std::vector<double> b(y.pixels().begin(), y.pixels().end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b) << deg;
  }
}

TEST(Rotate, MinorRotationOfConstantKeepsCenter) {
  const Image x = Image::filled({9, 9, 1}, 0.5);
  const Image y = rotate(x, 30.0);
  EXPECT_DOUBLE_EQ(y.at(4, 4), 0.5);
  EXPECT_DOUBLE_EQ(y.at(3, 5), 0.5);
  EXPECT_LT(y.at(0, 0), 0.5);  // corner samples fall outside the frame
}

TEST(Flip, InvolutionsAndSmallCase) {
  const Image x = random_image(6, {4, 3, 3});
  EXPECT_EQ(flip_h(flip_h(x)), x);
  EXPECT_EQ(flip_v(flip_v(x)), x);
  const Image row(Shape{2, 1, 1}, {0.25, 0.75});
  EXPECT_EQ(flip_h(row), Image(Shape{2, 1, 1}, {0.75, 0.25}));
}

TEST(Flip, VerticalReversesRows) {
  const Image col(Shape{1, 3, 1}, {0.1, 0.2, 0.3});
  EXPECT_EQ(flip_v(col), Image(Shape{1, 3, 1}, {0.3, 0.2, 0.1}));
}

TEST(Flip, MeanPreserved) {
  const Image x = random_image(7, {8, 8, 1});
  EXPECT_EQ(flip_h(x).mean(), x.mean());
  EXPECT_EQ(flip_v(x).mean(), x.mean());
}

TEST(Shear, ZeroIsIdentity) {
  const Image x = random_image(8, {6, 6, 1});
  EXPECT_EQ(shear(x, 0.0), x);
}

TEST(Shear, CenteredPixelLandsOnPredictedCoordinate) {
  // Bright pixel at (row 2, col 3) of a 7x7 image; center is (3, 3).
  std::vector<double> pixels(49, 0.0);
  pixels[2 * 7 + 3] = 1.0;
  const Image x(Shape{7, 7, 1}, pixels);
  const Image y = shear(x, 1.0);
  // Inverse map: output (r, c) reads column c + mu (r - cy). Row 2 reads
  // column c - 1, so the bright source column 3 appears at output column 4.
  std::size_t best = 0;
  for (std::size_t c = 0; c < 7; ++c) {
    if (y.at(2, c) > y.at(2, best)) best = c;
  }
  EXPECT_EQ(best, 4u);
  EXPECT_EQ(y.at(2, 4), 1.0);
}

TEST(Shear, ConstantInteriorUnchanged) {
  const Image x = Image::filled({8, 8, 1}, 0.5);
  const Image y = shear(x, 0.55);
  const double cy = 3.5;
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 8; ++c) {
      const double src = static_cast<double>(c) + 0.55 * (static_cast<double>(r) - cy);
      if (src >= 0.0 && src <= 7.0) {
        EXPECT_DOUBLE_EQ(y.at(r, c), 0.5) << r << "," << c;
      }
    }
  }
  EXPECT_LT(y.at(0, 0), 0.5);
}

TEST(Psnr, CapAndClosedForm) {
  const Image x = random_image(9, {4, 4, 1});
  EXPECT_EQ(psnr(x, x), 300.0);
  std::vector<double> a(100, 0.5), b(100, 0.6);
  const Image ia(Shape{10, 10, 1}, a), ib(Shape{10, 10, 1}, b);
  EXPECT_NEAR(psnr(ia, ib), 20.0, 1e-9);
}

TEST(Psnr, SymmetricAndMonotone) {
  const Image x = random_image(10, {4, 4, 1});
  const Image y = random_image(11, {4, 4, 1});
  EXPECT_EQ(psnr(x, y), psnr(y, x));
  const Image z = Image::filled({4, 4, 1}, 0.5);
  const Image w = Image::filled({4, 4, 1}, 0.7);
  const Image v = Image::filled({4, 4, 1}, 0.9);
  EXPECT_GT(psnr(z, w), psnr(z, v));
}

TEST(Psnr, ShapeMismatchThrows) {
  EXPECT_THROW(psnr(Image::filled({2, 2, 1}, 0), Image::filled({4, 1, 1}, 0)),
               ContractViolation);
}

TEST(TransformSpec, PermutationTags) {
  EXPECT_TRUE(TransformSpec::rotate(90).is_permutation());
  EXPECT_FALSE(TransformSpec::rotate(45).is_permutation());
  EXPECT_TRUE(TransformSpec::flip_h().is_permutation());
  EXPECT_FALSE(TransformSpec::shear(1.0).is_permutation());
}

}  // namespace
}  // namespace gradlens
