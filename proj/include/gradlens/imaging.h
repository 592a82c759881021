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

// Image value types, geometric transforms and PSNR.
//
// Pixels are stored row-major with channels interleaved (HWC), the same
// order as binary PPM/PGM, and an image flattens to a model input in that
// order.
//
// Geometric conventions:
//   * Rotations and shears act about the image center
//     ((width - 1) / 2, (height - 1) / 2), not the pixel origin.
//   * Positive rotation angles turn the content counter-clockwise as
//     displayed (row 0 at the top).
//   * Resampling uses inverse mapping. Rotations by multiples of 90 degrees
//     on square images (and 180 degrees on any image) are exact index
//     permutations; everything else is bilinear, with out-of-frame source
//     pixels read as 0 and the result clamped to [0, 1].

#ifndef GRADLENS_IMAGING_H_
#define GRADLENS_IMAGING_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gradlens {

inline constexpr double kPsnrCap = 300.0;

struct Shape {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;

  std::size_t size() const { return width * height * channels; }
  std::size_t index(std::size_t row, std::size_t col, std::size_t ch) const {
    return (row * width + col) * channels + ch;
  }
  std::string to_string() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

// Throws ContractViolation unless channels is 1 or 3 and the shape is
// non-empty.
void validate_shape(const Shape& shape);

// A normalized image: every pixel in [0, 1].
class Image {
 public:
  Image() = default;
  // Throws ContractViolation on a bad shape, wrong length, or any pixel
  // outside [0, 1] (NaN included).
  Image(Shape shape, std::vector<double> pixels);

  static Image filled(Shape shape, double value);

  const Shape& shape() const { return shape_; }
  std::span<const double> pixels() const { return pixels_; }
  double at(std::size_t row, std::size_t col, std::size_t ch = 0) const {
    return pixels_[shape_.index(row, col, ch)];
  }
  // Sums in ascending order, so any permutation of the pixels yields the
  // bit-identical mean.
  double mean() const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  Shape shape_;
  std::vector<double> pixels_;
};

// Unconstrained real-valued buffer, e.g. a gradient-inversion output.
class FieldImage {
 public:
  FieldImage() = default;
  // Throws ContractViolation on a bad shape or wrong length, NumericError on
  // non-finite entries.
  FieldImage(Shape shape, std::vector<double> pixels);
  explicit FieldImage(const Image& image);

  const Shape& shape() const { return shape_; }
  std::span<const double> pixels() const { return pixels_; }

  // Copy with every pixel clamped to [0, 1].
  Image clamped() const;

  friend bool operator==(const FieldImage&, const FieldImage&) = default;

 private:
  Shape shape_;
  std::vector<double> pixels_;
};

enum class TransformKind { kRotate, kFlipH, kFlipV, kShear };
enum class Interpolation { kExactPermutation, kBilinear };

struct TransformSpec {
  TransformKind kind = TransformKind::kRotate;
  // Degrees for kRotate, shear factor for kShear, unused for flips.
  double parameter = 0.0;
  Interpolation interpolation = Interpolation::kExactPermutation;

  static TransformSpec rotate(double degrees);
  static TransformSpec flip_h();
  static TransformSpec flip_v();
  static TransformSpec shear(double factor);

  // True when the transform only permutes pixels, so the pixel multiset
  // (and hence the mean) is preserved exactly.
  bool is_permutation() const {
    return interpolation == Interpolation::kExactPermutation;
  }
  std::string label() const;

  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

Image rotate(const Image& image, double degrees);
Image flip_h(const Image& image);
Image flip_v(const Image& image);
// Horizontal shear: output (row, col) samples the source at column
// col + factor * (row - cy) on the same row, cy the center row.
Image shear(const Image& image, double factor);

// Applies `spec`. A rotate spec tagged exact-permutation on an angle that
// is not permutable for this image shape is resampled bilinearly.
Image apply_transform(const Image& image, const TransformSpec& spec);

double mean_squared_error(std::span<const double> a, std::span<const double> b);

// 10 log10(1 / MSE) with peak 1. Returns `cap` when MSE < 1e-30.
// Throws ContractViolation when the shapes differ.
double psnr(const Image& a, const Image& b, double cap = kPsnrCap);
double psnr(const FieldImage& a, const Image& b, double cap = kPsnrCap);

}  // namespace gradlens

#endif  // GRADLENS_IMAGING_H_
