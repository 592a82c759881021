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

#include "gradlens/imaging.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gradlens/error.h"
#include "gradlens/linalg.h"

namespace gradlens {
namespace {

void check_length(const Shape& shape, std::size_t length, const char* what) {
  validate_shape(shape);
  if (length != shape.size()) {
    throw ContractViolation(std::string(what) + ": pixel count " +
                            std::to_string(length) + " does not match shape " +
                            shape.to_string());
  }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Reads a pixel, treating anything outside the frame as 0.
double pixel_or_zero(const Image& image, long row, long col, std::size_t ch) {
  const Shape& s = image.shape();
  if (row < 0 || col < 0 || row >= static_cast<long>(s.height) ||
      col >= static_cast<long>(s.width)) {
    return 0.0;
  }
  return image.at(static_cast<std::size_t>(row), static_cast<std::size_t>(col),
                  ch);
}

// Bilinear sample written as nested lerps, so a constant neighbourhood
// reproduces the constant exactly.
double bilinear(const Image& image, double row, double col, std::size_t ch) {
  const double r0 = std::floor(row);
  const double c0 = std::floor(col);
  const double fr = row - r0;
  const double fc = col - c0;
  const long ri = static_cast<long>(r0);
  const long ci = static_cast<long>(c0);
  const double v00 = pixel_or_zero(image, ri, ci, ch);
  const double v01 = pixel_or_zero(image, ri, ci + 1, ch);
  const double v10 = pixel_or_zero(image, ri + 1, ci, ch);
  const double v11 = pixel_or_zero(image, ri + 1, ci + 1, ch);
  const double top = v00 + fc * (v01 - v00);
  const double bottom = v10 + fc * (v11 - v10);
  return top + fr * (bottom - top);
}

template <typename SourceIndex>
Image permute(const Image& image, const Shape& out_shape, SourceIndex source) {
  const Shape& in = image.shape();
  std::vector<double> out(out_shape.size());
  for (std::size_t r = 0; r < out_shape.height; ++r) {
    for (std::size_t c = 0; c < out_shape.width; ++c) {
      const auto [sr, sc] = source(r, c);
      for (std::size_t ch = 0; ch < in.channels; ++ch) {
        out[out_shape.index(r, c, ch)] = image.at(sr, sc, ch);
      }
    }
  }
  return Image(out_shape, std::move(out));
}

// Maps an output (row, col) to a fractional source (row, col).
template <typename SourcePoint>
Image resample(const Image& image, SourcePoint source) {
  const Shape& s = image.shape();
  std::vector<double> out(s.size());
  for (std::size_t r = 0; r < s.height; ++r) {
    for (std::size_t c = 0; c < s.width; ++c) {
      const auto [sr, sc] = source(static_cast<double>(r),
                                   static_cast<double>(c));
      for (std::size_t ch = 0; ch < s.channels; ++ch) {
        out[s.index(r, c, ch)] = clamp01(bilinear(image, sr, sc, ch));
      }
    }
  }
  return Image(s, std::move(out));
}

double normalize_degrees(double degrees) {
  double d = std::fmod(degrees, 360.0);
  if (d < 0.0) d += 360.0;
  return d;
}

bool permutable_rotation(const Shape& s, double normalized) {
  if (normalized == 0.0 || normalized == 180.0) return true;
  return (normalized == 90.0 || normalized == 270.0) && s.width == s.height;
}

Image rotate_bilinear(const Image& image, double degrees) {
  const Shape& s = image.shape();
  const double cx = (static_cast<double>(s.width) - 1.0) / 2.0;
  const double cy = (static_cast<double>(s.height) - 1.0) / 2.0;
  const double theta = degrees * std::numbers::pi / 180.0;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  return resample(image, [&](double r, double c) {
    // Output offset from the center, y pointing up.
    const double x = c - cx;
    const double y = cy - r;
    // Inverse rotation gives the source offset.
    const double sx = x * cos_t + y * sin_t;
    const double sy = -x * sin_t + y * cos_t;
    return std::pair<double, double>(cy - sy, sx + cx);
  });
}

}  // namespace

std::string Shape::to_string() const {
  std::ostringstream os;
  os << width << "x" << height << "x" << channels;
  return os.str();
}

void validate_shape(const Shape& shape) {
  if (shape.width == 0 || shape.height == 0) {
    throw ContractViolation("image shape must be non-empty, got " +
                            shape.to_string());
  }
  if (shape.channels != 1 && shape.channels != 3) {
    throw ContractViolation("image channels must be 1 or 3, got " +
                            shape.to_string());
  }
}

Image::Image(Shape shape, std::vector<double> pixels)
    : shape_(shape), pixels_(std::move(pixels)) {
  check_length(shape_, pixels_.size(), "Image");
  for (std::size_t i = 0; i < pixels_.size(); ++i) {
    if (!(pixels_[i] >= 0.0 && pixels_[i] <= 1.0)) {
      throw ContractViolation("Image: pixel " + std::to_string(i) +
                              " outside [0, 1]");
    }
  }
}

Image Image::filled(Shape shape, double value) {
  return Image(shape, std::vector<double>(shape.size(), value));
}

double Image::mean() const {
  std::vector<double> sorted = pixels_;
  std::sort(sorted.begin(), sorted.end());
  double acc = 0.0;
  for (double v : sorted) acc += v;
  return acc / static_cast<double>(sorted.size());
}

FieldImage::FieldImage(Shape shape, std::vector<double> pixels)
    : shape_(shape), pixels_(std::move(pixels)) {
  check_length(shape_, pixels_.size(), "FieldImage");
  require_finite(pixels_, "FieldImage");
}

FieldImage::FieldImage(const Image& image)
    : shape_(image.shape()),
      pixels_(image.pixels().begin(), image.pixels().end()) {}

Image FieldImage::clamped() const {
  std::vector<double> out(pixels_.size());
  std::transform(pixels_.begin(), pixels_.end(), out.begin(), clamp01);
  return Image(shape_, std::move(out));
}

TransformSpec TransformSpec::rotate(double degrees) {
  const double d = normalize_degrees(degrees);
  const bool quarter = d == 0.0 || d == 90.0 || d == 180.0 || d == 270.0;
  return {TransformKind::kRotate, degrees,
          quarter ? Interpolation::kExactPermutation : Interpolation::kBilinear};
}

TransformSpec TransformSpec::flip_h() {
  return {TransformKind::kFlipH, 0.0, Interpolation::kExactPermutation};
}

TransformSpec TransformSpec::flip_v() {
  return {TransformKind::kFlipV, 0.0, Interpolation::kExactPermutation};
}

TransformSpec TransformSpec::shear(double factor) {
  return {TransformKind::kShear, factor,
          factor == 0.0 ? Interpolation::kExactPermutation
                        : Interpolation::kBilinear};
}

std::string TransformSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case TransformKind::kRotate:
      os << "rot" << parameter;
      break;
    case TransformKind::kFlipH:
      os << "hflip";
      break;
    case TransformKind::kFlipV:
      os << "vflip";
      break;
    case TransformKind::kShear:
      os << "shear" << parameter;
      break;
  }
  return os.str();
}

Image rotate(const Image& image, double degrees) {
  const Shape& s = image.shape();
  const double d = normalize_degrees(degrees);
  if (!permutable_rotation(s, d)) return rotate_bilinear(image, degrees);
  const std::size_t h = s.height;
  const std::size_t w = s.width;
  using Index = std::pair<std::size_t, std::size_t>;
  if (d == 0.0) return image;
  if (d == 180.0) {
    return permute(image, s, [&](std::size_t r, std::size_t c) {
      return Index(h - 1 - r, w - 1 - c);
    });
  }
  // Square from here on.
  if (d == 90.0) {
    return permute(image, s, [&](std::size_t r, std::size_t c) {
      return Index(c, w - 1 - r);
    });
  }
  return permute(image, s, [&](std::size_t r, std::size_t c) {
    return Index(w - 1 - c, r);
  });
}

Image flip_h(const Image& image) {
  const Shape& s = image.shape();
  return permute(image, s, [&](std::size_t r, std::size_t c) {
    return std::pair<std::size_t, std::size_t>(r, s.width - 1 - c);
  });
}

Image flip_v(const Image& image) {
  const Shape& s = image.shape();
  return permute(image, s, [&](std::size_t r, std::size_t c) {
    return std::pair<std::size_t, std::size_t>(s.height - 1 - r, c);
  });
}

Image shear(const Image& image, double factor) {
  if (!std::isfinite(factor)) {
    throw ContractViolation("shear: factor must be finite");
  }
  if (factor == 0.0) return image;
  const double cy = (static_cast<double>(image.shape().height) - 1.0) / 2.0;
  return resample(image, [&](double r, double c) {
    return std::pair<double, double>(r, c + factor * (r - cy));
  });
}

Image apply_transform(const Image& image, const TransformSpec& spec) {
  switch (spec.kind) {
    case TransformKind::kRotate:
      if (spec.interpolation == Interpolation::kBilinear) {
        return rotate_bilinear(image, spec.parameter);
      }
      return rotate(image, spec.parameter);
    case TransformKind::kFlipH:
      return flip_h(image);
    case TransformKind::kFlipV:
      return flip_v(image);
    case TransformKind::kShear:
      return shear(image, spec.parameter);
  }
  throw ContractViolation("apply_transform: unknown transform kind");
}

double mean_squared_error(std::span<const double> a,
                          std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw ContractViolation("mean_squared_error: length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc / static_cast<double>(a.size());
}

namespace {

double psnr_from_pixels(const Shape& sa, std::span<const double> a,
                        const Image& b, double cap) {
  if (sa != b.shape()) {
    throw ContractViolation("psnr: shape mismatch " + sa.to_string() + " vs " +
                            b.shape().to_string());
  }
  const double mse = mean_squared_error(a, b.pixels());
  if (mse < 1e-30) return cap;
  return std::min(cap, 10.0 * std::log10(1.0 / mse));
}

}  // namespace

double psnr(const Image& a, const Image& b, double cap) {
  return psnr_from_pixels(a.shape(), a.pixels(), b, cap);
}

double psnr(const FieldImage& a, const Image& b, double cap) {
  return psnr_from_pixels(a.shape(), a.pixels(), b, cap);
}

}  // namespace gradlens
