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

#include "gradlens/image_io.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "gradlens/error.h"

namespace gradlens {
namespace {

bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }

  // Skips whitespace and '#' comments, then reads a decimal integer.
  std::size_t read_uint(const char* field) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::size_t value = 0;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1u << 24)) {
        throw ParseError(std::string("netpbm: ") + field + " too large", start);
      }
      ++pos_;
    }
    if (pos_ == start) {
      throw ParseError(std::string("netpbm: expected ") + field, pos_);
    }
    return value;
  }

  // Exactly one whitespace byte separates the header from the raster.
  void consume_single_space() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      throw ParseError("netpbm: expected whitespace after maxval", pos_);
    }
    ++pos_;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint8_t quantize(double v) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(clamped * 255.0 + 0.5));
}

std::vector<std::uint8_t> encode_pixels(const Shape& shape,
                                        std::span<const double> pixels) {
  validate_shape(shape);
  const std::string header = std::string(shape.channels == 1 ? "P5" : "P6") +
                             "\n" + std::to_string(shape.width) + " " +
                             std::to_string(shape.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + pixels.size());
  for (double v : pixels) out.push_back(quantize(v));
  return out;
}

void write_bytes(const std::vector<std::uint8_t>& bytes,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

Image decode_netpbm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' ||
      (bytes[1] != '5' && bytes[1] != '6')) {
    throw ParseError("netpbm: expected magic P5 or P6", 0);
  }
  const std::size_t channels = bytes[1] == '5' ? 1 : 3;
  HeaderReader reader(bytes.subspan(2));
  const std::size_t width = reader.read_uint("width");
  const std::size_t height = reader.read_uint("height");
  const std::size_t maxval_offset = reader.offset() + 2;
  const std::size_t maxval = reader.read_uint("maxval");
  if (maxval != 255) {
    throw ParseError("netpbm: unsupported maxval " + std::to_string(maxval) +
                         " (only 255)",
                     maxval_offset);
  }
  if (width == 0 || height == 0) {
    throw ParseError("netpbm: zero image dimension", 2);
  }
  reader.consume_single_space();
  const std::size_t raster = reader.offset() + 2;
  const Shape shape{width, height, channels};
  const std::size_t needed = shape.size();
  if (bytes.size() - raster < needed) {
    throw ParseError("netpbm: truncated raster, expected " +
                         std::to_string(needed) + " bytes, found " +
                         std::to_string(bytes.size() - raster),
                     bytes.size());
  }
  std::vector<double> pixels(needed);
  for (std::size_t i = 0; i < needed; ++i) {
    pixels[i] = static_cast<double>(bytes[raster + i]) / 255.0;
  }
  return Image(shape, std::move(pixels));
}

std::vector<std::uint8_t> encode_netpbm(const Image& image) {
  return encode_pixels(image.shape(), image.pixels());
}

std::vector<std::uint8_t> encode_netpbm(const FieldImage& image) {
  return encode_pixels(image.shape(), image.pixels());
}

Image read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_netpbm(bytes);
}

void write_image(const Image& image, const std::filesystem::path& path) {
  write_bytes(encode_netpbm(image), path);
}

void write_image(const FieldImage& image, const std::filesystem::path& path) {
  write_bytes(encode_netpbm(image), path);
}

const char* netpbm_extension(const Shape& shape) {
  return shape.channels == 1 ? ".pgm" : ".ppm";
}

}  // namespace gradlens
