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

// Binary netpbm codecs: P5 (PGM, 1 channel) and P6 (PPM, 3 channels), 8-bit
// only (maxval 255). A byte v decodes to v / 255; encoding clamps to [0, 1]
// and quantizes with round-half-up, floor(v * 255 + 0.5).

#ifndef GRADLENS_IMAGE_IO_H_
#define GRADLENS_IMAGE_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gradlens/imaging.h"

namespace gradlens {

// Throws ParseError (location = byte offset) on malformed or truncated
// input and on any maxval other than 255.
Image decode_netpbm(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_netpbm(const Image& image);
std::vector<std::uint8_t> encode_netpbm(const FieldImage& image);

// File wrappers. Reading throws Error if the file cannot be opened.
Image read_image(const std::filesystem::path& path);
void write_image(const Image& image, const std::filesystem::path& path);
void write_image(const FieldImage& image, const std::filesystem::path& path);

// Conventional extension for a shape: ".pgm" or ".ppm".
const char* netpbm_extension(const Shape& shape);

}  // namespace gradlens

#endif  // GRADLENS_IMAGE_IO_H_
