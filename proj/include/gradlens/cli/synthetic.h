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

#ifndef GRADLENS_CLI_SYNTHETIC_H_
#define GRADLENS_CLI_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>

#include "gradlens/defense.h"
#include "gradlens/imaging.h"

namespace gradlens::cli {

// Seeded labelled images: a random base level, a smooth low-frequency field
// (a coarse 4x4 grid of normal draws upsampled bilinearly) and a centred
// ring whose radius encodes the class, clamped to [0, 1]. Label of image i
// is i % class_count. Throws ConfigError if count < class_count or
// class_count < 1.
LabeledBatch gen_synthetic(std::uint64_t seed, std::size_t count,
                           const Shape& shape, std::size_t class_count);

}  // namespace gradlens::cli

#endif  // GRADLENS_CLI_SYNTHETIC_H_
