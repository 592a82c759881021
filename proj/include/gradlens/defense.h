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

// Augmentation-based batch expansion.
//
// A client replaces its batch D with D' = D plus, for every image, a fixed
// set of transformed copies that inherit the image's label. When the
// transforms leave a neuron's activation decision unchanged (e.g. a
// pixel-mean measurement under rotations by 90 degrees), every attacked
// neuron sees an image together with its copies, and gradient inversion
// can only return a blend of them.

#ifndef GRADLENS_DEFENSE_H_
#define GRADLENS_DEFENSE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gradlens/imaging.h"

namespace gradlens {

struct LabeledBatch {
  std::vector<Image> images;
  std::vector<std::size_t> labels;

  std::size_t size() const { return images.size(); }
  // Throws ContractViolation if empty, lengths differ, or shapes differ.
  void validate() const;
  const Shape& shape() const { return images.front().shape(); }
};

struct AugmentationSuite {
  std::string name;
  std::vector<TransformSpec> transforms;
};

// Names accepted by `suite`, in canonical order.
std::span<const std::string_view> suite_names();

// none, major-rotation {90, 180, 270}, minor-rotation {30, 45, 60},
// shear {0.55, 1.0, 0.9}, hflip, vflip, mr-sh (major-rotation then shear).
// Throws ConfigError listing the valid names for anything else.
AugmentationSuite suite(std::string_view name);

struct Origin {
  std::size_t base_index = 0;
  // nullopt for the untransformed original.
  std::optional<TransformSpec> transform;
};

struct AugmentedBatch {
  LabeledBatch base;
  LabeledBatch expanded;
  std::vector<Origin> origin_map;  // One entry per expanded element.

  std::size_t copies_per_image() const {
    return expanded.size() / base.size();
  }
  // Position of base image t inside `expanded`.
  std::size_t original_position(std::size_t t) const {
    return t * copies_per_image();
  }
};

// Expanded order: original 0, its transforms in suite order, original 1, ...
AugmentedBatch build_augmented_batch(const LabeledBatch& batch,
                                     const AugmentationSuite& suite);

}  // namespace gradlens

#endif  // GRADLENS_DEFENSE_H_
