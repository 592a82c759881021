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

#include "gradlens/defense.h"

#include <array>

#include "gradlens/error.h"

namespace gradlens {
namespace {

constexpr std::array<std::string_view, 7> kSuiteNames = {
    "none", "major-rotation", "minor-rotation", "shear",
    "hflip", "vflip", "mr-sh"};

std::vector<TransformSpec> rotations(std::initializer_list<double> degrees) {
  std::vector<TransformSpec> out;
  for (double d : degrees) out.push_back(TransformSpec::rotate(d));
  return out;
}

std::vector<TransformSpec> shears() {
  return {TransformSpec::shear(0.55), TransformSpec::shear(1.0),
          TransformSpec::shear(0.9)};
}

}  // namespace

void LabeledBatch::validate() const {
  if (images.empty()) throw ContractViolation("LabeledBatch: empty batch");
  if (images.size() != labels.size()) {
    throw ContractViolation("LabeledBatch: " + std::to_string(images.size()) +
                            " images but " + std::to_string(labels.size()) +
                            " labels");
  }
  for (const Image& image : images) {
    if (image.shape() != images.front().shape()) {
      throw ContractViolation("LabeledBatch: mixed image shapes " +
                              image.shape().to_string() + " and " +
                              images.front().shape().to_string());
    }
  }
}

std::span<const std::string_view> suite_names() { return kSuiteNames; }

AugmentationSuite suite(std::string_view name) {
  AugmentationSuite s{std::string(name), {}};
  if (name == "none") return s;
  if (name == "major-rotation") {
    s.transforms = rotations({90, 180, 270});
  } else if (name == "minor-rotation") {
    s.transforms = rotations({30, 45, 60});
  } else if (name == "shear") {
    s.transforms = shears();
  } else if (name == "hflip") {
    s.transforms = {TransformSpec::flip_h()};
  } else if (name == "vflip") {
    s.transforms = {TransformSpec::flip_v()};
  } else if (name == "mr-sh") {
    s.transforms = rotations({90, 180, 270});
    for (const TransformSpec& t : shears()) s.transforms.push_back(t);
  } else {
    std::string valid;
    for (std::string_view n : kSuiteNames) {
      if (!valid.empty()) valid += ", ";
      valid += n;
    }
    throw ConfigError("unknown augmentation suite '" + std::string(name) +
                      "' (valid: " + valid + ")");
  }
  return s;
}

AugmentedBatch build_augmented_batch(const LabeledBatch& batch,
                                     const AugmentationSuite& suite) {
  batch.validate();
  AugmentedBatch out;
  out.base = batch;
  const std::size_t per_image = 1 + suite.transforms.size();
  out.expanded.images.reserve(batch.size() * per_image);
  out.expanded.labels.reserve(batch.size() * per_image);
  out.origin_map.reserve(batch.size() * per_image);
  for (std::size_t t = 0; t < batch.size(); ++t) {
    out.expanded.images.push_back(batch.images[t]);
    out.expanded.labels.push_back(batch.labels[t]);
    out.origin_map.push_back({t, std::nullopt});
    for (const TransformSpec& spec : suite.transforms) {
      out.expanded.images.push_back(apply_transform(batch.images[t], spec));
      out.expanded.labels.push_back(batch.labels[t]);
      out.origin_map.push_back({t, spec});
    }
  }
  return out;
}

}  // namespace gradlens
