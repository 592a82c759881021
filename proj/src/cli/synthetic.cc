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

#include "gradlens/cli/synthetic.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gradlens/error.h"
#include "gradlens/rng.h"

namespace gradlens::cli {
namespace {

constexpr std::size_t kGrid = 4;
constexpr double kFieldScale = 0.18;
constexpr double kMotifAmplitude = 0.3;

double ring_radius(std::size_t label, std::size_t classes, double extent) {
  if (classes == 1) return 0.3 * extent;
  const double t = static_cast<double>(label) / static_cast<double>(classes - 1);
  return extent * (0.15 + 0.7 * t);
}

}  // namespace

LabeledBatch gen_synthetic(std::uint64_t seed, std::size_t count,
                           const Shape& shape, std::size_t class_count) {
  validate_shape(shape);
  if (class_count < 1) throw ConfigError("synthetic: class_count must be >= 1");
  if (count < class_count) {
    throw ConfigError("synthetic: count " + std::to_string(count) +
                      " is smaller than class_count " +
                      std::to_string(class_count));
  }
  const double h = static_cast<double>(shape.height);
  const double w = static_cast<double>(shape.width);
  const double cy = (h - 1.0) / 2.0;
  const double cx = (w - 1.0) / 2.0;
  const double extent = std::min(h, w) / 2.0;

  LabeledBatch out;
  out.images.reserve(count);
  out.labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, i));
    const std::size_t label = i % class_count;
    const double radius = ring_radius(label, class_count, extent);
    const double base = rng.uniform(0.2, 0.65);
    std::vector<double> grid(kGrid * kGrid * shape.channels);
    for (double& g : grid) g = kFieldScale * rng.normal();

    std::vector<double> pixels(shape.size());
    for (std::size_t r = 0; r < shape.height; ++r) {
      const double gy = (h > 1 ? static_cast<double>(r) / (h - 1.0) : 0.0) *
                        static_cast<double>(kGrid - 1);
      const auto y0 = std::min<std::size_t>(static_cast<std::size_t>(gy), kGrid - 2);
      const double fy = gy - static_cast<double>(y0);
      for (std::size_t c = 0; c < shape.width; ++c) {
        const double gx = (w > 1 ? static_cast<double>(c) / (w - 1.0) : 0.0) *
                          static_cast<double>(kGrid - 1);
        const auto x0 = std::min<std::size_t>(static_cast<std::size_t>(gx), kGrid - 2);
        const double fx = gx - static_cast<double>(x0);
        const double dist = std::hypot(static_cast<double>(r) - cy,
                                       static_cast<double>(c) - cx);
        const double motif =
            kMotifAmplitude * std::exp(-0.5 * std::pow((dist - radius) / 0.8, 2));
        for (std::size_t ch = 0; ch < shape.channels; ++ch) {
          auto at = [&](std::size_t gr, std::size_t gc) {
            return grid[(gr * kGrid + gc) * shape.channels + ch];
          };
          const double top = at(y0, x0) + fx * (at(y0, x0 + 1) - at(y0, x0));
          const double bottom =
              at(y0 + 1, x0) + fx * (at(y0 + 1, x0 + 1) - at(y0 + 1, x0));
          const double field = top + fy * (bottom - top);
          pixels[shape.index(r, c, ch)] =
              std::clamp(base + field + motif, 0.0, 1.0);
        }
      }
    }
    out.images.emplace_back(shape, std::move(pixels));
    out.labels.push_back(label);
  }
  return out;
}

}  // namespace gradlens::cli
