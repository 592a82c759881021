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

#ifndef GRADLENS_CLI_SVG_H_
#define GRADLENS_CLI_SVG_H_

#include <optional>
#include <string>
#include <vector>

#include "gradlens/imaging.h"

namespace gradlens::cli {

struct SheetEntry {
  std::string caption;
  Image original;
  std::optional<Image> reconstruction;
};

// SVG 1.1 document with one row per entry: original on the left,
// reconstruction (if any) on the right, each pixel drawn as a rect.
// `notice`, when non-empty, is printed above the grid.
std::string contact_sheet(const std::vector<SheetEntry>& entries,
                          const std::string& notice);

std::string xml_escape(const std::string& text);

}  // namespace gradlens::cli

#endif  // GRADLENS_CLI_SVG_H_
