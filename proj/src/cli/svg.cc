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

#include "gradlens/cli/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gradlens::cli {
namespace {

constexpr int kScale = 4;
constexpr int kPad = 8;
constexpr int kCaption = 14;

int channel_byte(double v) {
  return static_cast<int>(std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5));
}

void draw_image(std::ostringstream& out, const Image& image, int x0, int y0) {
  const Shape& s = image.shape();
  for (std::size_t r = 0; r < s.height; ++r) {
    for (std::size_t c = 0; c < s.width; ++c) {
      int rgb[3];
      for (int k = 0; k < 3; ++k) {
        const std::size_t ch = s.channels == 1 ? 0 : static_cast<std::size_t>(k);
        rgb[k] = channel_byte(image.at(r, c, ch));
      }
      char color[8];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", rgb[0], rgb[1],
                    rgb[2]);
      out << "<rect x=\"" << x0 + static_cast<int>(c) * kScale << "\" y=\""
          << y0 + static_cast<int>(r) * kScale << "\" width=\"" << kScale
          << "\" height=\"" << kScale << "\" fill=\"" << color << "\"/>\n";
    }
  }
}

}  // namespace

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string contact_sheet(const std::vector<SheetEntry>& entries,
                          const std::string& notice) {
  int cell_w = 0;
  int cell_h = 0;
  for (const SheetEntry& e : entries) {
    cell_w = std::max(cell_w, static_cast<int>(e.original.shape().width) * kScale);
    cell_h = std::max(cell_h, static_cast<int>(e.original.shape().height) * kScale);
  }
  const int header = notice.empty() ? 0 : kCaption + kPad;
  const int row_h = cell_h + kCaption + kPad;
  const int width = std::max(3 * kPad + 2 * cell_w, 240);
  const int height =
      kPad + header + static_cast<int>(entries.size()) * row_h + kPad;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
      << width << "\" height=\"" << height << "\" viewBox=\"0 0 " << width
      << ' ' << height << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";
  if (!notice.empty()) {
    out << "<text x=\"" << kPad << "\" y=\"" << kPad + kCaption - 3
        << "\" font-family=\"monospace\" font-size=\"11\">"
        << xml_escape(notice) << "</text>\n";
  }
  int y = kPad + header;
  for (const SheetEntry& e : entries) {
    out << "<text x=\"" << kPad << "\" y=\"" << y + kCaption - 3
        << "\" font-family=\"monospace\" font-size=\"11\">"
        << xml_escape(e.caption) << "</text>\n";
    draw_image(out, e.original, kPad, y + kCaption);
    if (e.reconstruction) {
      draw_image(out, *e.reconstruction, 2 * kPad + cell_w, y + kCaption);
    }
    y += row_h;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace gradlens::cli
