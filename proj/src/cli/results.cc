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

#include "gradlens/cli/results.h"

#include <charconv>
#include <cstdio>
#include <system_error>

#include "gradlens/error.h"

namespace gradlens::cli {
namespace {

constexpr std::string_view kResultsHeader =
    "attack,suite,batch_size,neurons,seed,trial,user,recovered,min,q1,median,"
    "q3,max,mean,mean_residual,psnrs";
constexpr std::string_view kUtilityHeader = "suite,accuracy,delta";

std::string join_header(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

template <typename T>
T to_integer(const std::string& s, std::string_view what) {
  T out{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bad " + std::string(what) + " '" + s + "'", 0);
  }
  return out;
}

double to_real(const std::string& s, std::string_view what) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bad " + std::string(what) + " '" + s + "'", 0);
  }
  return out;
}

void expect_schema(std::string_view text, std::string_view schema) {
  const std::string_view first = text.substr(0, text.find('\n'));
  if (first != schema) {
    throw ParseError("expected schema line '" + std::string(schema) + "'", 0);
  }
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(value);
  }
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '#') {
      const auto nl = text.find('\n', i);
      i = nl == std::string_view::npos ? text.size() : nl + 1;
      continue;
    }
    std::vector<std::string> record;
    std::string field;
    bool done = false;
    while (!done) {
      if (i < text.size() && text[i] == '"') {
        const std::size_t open = i++;
        while (true) {
          if (i >= text.size()) {
            throw ParseError("unterminated quoted field", open);
          }
          if (text[i] == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field += '"';
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          field += text[i++];
        }
        if (i < text.size() && text[i] != ',' && text[i] != '\n' &&
            text[i] != '\r') {
          throw ParseError("text after closing quote", i);
        }
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '\n' &&
               text[i] != '\r') {
          if (text[i] == '"') throw ParseError("stray quote in field", i);
          field += text[i++];
        }
      }
      record.push_back(std::move(field));
      field.clear();
      if (i >= text.size()) {
        done = true;
      } else if (text[i] == ',') {
        ++i;
      } else {
        if (text[i] == '\r') ++i;
        if (i < text.size() && text[i] == '\n') ++i;
        done = true;
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::string write_results(const std::vector<ResultRow>& rows) {
  std::string out(kResultsSchema);
  out += '\n';
  out += kResultsHeader;
  out += '\n';
  for (const ResultRow& r : rows) {
    std::string psnrs;
    for (std::size_t i = 0; i < r.psnrs.size(); ++i) {
      if (i) psnrs += ';';
      psnrs += format_real(r.psnrs[i]);
    }
    const std::vector<std::string> fields = {
        csv_field(r.attack),
        csv_field(r.suite),
        std::to_string(r.batch_size),
        std::to_string(r.neurons),
        std::to_string(r.seed),
        std::to_string(r.trial),
        std::to_string(r.user),
        std::to_string(r.recovered),
        format_real(r.summary.min),
        format_real(r.summary.q1),
        format_real(r.summary.median),
        format_real(r.summary.q3),
        format_real(r.summary.max),
        format_real(r.summary.mean),
        r.mean_residual ? format_real(*r.mean_residual) : std::string(),
        csv_field(psnrs)};
    out += join_header(fields);
    out += '\n';
  }
  return out;
}

std::vector<ResultRow> parse_results(std::string_view text) {
  expect_schema(text, kResultsSchema);
  const auto records = parse_csv(text);
  if (records.empty() || join_header(records.front()) != kResultsHeader) {
    throw ParseError("missing or unexpected results header", 0);
  }
  std::vector<ResultRow> rows;
  for (std::size_t k = 1; k < records.size(); ++k) {
    const auto& f = records[k];
    if (f.size() != 16) {
      throw ParseError("results row " + std::to_string(k) + " has " +
                           std::to_string(f.size()) + " fields",
                       0);
    }
    ResultRow r;
    r.attack = f[0];
    r.suite = f[1];
    r.batch_size = to_integer<std::size_t>(f[2], "batch_size");
    r.neurons = to_integer<std::size_t>(f[3], "neurons");
    r.seed = to_integer<std::uint64_t>(f[4], "seed");
    r.trial = to_integer<std::size_t>(f[5], "trial");
    r.user = to_integer<std::size_t>(f[6], "user");
    r.recovered = to_integer<std::size_t>(f[7], "recovered");
    r.summary = Summary{to_real(f[8], "min"),     to_real(f[9], "q1"),
                        to_real(f[10], "median"), to_real(f[11], "q3"),
                        to_real(f[12], "max"),    to_real(f[13], "mean")};
    if (!f[14].empty()) r.mean_residual = to_real(f[14], "mean_residual");
    std::string_view list = f[15];
    while (!list.empty()) {
      const auto semi = list.find(';');
      r.psnrs.push_back(to_real(std::string(list.substr(0, semi)), "psnr"));
      if (semi == std::string_view::npos) break;
      list.remove_prefix(semi + 1);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string write_utility(const std::vector<UtilityRow>& rows) {
  std::string out(kUtilitySchema);
  out += '\n';
  out += kUtilityHeader;
  out += '\n';
  for (const UtilityRow& r : rows) {
    out += csv_field(r.suite) + ',' + format_real(r.accuracy) + ',' +
           format_real(r.delta) + '\n';
  }
  return out;
}

std::vector<UtilityRow> parse_utility(std::string_view text) {
  expect_schema(text, kUtilitySchema);
  const auto records = parse_csv(text);
  if (records.empty() || join_header(records.front()) != kUtilityHeader) {
    throw ParseError("missing or unexpected utility header", 0);
  }
  std::vector<UtilityRow> rows;
  for (std::size_t k = 1; k < records.size(); ++k) {
    const auto& f = records[k];
    if (f.size() != 3) throw ParseError("utility row needs 3 fields", 0);
    rows.push_back({f[0], to_real(f[1], "accuracy"), to_real(f[2], "delta")});
  }
  return rows;
}

}  // namespace gradlens::cli
