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

// CSV result files: a version comment line, a header row, then data rows.
// Fields follow RFC 4180 quoting with LF line endings; reals are written
// with %.17g so they parse back to the same double.

#ifndef GRADLENS_CLI_RESULTS_H_
#define GRADLENS_CLI_RESULTS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "gradlens/analysis.h"

namespace gradlens::cli {

inline constexpr std::string_view kResultsSchema = "# gradlens results v1";
inline constexpr std::string_view kUtilitySchema = "# gradlens utility v1";
inline constexpr std::string_view kMatrixSchema = "# gradlens psnr-matrix v1";

struct ResultRow {
  std::string attack;
  std::string suite;
  std::size_t batch_size = 0;
  std::size_t neurons = 0;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  std::size_t user = 0;
  std::size_t recovered = 0;  // originals at >= kRecoveryThresholdDb
  Summary summary;
  std::optional<double> mean_residual;  // empty without reconstructions
  std::vector<double> psnrs;            // one per original

  auto key() const {
    return std::tie(attack, suite, batch_size, neurons, trial, user);
  }
  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct UtilityRow {
  std::string suite;
  double accuracy = 0.0;  // percent
  double delta = 0.0;     // accuracy minus the "none" row
  friend bool operator==(const UtilityRow&, const UtilityRow&) = default;
};

std::string format_real(double value);
std::string csv_field(std::string_view value);

// Splits CSV text into records of unquoted fields. Lines starting with '#'
// outside quotes are skipped. Throws ParseError (location = byte offset)
// on malformed quoting.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::string write_results(const std::vector<ResultRow>& rows);
// Throws ParseError on a missing schema line, wrong header or bad field.
std::vector<ResultRow> parse_results(std::string_view text);

std::string write_utility(const std::vector<UtilityRow>& rows);
std::vector<UtilityRow> parse_utility(std::string_view text);

}  // namespace gradlens::cli

#endif  // GRADLENS_CLI_RESULTS_H_
