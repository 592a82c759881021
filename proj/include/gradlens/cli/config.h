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

// Experiment configuration files.
//
// Line-oriented format:
//
//   # comment
//   [section]
//   key = value   # a '#' after whitespace starts a comment
//
// Sections and their keys (defaults in parentheses):
//
//   [experiment]  seed (0), output (gradlens-out), trials (10)
//   [data]        source (synthetic | directory), directory,
//                 calibration_directory, width (16), height (16),
//                 channels (1), classes (4), calibration_size (256),
//                 train_size (256), test_size (256)
//   [round]       users (1), selected (1), learning_rate (0.05),
//                 batch_size (8), batch_sizes (list, sweep only)
//   [attack]      kind (imprint), neurons (64), neuron_counts (list, sweep
//                 only), epsilon (1e-12), psnr_cap (300), trap_scale (1),
//                 trap_negative_fraction (0.5), trap_margin (0.02),
//                 linear_bias (-40), linear_weight_scale (0.01)
//   [defense]     suite (none)
//   [training]    epochs (20), learning_rate (0.05), batch_size (8),
//                 hidden_units (32)
//
// Lists are comma separated. Relative paths resolve against the directory
// holding the config file. Unknown sections or keys, duplicate keys and
// keys outside a section are errors.
//
// Directory data: every .ppm/.pgm file, sorted by name, labelled by the
// integer before the first '_' in its file name. User u receives files
// [u*B, (u+1)*B); calibration uses calibration_directory when set and
// the files after the users' share otherwise.

#ifndef GRADLENS_CLI_CONFIG_H_
#define GRADLENS_CLI_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gradlens/flsim.h"
#include "gradlens/imaging.h"

namespace gradlens::cli {

enum class DataKind { kSynthetic, kDirectory };

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output = "gradlens-out";
  std::size_t trials = 10;

  DataKind data = DataKind::kSynthetic;
  std::filesystem::path data_directory;
  std::filesystem::path calibration_directory;
  Shape shape{16, 16, 1};
  std::size_t classes = 4;
  std::size_t calibration_size = 256;
  std::size_t train_size = 256;
  std::size_t test_size = 256;

  std::size_t users = 1;
  std::size_t selected = 1;
  double learning_rate = 0.05;
  std::size_t batch_size = 8;
  std::vector<std::size_t> batch_sizes;

  AttackKind attack = AttackKind::kImprint;
  std::size_t neurons = 64;
  std::vector<std::size_t> neuron_counts;
  double epsilon = 1e-12;
  double psnr_cap = 300.0;
  double trap_scale = 1.0;
  double trap_negative_fraction = 0.5;
  double trap_margin = 0.02;
  double linear_bias = -40.0;
  double linear_weight_scale = 0.01;

  std::string suite = "none";

  std::size_t train_epochs = 20;
  double train_learning_rate = 0.05;
  std::size_t train_batch_size = 8;
  std::size_t hidden_units = 32;

  // Throws ConfigError naming the first invalid field.
  void validate() const;

  // Sweep grids; a missing list falls back to the single value.
  std::vector<std::size_t> sweep_batch_sizes() const;
  std::vector<std::size_t> sweep_neuron_counts() const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output;
  std::optional<std::string> attack;
  std::optional<std::string> defense;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> neurons;
};

// Parses config text. Throws ParseError (location = 1-based line) on
// syntax errors, unknown or duplicate keys and malformed values. Paths are
// resolved against `base_dir`. Does not validate.
ExperimentConfig parse_config(std::string_view text,
                              const std::filesystem::path& base_dir = {});

// Reads and parses `path`, applies `overrides`, then validates.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const Overrides& overrides = {});

void apply_overrides(ExperimentConfig& cfg, const Overrides& overrides);

}  // namespace gradlens::cli

#endif  // GRADLENS_CLI_CONFIG_H_
