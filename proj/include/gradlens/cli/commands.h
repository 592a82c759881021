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

// Experiment commands. Every command writes into a staging directory next
// to the configured output and renames it into place only on success.
//
// attack   results.csv, report.txt, images/ (userU_origT and, when some
//          reconstruction was matched, userU_reconT)
// sweep    sweep.csv, psnr_matrix.csv
// utility  utility.csv
// gallery  reads images/ of a finished attack run, writes gallery/ with
//          pair_userU_T images and contact_sheet.svg

#ifndef GRADLENS_CLI_COMMANDS_H_
#define GRADLENS_CLI_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gradlens/cli/config.h"
#include "gradlens/cli/results.h"
#include "gradlens/flsim.h"

namespace gradlens::cli {

struct TrialData {
  std::vector<LabeledBatch> users;
  std::vector<Image> calibration;
};

// Synthetic data is drawn from `trial_seed`; directory data is the same
// for every trial.
TrialData make_trial_data(const ExperimentConfig& cfg, std::size_t batch_size,
                          std::uint64_t trial_seed);

RoundConfig make_round_config(const ExperimentConfig& cfg,
                              std::size_t batch_size, std::size_t neurons,
                              std::uint64_t trial_seed);

struct TrialResult {
  RoundOutcome outcome;
  std::vector<ResultRow> rows;  // one per selected user
};

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t batch_size,
                      std::size_t neurons, std::size_t trial,
                      std::uint64_t trial_seed);

// Seed of sweep trial t.
std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t trial);

struct SweepResult {
  std::vector<ResultRow> rows;  // sorted by ResultRow::key
  std::vector<std::size_t> batch_sizes;
  std::vector<std::size_t> neuron_counts;
  // mean_psnr[b][n]: mean best PSNR over every original of every trial.
  std::vector<std::vector<double>> mean_psnr;
};

SweepResult run_sweep(const ExperimentConfig& cfg);
std::string write_matrix(const SweepResult& sweep);

// Test accuracy (percent) per suite, in suite_names() order.
std::vector<UtilityRow> run_utility(const ExperimentConfig& cfg);

int cmd_attack(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);
int cmd_utility(const ExperimentConfig& cfg, std::ostream& log);
int cmd_gallery(const ExperimentConfig& cfg, std::ostream& log);

// Loads the config and runs `command`. Exit codes: 0 success, 2 for
// configuration or usage errors, 1 for runtime failures.
int run_command(std::string_view command,
                const std::filesystem::path& config_path,
                const Overrides& overrides, std::ostream& out,
                std::ostream& err);

}  // namespace gradlens::cli

#endif  // GRADLENS_CLI_COMMANDS_H_
