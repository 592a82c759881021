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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gradlens/cli/commands.h"

int main(int argc, char** argv) {
  CLI::App app{"gradlens: gradient inversion attacks and augmentation defenses"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> attack;
  std::optional<std::string> defense;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> neurons;

  const char* descriptions[][2] = {
      {"attack", "run one round and reconstruct client images"},
      {"sweep", "grid over batch sizes and neuron counts"},
      {"utility", "train with every augmentation suite and compare accuracy"},
      {"gallery", "render pairs and a contact sheet from an attack run"}};
  for (const auto& [name, help] : descriptions) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "experiment config file")->required();
    sub->add_option("--seed", seed, "override experiment seed");
    sub->add_option("--out", out, "override output directory");
    sub->add_option("--attack", attack, "imprint, trap or linear");
    sub->add_option("--defense", defense,
                    "none, major-rotation, minor-rotation, shear, hflip, "
                    "vflip or mr-sh");
    sub->add_option("--batch-size", batch_size, "override batch size");
    sub->add_option("--neurons", neurons, "override malicious neuron count");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  gradlens::cli::Overrides overrides;
  overrides.seed = seed;
  if (out) overrides.output = *out;
  overrides.attack = attack;
  overrides.defense = defense;
  overrides.batch_size = batch_size;
  overrides.neurons = neurons;

  const std::string command = app.get_subcommands().front()->get_name();
  return gradlens::cli::run_command(command, config, overrides, std::cout,
                                    std::cerr);
}
