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

#include "gradlens/cli/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <system_error>

#include "gradlens/defense.h"
#include "gradlens/error.h"

namespace gradlens::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::size_t line, std::string_view key,
                            std::string_view value, std::string_view expected) {
  throw ParseError("line " + std::to_string(line) + ": " + std::string(key) +
                       " = '" + std::string(value) + "' is not " +
                       std::string(expected),
                   line);
}

template <typename T>
T parse_integer(std::string_view value, std::size_t line, std::string_view key) {
  T out{};
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    bad_value(line, key, value, "a non-negative integer");
  }
  return out;
}

double parse_double(std::string_view value, std::size_t line,
                    std::string_view key) {
  double out = 0.0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() ||
      !std::isfinite(out)) {
    bad_value(line, key, value, "a finite number");
  }
  return out;
}

std::vector<std::size_t> parse_list(std::string_view value, std::size_t line,
                                    std::string_view key) {
  std::vector<std::size_t> out;
  while (true) {
    const auto comma = value.find(',');
    const std::string_view item = trim(value.substr(0, comma));
    out.push_back(parse_integer<std::size_t>(item, line, key));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return out;
}

std::filesystem::path resolve(std::string_view value,
                              const std::filesystem::path& base_dir) {
  std::filesystem::path p{std::string(value)};
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view,
                                  std::size_t)>;

std::map<std::string, Setter, std::less<>> make_setters(
    const std::filesystem::path& base) {
  auto size = [](std::size_t ExperimentConfig::*field, const char* key) {
    return Setter([field, key](ExperimentConfig& c, std::string_view v,
                               std::size_t line) {
      c.*field = parse_integer<std::size_t>(v, line, key);
    });
  };
  auto real = [](double ExperimentConfig::*field, const char* key) {
    return Setter([field, key](ExperimentConfig& c, std::string_view v,
                               std::size_t line) {
      c.*field = parse_double(v, line, key);
    });
  };
  return {
      {"experiment.seed",
       [](ExperimentConfig& c, std::string_view v, std::size_t line) {
         c.seed = parse_integer<std::uint64_t>(v, line, "seed");
       }},
      {"experiment.output",
       [base](ExperimentConfig& c, std::string_view v, std::size_t) {
         c.output = resolve(v, base);
       }},
      {"experiment.trials", size(&ExperimentConfig::trials, "trials")},
      {"data.source",
       [](ExperimentConfig& c, std::string_view v, std::size_t line) {
         if (v == "synthetic") {
           c.data = DataKind::kSynthetic;
         } else if (v == "directory") {
           c.data = DataKind::kDirectory;
         } else {
           bad_value(line, "source", v, "synthetic or directory");
         }
       }},
      {"data.directory",
       [base](ExperimentConfig& c, std::string_view v, std::size_t) {
         c.data_directory = resolve(v, base);
       }},
      {"data.calibration_directory",
       [base](ExperimentConfig& c, std::string_view v, std::size_t) {
         c.calibration_directory = resolve(v, base);
       }},
      {"data.width",
       [](ExperimentConfig& c, std::string_view v, std::size_t line) {
         c.shape.width = parse_integer<std::size_t>(v, line, "width");
       }},
      {"data.height",
       [](ExperimentConfig& c, std::string_view v, std::size_t line) {
         c.shape.height = parse_integer<std::size_t>(v, line, "height");
       }},
      {"data.channels",
       [](ExperimentConfig& c, std::string_view v, std::size_t line) {
         c.shape.channels = parse_integer<std::size_t>(v, line, "channels");
       }},
      {"data.classes", size(&ExperimentConfig::classes, "classes")},
      {"data.calibration_size",
       size(&ExperimentConfig::calibration_size, "calibration_size")},
      {"data.train_size", size(&ExperimentConfig::train_size, "train_size")},
      {"data.test_size", size(&ExperimentConfig::test_size, "test_size")},
      {"round.users", size(&ExperimentConfig::users, "users")},
      {"round.selected", size(&ExperimentConfig::selected, "selected")},
      {"round.learning_rate",
       real(&ExperimentConfig::learning_rate, "learning_rate")},
      {"round.batch_size", size(&ExperimentConfig::batch_size, "batch_size")},
      {"round.batch_sizes",
       [](ExperimentConfig& c, std::string_view v, std::size_t line) {
         c.batch_sizes = parse_list(v, line, "batch_sizes");
       }},
      {"attack.kind",
       [](ExperimentConfig& c, std::string_view v, std::size_t line) {
         try {
           c.attack = parse_attack_kind(v);
         } catch (const ConfigError&) {
           bad_value(line, "kind", v, "one of none, imprint, trap, linear");
         }
       }},
      {"attack.neurons", size(&ExperimentConfig::neurons, "neurons")},
      {"attack.neuron_counts",
       [](ExperimentConfig& c, std::string_view v, std::size_t line) {
         c.neuron_counts = parse_list(v, line, "neuron_counts");
       }},
      {"attack.epsilon", real(&ExperimentConfig::epsilon, "epsilon")},
      {"attack.psnr_cap", real(&ExperimentConfig::psnr_cap, "psnr_cap")},
      {"attack.trap_scale", real(&ExperimentConfig::trap_scale, "trap_scale")},
      {"attack.trap_negative_fraction",
       real(&ExperimentConfig::trap_negative_fraction,
            "trap_negative_fraction")},
      {"attack.trap_margin",
       real(&ExperimentConfig::trap_margin, "trap_margin")},
      {"attack.linear_bias",
       real(&ExperimentConfig::linear_bias, "linear_bias")},
      {"attack.linear_weight_scale",
       real(&ExperimentConfig::linear_weight_scale, "linear_weight_scale")},
      {"defense.suite",
       [](ExperimentConfig& c, std::string_view v, std::size_t) {
         c.suite = std::string(v);
       }},
      {"training.epochs", size(&ExperimentConfig::train_epochs, "epochs")},
      {"training.learning_rate",
       real(&ExperimentConfig::train_learning_rate, "learning_rate")},
      {"training.batch_size",
       size(&ExperimentConfig::train_batch_size, "batch_size")},
      {"training.hidden_units",
       size(&ExperimentConfig::hidden_units, "hidden_units")},
  };
}

bool known_section(std::string_view name) {
  for (const char* s :
       {"experiment", "data", "round", "attack", "defense", "training"}) {
    if (name == s) return true;
  }
  return false;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

ExperimentConfig parse_config(std::string_view text,
                              const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  const auto table = make_setters(base_dir);
  std::set<std::string> seen;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    std::string_view line = raw;
    for (std::size_t p = 1; p < line.size(); ++p) {
      if (line[p] == '#' && (line[p - 1] == ' ' || line[p - 1] == '\t')) {
        line = line.substr(0, p);
        break;
      }
    }
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError("line " + std::to_string(line_no) +
                             ": unterminated section header",
                         line_no);
      }
      const std::string_view name = trim(line.substr(1, line.size() - 2));
      if (!known_section(name)) {
        throw ParseError("line " + std::to_string(line_no) +
                             ": unknown section [" + std::string(name) + "]",
                         line_no);
      }
      section = std::string(name);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) +
                           ": expected 'key = value'",
                       line_no);
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": key '" +
                           std::string(key) + "' outside any section",
                       line_no);
    }
    const std::string full = section + "." + std::string(key);
    const auto it = table.find(full);
    if (it == table.end()) {
      throw ParseError("line " + std::to_string(line_no) + ": unknown key '" +
                           std::string(key) + "' in [" + section + "]",
                       line_no);
    }
    if (!seen.insert(full).second) {
      throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" +
                           std::string(key) + "' in [" + section + "]",
                       line_no);
    }
    if (value.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": empty value for '" +
                           std::string(key) + "'",
                       line_no);
    }
    it->second(cfg, value, line_no);
  }
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.output) cfg.output = *o.output;
  if (o.attack) cfg.attack = parse_attack_kind(*o.attack);
  if (o.defense) cfg.suite = *o.defense;
  if (o.batch_size) {
    cfg.batch_size = *o.batch_size;
    cfg.batch_sizes.clear();
  }
  if (o.neurons) {
    cfg.neurons = *o.neurons;
    cfg.neuron_counts.clear();
  }
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const Overrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  ExperimentConfig cfg = parse_config(text.str(), path.parent_path());
  apply_overrides(cfg, overrides);
  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  require(trials >= 1, "trials: must be >= 1");
  try {
    validate_shape(shape);
  } catch (const Error& e) {
    throw ConfigError(std::string("width/height/channels: ") + e.what());
  }
  require(shape.channels == 1 || shape.channels == 3,
          "channels: must be 1 or 3");
  require(classes >= 2, "classes: must be >= 2");
  require(calibration_size >= 1, "calibration_size: must be >= 1");
  require(train_size >= classes, "train_size: must be >= classes");
  require(test_size >= 1, "test_size: must be >= 1");
  if (data == DataKind::kDirectory) {
    require(!data_directory.empty(), "directory: required for directory data");
  }
  require(users >= 1, "users: must be >= 1");
  require(selected >= 1 && selected <= users,
          "selected: must lie in [1, users]");
  require(learning_rate > 0.0, "learning_rate: must be > 0");
  for (std::size_t b : sweep_batch_sizes()) {
    require(b >= 1, "batch_size: must be >= 1");
  }
  for (std::size_t n : sweep_neuron_counts()) {
    require(n >= 1, "neurons: must be >= 1");
    if (attack == AttackKind::kImprint) {
      require(n >= 2, "neurons: must be >= 2 for the imprint attack");
    }
  }
  require(epsilon >= 0.0, "epsilon: must be >= 0");
  require(psnr_cap > 0.0, "psnr_cap: must be > 0");
  require(trap_scale > 0.0, "trap_scale: must be > 0");
  require(trap_negative_fraction >= 0.0 && trap_negative_fraction <= 1.0,
          "trap_negative_fraction: must lie in [0, 1]");
  require(trap_margin >= 0.0, "trap_margin: must be >= 0");
  require(linear_weight_scale >= 0.0, "linear_weight_scale: must be >= 0");
  try {
    (void)gradlens::suite(suite);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("suite: ") + e.what());
  }
  require(train_learning_rate > 0.0, "training learning_rate: must be > 0");
  require(train_batch_size >= 1, "training batch_size: must be >= 1");
  require(hidden_units >= 1, "hidden_units: must be >= 1");
}

std::vector<std::size_t> ExperimentConfig::sweep_batch_sizes() const {
  return batch_sizes.empty() ? std::vector<std::size_t>{batch_size}
                             : batch_sizes;
}

std::vector<std::size_t> ExperimentConfig::sweep_neuron_counts() const {
  return neuron_counts.empty() ? std::vector<std::size_t>{neurons}
                               : neuron_counts;
}

}  // namespace gradlens::cli
