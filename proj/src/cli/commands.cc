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

#include "gradlens/cli/commands.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <sstream>
#include <system_error>
#include <thread>

#include "gradlens/cli/svg.h"
#include "gradlens/cli/synthetic.h"
#include "gradlens/error.h"
#include "gradlens/image_io.h"

namespace gradlens::cli {
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

template <typename Fill>
void write_atomically(const fs::path& target, Fill&& fill) {
  fs::path stage = target;
  stage += ".partial";
  fs::remove_all(stage);
  fs::create_directories(stage);
  try {
    fill(stage);
  } catch (...) {
    std::error_code ignored;
    fs::remove_all(stage, ignored);
    throw;
  }
  fs::remove_all(target);
  fs::rename(stage, target);
}

bool is_netpbm(const fs::path& p) {
  const std::string ext = p.extension().string();
  return ext == ".ppm" || ext == ".pgm";
}

std::vector<fs::path> netpbm_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw ConfigError("data directory " + dir.string() + " does not exist");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_netpbm(entry.path())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::size_t label_of(const fs::path& file, std::size_t classes) {
  const std::string name = file.filename().string();
  const std::string prefix = name.substr(0, name.find('_'));
  std::size_t label = 0;
  const auto [ptr, ec] =
      std::from_chars(prefix.data(), prefix.data() + prefix.size(), label);
  if (ec != std::errc() || ptr != prefix.data() + prefix.size() ||
      prefix.empty() || label >= classes) {
    throw ConfigError("file " + name +
                      " is not named <label>_<name> with label < classes");
  }
  return label;
}

Image load_checked(const fs::path& file, const Shape& shape) {
  Image image = read_image(file);
  if (image.shape() != shape) {
    throw ConfigError("image " + file.string() + " has shape " +
                      image.shape().to_string() + ", config expects " +
                      shape.to_string());
  }
  return image;
}

ResultRow make_row(const ExperimentConfig& cfg, const UserOutcome& user,
                   std::size_t batch_size, std::size_t neurons,
                   std::uint64_t seed, std::size_t trial) {
  ResultRow row;
  row.attack = std::string(to_string(cfg.attack));
  row.suite = cfg.suite;
  row.batch_size = batch_size;
  row.neurons = neurons;
  row.seed = seed;
  row.trial = trial;
  row.user = user.user;
  row.recovered = user.match.recovered(kRecoveryThresholdDb);
  row.summary = user.match.summary;
  row.psnrs = user.match.psnrs();
  double total = 0.0;
  std::size_t count = 0;
  for (double r : user.residuals) {
    if (std::isnan(r)) continue;
    total += r;
    ++count;
  }
  if (count > 0) row.mean_residual = total / static_cast<double>(count);
  return row;
}

std::string image_name(std::size_t user, const char* kind, std::size_t t,
                       const Shape& shape) {
  return "user" + std::to_string(user) + "_" + kind + std::to_string(t) +
         netpbm_extension(shape);
}

std::string report_text(const ExperimentConfig& cfg, const TrialResult& trial) {
  std::ostringstream out;
  out << "gradlens attack report\n"
      << "attack: " << to_string(cfg.attack) << "\n"
      << "defense: " << cfg.suite << "\n"
      << "batch size: " << cfg.batch_size << "\n"
      << "neurons: " << cfg.neurons << "\n"
      << "seed: " << cfg.seed << "\n"
      << "users: " << cfg.selected << " of " << cfg.users << "\n"
      << "recovery threshold: " << kRecoveryThresholdDb << " dB\n\n";
  for (std::size_t i = 0; i < trial.rows.size(); ++i) {
    const ResultRow& row = trial.rows[i];
    const UserOutcome& user = trial.outcome.users[i];
    out << "user " << row.user << ": " << user.reconstructions.size()
        << " reconstructions, " << row.recovered << " of " << row.psnrs.size()
        << " originals recovered\n"
        << "  psnr min " << format_real(row.summary.min) << ", median "
        << format_real(row.summary.median) << ", mean "
        << format_real(row.summary.mean) << ", max "
        << format_real(row.summary.max) << "\n";
    if (row.mean_residual) {
      out << "  mean combination residual " << format_real(*row.mean_residual)
          << "\n";
    }
  }
  return out.str();
}

template <typename T, typename Task>
std::vector<T> run_parallel(std::size_t count, Task task) {
  const std::size_t width =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  std::vector<T> out;
  out.reserve(count);
  for (std::size_t start = 0; start < count; start += width) {
    std::vector<std::future<T>> wave;
    for (std::size_t i = start; i < std::min(count, start + width); ++i) {
      wave.push_back(std::async(std::launch::async, task, i));
    }
    for (auto& f : wave) out.push_back(f.get());
  }
  return out;
}

}  // namespace

TrialData make_trial_data(const ExperimentConfig& cfg, std::size_t batch_size,
                          std::uint64_t seed) {
  TrialData data;
  if (cfg.data == DataKind::kSynthetic) {
    for (std::size_t u = 0; u < cfg.users; ++u) {
      data.users.push_back(gen_synthetic(derive_seed(seed, 100 + u),
                                         batch_size, cfg.shape, cfg.classes));
    }
    data.calibration = gen_synthetic(derive_seed(seed, 99),
                                     cfg.calibration_size, cfg.shape,
                                     cfg.classes)
                           .images;
    return data;
  }

  const std::vector<fs::path> files = netpbm_files(cfg.data_directory);
  const std::size_t needed = cfg.users * batch_size;
  if (files.size() < needed) {
    throw ConfigError("data directory holds " + std::to_string(files.size()) +
                      " images, " + std::to_string(needed) + " are needed");
  }
  for (std::size_t u = 0; u < cfg.users; ++u) {
    LabeledBatch batch;
    for (std::size_t j = 0; j < batch_size; ++j) {
      const fs::path& f = files[u * batch_size + j];
      batch.images.push_back(load_checked(f, cfg.shape));
      batch.labels.push_back(label_of(f, cfg.classes));
    }
    data.users.push_back(std::move(batch));
  }
  if (!cfg.calibration_directory.empty()) {
    for (const fs::path& f : netpbm_files(cfg.calibration_directory)) {
      data.calibration.push_back(load_checked(f, cfg.shape));
    }
  } else {
    for (std::size_t j = needed; j < files.size(); ++j) {
      data.calibration.push_back(load_checked(files[j], cfg.shape));
    }
  }
  if (data.calibration.empty() && cfg.attack == AttackKind::kImprint) {
    throw ConfigError("no calibration images available for the imprint attack");
  }
  return data;
}

RoundConfig make_round_config(const ExperimentConfig& cfg,
                              std::size_t batch_size, std::size_t neurons,
                              std::uint64_t seed) {
  RoundConfig round;
  round.user_count = cfg.users;
  round.selected = cfg.selected;
  round.learning_rate = cfg.learning_rate;
  round.batch_size = batch_size;
  round.suite = cfg.suite;
  round.attack = cfg.attack;
  round.params.neurons = neurons;
  round.params.classes = cfg.classes;
  round.params.trap = TrapConfig{derive_seed(seed, 3), cfg.trap_scale,
                                 cfg.trap_negative_fraction, cfg.trap_margin};
  round.params.linear_bias = cfg.linear_bias;
  round.params.linear_weight_scale = cfg.linear_weight_scale;
  round.params.linear_seed = derive_seed(seed, 4);
  round.params.epsilon = cfg.epsilon;
  round.psnr_cap = cfg.psnr_cap;
  round.seed = seed;
  return round;
}

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t batch_size,
                      std::size_t neurons, std::size_t trial,
                      std::uint64_t seed) {
  TrialData data = make_trial_data(cfg, batch_size, seed);
  InMemoryDataSource source(std::move(data.users), std::move(data.calibration));
  TrialResult out;
  out.outcome =
      run_round(make_round_config(cfg, batch_size, neurons, seed), source);
  for (const UserOutcome& user : out.outcome.users) {
    out.rows.push_back(make_row(cfg, user, batch_size, neurons, seed, trial));
  }
  return out;
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, std::size_t trial) {
  return derive_seed(cfg.seed, 1000 + trial);
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  SweepResult out;
  out.batch_sizes = cfg.sweep_batch_sizes();
  out.neuron_counts = cfg.sweep_neuron_counts();
  struct Cell {
    std::size_t b, n, trial;
  };
  std::vector<Cell> cells;
  for (std::size_t b = 0; b < out.batch_sizes.size(); ++b) {
    for (std::size_t n = 0; n < out.neuron_counts.size(); ++n) {
      for (std::size_t t = 0; t < cfg.trials; ++t) cells.push_back({b, n, t});
    }
  }
  const auto per_cell = run_parallel<std::vector<ResultRow>>(
      cells.size(), [&](std::size_t i) {
        const Cell& c = cells[i];
        return run_trial(cfg, out.batch_sizes[c.b], out.neuron_counts[c.n],
                         c.trial, trial_seed(cfg, c.trial))
            .rows;
      });

  out.mean_psnr.assign(out.batch_sizes.size(),
                       std::vector<double>(out.neuron_counts.size(), 0.0));
  std::vector<std::vector<std::size_t>> counts(
      out.batch_sizes.size(), std::vector<std::size_t>(out.neuron_counts.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (const ResultRow& row : per_cell[i]) {
      for (double p : row.psnrs) {
        out.mean_psnr[cells[i].b][cells[i].n] += p;
        ++counts[cells[i].b][cells[i].n];
      }
      out.rows.push_back(row);
    }
  }
  for (std::size_t b = 0; b < out.batch_sizes.size(); ++b) {
    for (std::size_t n = 0; n < out.neuron_counts.size(); ++n) {
      if (counts[b][n] > 0) {
        out.mean_psnr[b][n] /= static_cast<double>(counts[b][n]);
      }
    }
  }
  std::sort(out.rows.begin(), out.rows.end(),
            [](const ResultRow& a, const ResultRow& b) {
              return a.key() < b.key();
            });
  return out;
}

std::string write_matrix(const SweepResult& sweep) {
  std::string out(kMatrixSchema);
  out += "\nbatch_size";
  for (std::size_t n : sweep.neuron_counts) out += ",n=" + std::to_string(n);
  out += '\n';
  for (std::size_t b = 0; b < sweep.batch_sizes.size(); ++b) {
    out += std::to_string(sweep.batch_sizes[b]);
    for (double v : sweep.mean_psnr[b]) out += ',' + format_real(v);
    out += '\n';
  }
  return out;
}

std::vector<UtilityRow> run_utility(const ExperimentConfig& cfg) {
  const LabeledBatch train = gen_synthetic(derive_seed(cfg.seed, 200),
                                           cfg.train_size, cfg.shape,
                                           cfg.classes);
  const LabeledBatch test = gen_synthetic(derive_seed(cfg.seed, 201),
                                          cfg.test_size, cfg.shape,
                                          cfg.classes);
  TrainOptions options;
  options.epochs = cfg.train_epochs;
  options.learning_rate = cfg.train_learning_rate;
  options.batch_size = cfg.train_batch_size;
  options.hidden_units = cfg.hidden_units;
  options.class_count = cfg.classes;
  options.seed = derive_seed(cfg.seed, 202);

  const auto names = suite_names();
  const auto accuracies = run_parallel<double>(names.size(), [&](std::size_t i) {
    return 100.0 * train_eval(train, test, options, suite(names[i]));
  });
  std::vector<UtilityRow> rows;
  const double baseline = accuracies.front();
  for (std::size_t i = 0; i < names.size(); ++i) {
    rows.push_back({std::string(names[i]), accuracies[i],
                    accuracies[i] - baseline});
  }
  return rows;
}

int cmd_attack(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const TrialResult trial =
      run_trial(cfg, cfg.batch_size, cfg.neurons, 0, cfg.seed);
  write_atomically(cfg.output, [&](const fs::path& dir) {
    write_text(dir / "results.csv", write_results(trial.rows));
    write_text(dir / "report.txt", report_text(cfg, trial));
    fs::create_directories(dir / "images");
    for (const UserOutcome& user : trial.outcome.users) {
      const LabeledBatch& base = user.batch.base;
      for (std::size_t t = 0; t < base.size(); ++t) {
        write_image(base.images[t],
                    dir / "images" / image_name(user.user, "orig", t, base.shape()));
        const auto& match = user.match.per_original[t];
        if (match.reconstruction) {
          write_image(user.reconstructions[*match.reconstruction].image.clamped(),
                      dir / "images" / image_name(user.user, "recon", t, base.shape()));
        }
      }
    }
  });
  for (const ResultRow& row : trial.rows) {
    log << "user " << row.user << ": recovered " << row.recovered << "/"
        << row.psnrs.size() << ", median PSNR "
        << format_real(row.summary.median) << " dB\n";
  }
  log << "wrote " << cfg.output.string() << "\n";
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const SweepResult sweep = run_sweep(cfg);
  write_atomically(cfg.output, [&](const fs::path& dir) {
    write_text(dir / "sweep.csv", write_results(sweep.rows));
    write_text(dir / "psnr_matrix.csv", write_matrix(sweep));
  });
  log << "wrote " << sweep.rows.size() << " rows to " << cfg.output.string()
      << "\n";
  return 0;
}

int cmd_utility(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const std::vector<UtilityRow> rows = run_utility(cfg);
  write_atomically(cfg.output, [&](const fs::path& dir) {
    write_text(dir / "utility.csv", write_utility(rows));
  });
  for (const UtilityRow& r : rows) {
    log << r.suite << ": " << format_real(r.accuracy) << "%\n";
  }
  return 0;
}

int cmd_gallery(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path images = cfg.output / "images";
  if (!fs::is_directory(images)) {
    throw ConfigError("no attack output at " + images.string());
  }
  // user -> index -> (original, reconstruction)
  std::map<std::pair<std::size_t, std::size_t>,
           std::pair<fs::path, fs::path>> found;
  for (const auto& entry : fs::directory_iterator(images)) {
    const std::string name = entry.path().stem().string();
    std::size_t user = 0;
    std::size_t index = 0;
    char kind[8] = {};
    if (std::sscanf(name.c_str(), "user%zu_%5[a-z]%zu", &user, kind, &index) != 3) {
      continue;
    }
    auto& slot = found[{user, index}];
    if (std::string(kind) == "orig") slot.first = entry.path();
    if (std::string(kind) == "recon") slot.second = entry.path();
  }
  std::vector<SheetEntry> entries;
  for (const auto& [key, paths] : found) {
    if (paths.first.empty()) continue;
    SheetEntry e;
    e.caption = "user " + std::to_string(key.first) + " image " +
                std::to_string(key.second);
    e.original = read_image(paths.first);
    if (!paths.second.empty()) e.reconstruction = read_image(paths.second);
    entries.push_back(std::move(e));
  }
  if (entries.empty()) {
    throw ConfigError("no original images found in " + images.string());
  }
  const bool any = std::any_of(entries.begin(), entries.end(),
                               [](const SheetEntry& e) {
                                 return e.reconstruction.has_value();
                               });
  std::size_t pairs = 0;
  write_atomically(cfg.output / "gallery", [&](const fs::path& dir) {
    for (const auto& [key, paths] : found) {
      if (paths.first.empty() || paths.second.empty()) continue;
      const Image left = read_image(paths.first);
      const Image right = read_image(paths.second);
      const Shape& s = left.shape();
      const Shape joined{2 * s.width + 1, s.height, s.channels};
      std::vector<double> pixels(joined.size(), 1.0);
      for (std::size_t r = 0; r < s.height; ++r) {
        for (std::size_t c = 0; c < s.width; ++c) {
          for (std::size_t ch = 0; ch < s.channels; ++ch) {
            pixels[joined.index(r, c, ch)] = left.at(r, c, ch);
            pixels[joined.index(r, c + s.width + 1, ch)] = right.at(r, c, ch);
          }
        }
      }
      write_image(Image(joined, std::move(pixels)),
                  dir / ("pair_user" + std::to_string(key.first) + "_" +
                         std::to_string(key.second) + netpbm_extension(s)));
      ++pairs;
    }
    write_text(dir / "contact_sheet.svg",
               contact_sheet(entries, any ? std::string()
                                          : "no reconstructions were produced"));
  });
  log << "wrote " << pairs << " pairs and contact_sheet.svg to "
      << (cfg.output / "gallery").string() << "\n";
  return 0;
}

int run_command(std::string_view command, const fs::path& config_path,
                const Overrides& overrides, std::ostream& out,
                std::ostream& err) {
  try {
    const ExperimentConfig cfg = load_config(config_path, overrides);
    if (command == "attack") return cmd_attack(cfg, out);
    if (command == "sweep") return cmd_sweep(cfg, out);
    if (command == "utility") return cmd_utility(cfg, out);
    if (command == "gallery") return cmd_gallery(cfg, out);
    err << "error: unknown command '" << command << "'\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gradlens::cli
