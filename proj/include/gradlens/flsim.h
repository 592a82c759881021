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

// One FedSGD round against a dishonest server.

#ifndef GRADLENS_FLSIM_H_
#define GRADLENS_FLSIM_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gradlens/analysis.h"
#include "gradlens/attacks.h"
#include "gradlens/defense.h"
#include "gradlens/gradcore.h"

namespace gradlens {

enum class AttackKind { kNone, kImprint, kTrap, kLinear };

// Throws ConfigError for anything but none, imprint, trap, linear.
AttackKind parse_attack_kind(std::string_view name);
std::string_view to_string(AttackKind kind);

struct AttackParams {
  std::size_t neurons = 64;   // malicious-layer width (imprint, trap)
  std::size_t classes = 4;
  TrapConfig trap;
  double linear_bias = -40.0;
  double linear_weight_scale = 0.01;
  std::uint64_t linear_seed = 0;
  double epsilon = kActivationEpsilon;
};

using FlModel = std::variant<AttackModel, LogisticModel>;

struct DispatchedModel {
  FlModel model;
  AttackKind kind = AttackKind::kNone;
  std::optional<ImprintConfig> imprint;  // Server-side secret, imprint only.
};

// none: the global model unchanged. imprint: imprint layer plus tied head.
// trap: trap layer; the global head is kept when its width matches,
// otherwise a fresh head is drawn from the trap seed. linear: a crafted
// LogisticModel. Throws ConfigError on invalid parameters.
DispatchedModel dispatch(const AttackModel& global, AttackKind kind,
                         const AttackParams& params,
                         const std::vector<Image>& calibration);

// Summed gradient over D' (D itself when the suite is empty).
GradientReport local_update(const LabeledBatch& batch, const FlModel& model,
                            const AugmentationSuite& suite);

// Element-wise mean of the reports followed by one sgd_step.
FlModel aggregate(std::span<const GradientReport> reports,
                  const FlModel& model, double eta);

class DataSource {
 public:
  virtual ~DataSource() = default;
  virtual std::size_t user_count() const = 0;
  // The first `batch_size` samples held by `user`. Throws ConfigError if
  // the user holds fewer.
  virtual LabeledBatch user_batch(std::size_t user,
                                  std::size_t batch_size) const = 0;
  // Public data the server may use to calibrate an imprint layer.
  virtual const std::vector<Image>& calibration() const = 0;
};

class InMemoryDataSource : public DataSource {
 public:
  InMemoryDataSource(std::vector<LabeledBatch> users,
                     std::vector<Image> calibration);

  std::size_t user_count() const override { return users_.size(); }
  LabeledBatch user_batch(std::size_t user,
                          std::size_t batch_size) const override;
  const std::vector<Image>& calibration() const override {
    return calibration_;
  }

 private:
  std::vector<LabeledBatch> users_;
  std::vector<Image> calibration_;
};

struct RoundConfig {
  std::size_t user_count = 1;   // N
  std::size_t selected = 1;     // M
  double learning_rate = 0.05;  // eta
  std::size_t batch_size = 8;   // B
  std::string suite = "none";
  AttackKind attack = AttackKind::kNone;
  AttackParams params;
  double psnr_cap = kPsnrCap;
  std::uint64_t seed = 0;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// M distinct indices from [0, N), seeded uniform without replacement,
// returned in ascending order.
std::vector<std::size_t> select_users(std::size_t user_count,
                                      std::size_t selected,
                                      std::uint64_t seed);

struct UserOutcome {
  std::size_t user = 0;
  AugmentedBatch batch;  // client side; used only for grading
  GradientReport report;
  ReconstructionSet reconstructions;
  MatchReport match;
  // One per reconstruction: lincomb_residual against the expanded-batch
  // samples that produced it; NaN when no member could be identified.
  std::vector<double> residuals;
  std::optional<ActivationCensus> census;  // AttackModel rounds only
};

struct RoundOutcome {
  DispatchedModel dispatched;
  FlModel updated;
  std::vector<UserOutcome> users;  // in select_users order
};

// Global model for a round: init_model(d, params.neurons, params.classes)
// seeded from derive_seed(cfg.seed, 0).
AttackModel initial_global_model(const RoundConfig& cfg, std::size_t input_dim);

RoundOutcome run_round(const RoundConfig& cfg, const DataSource& source);
RoundOutcome run_round(const RoundConfig& cfg, const DataSource& source,
                       const AttackModel& global);

}  // namespace gradlens

#endif  // GRADLENS_FLSIM_H_
