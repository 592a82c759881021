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

#include "gradlens/flsim.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "gradlens/error.h"
#include "gradlens/rng.h"

namespace gradlens {
namespace {

Matrix random_head(std::size_t classes, std::size_t neurons,
                   std::uint64_t seed) {
  Rng rng(seed);
  Matrix head(classes, neurons);
  const double sd = 1.0 / std::sqrt(static_cast<double>(neurons));
  for (double& v : head.data()) v = rng.normal(0.0, sd);
  return head;
}

std::vector<std::size_t> members_of(const UserOutcome& user,
                                    const Reconstruction& recon) {
  if (user.census) return contributing_samples(*user.census, recon.provenance);
  // Logistic rows correspond to classes.
  const std::size_t cls = std::get<NeuronProvenance>(recon.provenance).neuron;
  std::vector<std::size_t> out;
  const auto& labels = user.batch.expanded.labels;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j] == cls) out.push_back(j);
  }
  return out;
}

UserOutcome run_user(std::size_t user, const LabeledBatch& data,
                     const DispatchedModel& dispatched,
                     const AugmentationSuite& suite, const AttackParams& params,
                     double cap) {
  UserOutcome out;
  out.user = user;
  out.batch = build_augmented_batch(data, suite);
  out.report = local_update(data, dispatched.model, suite);

  const Shape& shape = data.shape();
  switch (dispatched.kind) {
    case AttackKind::kNone:
      break;
    case AttackKind::kImprint:
      out.reconstructions = imprint_reconstruct(out.report, *dispatched.imprint,
                                                shape, params.epsilon);
      break;
    case AttackKind::kTrap:
      out.reconstructions = trap_reconstruct(out.report, shape, params.epsilon);
      break;
    case AttackKind::kLinear:
      out.reconstructions =
          linear_model_attack(out.report, data.labels, shape, params.epsilon);
      break;
  }

  if (const auto* m = std::get_if<AttackModel>(&dispatched.model)) {
    out.census = census(*m, out.batch.expanded);
  }
  out.match = match_reconstructions(out.reconstructions, data.images, cap);
  out.residuals.reserve(out.reconstructions.size());
  for (const Reconstruction& r : out.reconstructions) {
    const std::vector<std::size_t> members = members_of(out, r);
    if (members.empty()) {
      out.residuals.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    std::vector<Image> basis;
    basis.reserve(members.size());
    for (std::size_t j : members) basis.push_back(out.batch.expanded.images[j]);
    out.residuals.push_back(lincomb_residual(r.image, basis));
  }
  return out;
}

}  // namespace

AttackKind parse_attack_kind(std::string_view name) {
  if (name == "none") return AttackKind::kNone;
  if (name == "imprint") return AttackKind::kImprint;
  if (name == "trap") return AttackKind::kTrap;
  if (name == "linear") return AttackKind::kLinear;
  throw ConfigError("unknown attack '" + std::string(name) +
                    "' (valid: none, imprint, trap, linear)");
}

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::kNone:
      return "none";
    case AttackKind::kImprint:
      return "imprint";
    case AttackKind::kTrap:
      return "trap";
    case AttackKind::kLinear:
      return "linear";
  }
  return "none";
}

DispatchedModel dispatch(const AttackModel& global, AttackKind kind,
                         const AttackParams& params,
                         const std::vector<Image>& calibration) {
  global.validate();
  DispatchedModel out;
  out.kind = kind;
  switch (kind) {
    case AttackKind::kNone:
      out.model = global;
      break;
    case AttackKind::kImprint: {
      ImprintLayer imprint = craft_imprint_layer(params.neurons, calibration);
      if (imprint.layer.input_dim() != global.input_dim()) {
        throw ConfigError("imprint: calibration images do not match the "
                          "model input dimension");
      }
      out.model = imprint_model(imprint, global.class_count());
      out.imprint = std::move(imprint.config);
      break;
    }
    case AttackKind::kTrap: {
      if (params.neurons == 0) throw ConfigError("trap: neurons must be >= 1");
      AttackModel model;
      model.malicious =
          craft_trap_layer(params.neurons, global.input_dim(), params.trap);
      if (global.neuron_count() == params.neurons) {
        model.head_weights = global.head_weights;
      } else {
        model.head_weights =
            random_head(global.class_count(), params.neurons,
                        derive_seed(params.trap.seed, 1));
      }
      model.head_bias = global.head_bias;
      out.model = std::move(model);
      break;
    }
    case AttackKind::kLinear:
      if (!(params.linear_weight_scale >= 0.0) ||
          !std::isfinite(params.linear_bias)) {
        throw ConfigError("linear: invalid bias or weight scale");
      }
      out.model = craft_logistic_model(global.class_count(), global.input_dim(),
                                       params.linear_seed, params.linear_bias,
                                       params.linear_weight_scale);
      break;
  }
  return out;
}

GradientReport local_update(const LabeledBatch& batch, const FlModel& model,
                            const AugmentationSuite& suite) {
  batch.validate();
  const std::size_t d = std::visit([](const auto& m) { return m.input_dim(); },
                                   model);
  if (batch.shape().size() != d) {
    throw ContractViolation("local_update: image shape " +
                            batch.shape().to_string() +
                            " does not match model input dim " +
                            std::to_string(d));
  }
  if (suite.transforms.empty()) {
    return std::visit([&](const auto& m) { return backward_summed(m, batch); },
                      model);
  }
  const AugmentedBatch augmented = build_augmented_batch(batch, suite);
  return std::visit(
      [&](const auto& m) { return backward_summed(m, augmented.expanded); },
      model);
}

FlModel aggregate(std::span<const GradientReport> reports,
                  const FlModel& model, double eta) {
  if (reports.empty()) throw ContractViolation("aggregate: no reports");
  const GradientReport mean = scale_report(
      sum_reports(reports), 1.0 / static_cast<double>(reports.size()));
  return std::visit(
      [&](const auto& m) -> FlModel { return sgd_step(m, mean, eta); }, model);
}

InMemoryDataSource::InMemoryDataSource(std::vector<LabeledBatch> users,
                                       std::vector<Image> calibration)
    : users_(std::move(users)), calibration_(std::move(calibration)) {}

LabeledBatch InMemoryDataSource::user_batch(std::size_t user,
                                            std::size_t batch_size) const {
  if (user >= users_.size()) {
    throw ContractViolation("user index " + std::to_string(user) +
                            " out of range");
  }
  const LabeledBatch& all = users_[user];
  if (all.size() < batch_size) {
    throw ConfigError("user " + std::to_string(user) + " holds " +
                      std::to_string(all.size()) + " samples, batch size is " +
                      std::to_string(batch_size));
  }
  LabeledBatch out;
  out.images.assign(all.images.begin(), all.images.begin() + batch_size);
  out.labels.assign(all.labels.begin(), all.labels.begin() + batch_size);
  return out;
}

void RoundConfig::validate() const {
  if (user_count < 1) throw ConfigError("user_count must be >= 1");
  if (selected < 1 || selected > user_count) {
    throw ConfigError("selected must lie in [1, user_count]");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be > 0");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (attack == AttackKind::kImprint && params.neurons < 2) {
    throw ConfigError("neurons must be >= 2 for the imprint attack");
  }
  if (params.classes < 2) throw ConfigError("classes must be >= 2");
  if (!(params.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (!(psnr_cap > 0.0)) throw ConfigError("psnr_cap must be > 0");
  (void)gradlens::suite(suite);
}

std::vector<std::size_t> select_users(std::size_t user_count,
                                      std::size_t selected,
                                      std::uint64_t seed) {
  if (selected < 1 || selected > user_count) {
    throw ConfigError("select_users: need 1 <= M <= N");
  }
  std::vector<std::size_t> ids(user_count);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(ids);
  ids.resize(selected);
  std::sort(ids.begin(), ids.end());
  return ids;
}

AttackModel initial_global_model(const RoundConfig& cfg,
                                 std::size_t input_dim) {
  Rng rng(derive_seed(cfg.seed, 0));
  return init_model(input_dim, cfg.params.neurons, cfg.params.classes, rng);
}

RoundOutcome run_round(const RoundConfig& cfg, const DataSource& source) {
  cfg.validate();
  const LabeledBatch probe = source.user_batch(0, cfg.batch_size);
  probe.validate();
  return run_round(cfg, source,
                   initial_global_model(cfg, probe.shape().size()));
}

RoundOutcome run_round(const RoundConfig& cfg, const DataSource& source,
                       const AttackModel& global) {
  cfg.validate();
  if (source.user_count() != cfg.user_count) {
    throw ConfigError("data source holds " +
                      std::to_string(source.user_count()) + " users, config " +
                      "expects " + std::to_string(cfg.user_count));
  }
  const AugmentationSuite defense = suite(cfg.suite);
  RoundOutcome out;
  out.dispatched =
      dispatch(global, cfg.attack, cfg.params, source.calibration());

  const std::vector<std::size_t> chosen =
      select_users(cfg.user_count, cfg.selected, derive_seed(cfg.seed, 1));
  std::vector<LabeledBatch> batches;
  batches.reserve(chosen.size());
  for (std::size_t u : chosen) {
    batches.push_back(source.user_batch(u, cfg.batch_size));
  }

  std::vector<std::future<UserOutcome>> pending;
  pending.reserve(chosen.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    pending.push_back(std::async(std::launch::async, [&, i] {
      return run_user(chosen[i], batches[i], out.dispatched, defense,
                      cfg.params, cfg.psnr_cap);
    }));
  }
  out.users.reserve(chosen.size());
  for (auto& f : pending) out.users.push_back(f.get());

  std::vector<GradientReport> reports;
  reports.reserve(out.users.size());
  for (const UserOutcome& u : out.users) reports.push_back(u.report);
  out.updated = aggregate(reports, out.dispatched.model, cfg.learning_rate);
  return out;
}

}  // namespace gradlens
