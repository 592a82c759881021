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

// Exact forward/backward for the attacked model.
//
// AttackModel is   x -> z = W x + b -> h = relu(z) -> logits = V h + c
// trained with softmax cross-entropy. LogisticModel is the single-layer
// k-output model x -> z = W x + b with an independent sigmoid
// (one-vs-rest logistic) loss per output.
//
// Conventions shared by everything downstream:
//   * A neuron is *active* for x iff its pre-activation is strictly > 0;
//     the ReLU derivative at exactly 0 is 0.
//   * Batch losses are sums over samples, never means. Averaging happens
//     only in sgd_step callers (FedSGD aggregation, the training loop).
//   * Reductions run in fixed left-to-right order; the summed report is
//     accumulated sample by sample in batch order.

#ifndef GRADLENS_GRADCORE_H_
#define GRADLENS_GRADCORE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gradlens/defense.h"
#include "gradlens/linalg.h"
#include "gradlens/rng.h"

namespace gradlens {

// First dense layer. When crafted by an adversary this is the malicious
// layer placed right after the input.
struct MaliciousLayer {
  Matrix weights;  // n x d
  Vector bias;     // n

  std::size_t neuron_count() const { return weights.rows(); }
  std::size_t input_dim() const { return weights.cols(); }

  friend bool operator==(const MaliciousLayer&, const MaliciousLayer&) = default;
};

struct AttackModel {
  MaliciousLayer malicious;
  Matrix head_weights;  // k x n
  Vector head_bias;     // k

  std::size_t input_dim() const { return malicious.input_dim(); }
  std::size_t neuron_count() const { return malicious.neuron_count(); }
  std::size_t class_count() const { return head_weights.rows(); }

  // Throws ContractViolation on inconsistent dimensions, NumericError on
  // non-finite parameters.
  void validate() const;

  friend bool operator==(const AttackModel&, const AttackModel&) = default;
};

struct LogisticModel {
  Matrix weights;  // k x d
  Vector bias;     // k

  std::size_t input_dim() const { return weights.cols(); }
  std::size_t class_count() const { return weights.rows(); }
  void validate() const;

  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

// Gradients of a summed batch loss. For a LogisticModel the first-layer
// fields hold the (only) layer and the head fields are empty.
struct GradientReport {
  Matrix weight_grad;       // n x d
  Vector bias_grad;         // n
  Matrix head_weight_grad;  // k x n
  Vector head_bias_grad;    // k
  std::size_t batch_size = 0;
  double loss = 0.0;  // Summed loss of the batch.

  friend bool operator==(const GradientReport&, const GradientReport&) = default;
};

// One entry per batch element, in batch order.
using PerSampleGradients = std::vector<GradientReport>;

struct ForwardResult {
  Vector preacts;  // n
  Vector logits;   // k
};

ForwardResult forward(const AttackModel& model, std::span<const double> x);
Vector forward(const LogisticModel& model, std::span<const double> x);

// Softmax cross-entropy gradients of a single sample. Throws
// ContractViolation on bad dimensions or label, NumericError naming the
// offending tensor if anything non-finite appears.
GradientReport backward_per_sample(const AttackModel& model,
                                   std::span<const double> x,
                                   std::size_t label);
GradientReport backward_per_sample(const LogisticModel& model,
                                   std::span<const double> x,
                                   std::size_t label);

PerSampleGradients per_sample_gradients(const AttackModel& model,
                                        const LabeledBatch& batch);
PerSampleGradients per_sample_gradients(const LogisticModel& model,
                                        const LabeledBatch& batch);

GradientReport backward_summed(const AttackModel& model,
                               const LabeledBatch& batch);
GradientReport backward_summed(const LogisticModel& model,
                               const LabeledBatch& batch);

// Summed loss without gradients.
double batch_loss(const AttackModel& model, const LabeledBatch& batch);

// Element-wise sum of reports with identical dimensions.
GradientReport sum_reports(std::span<const GradientReport> reports);
// Every gradient entry multiplied by `factor`; batch_size is kept.
GradientReport scale_report(GradientReport report, double factor);

// p <- p - eta * g for every parameter. `report` is expected to be already
// averaged by the caller. eta must be >= 0 (eta = 0 is a no-op).
AttackModel sgd_step(AttackModel model, const GradientReport& report,
                     double eta);
LogisticModel sgd_step(LogisticModel model, const GradientReport& report,
                       double eta);

// He-style initialization: first layer N(0, 2/d), head N(0, 1/n), zero
// biases.
AttackModel init_model(std::size_t input_dim, std::size_t neurons,
                       std::size_t classes, Rng& rng);

std::size_t predict(const AttackModel& model, std::span<const double> x);
double accuracy(const AttackModel& model, const LabeledBatch& batch);

struct TrainOptions {
  std::size_t epochs = 20;
  double learning_rate = 0.05;
  std::size_t batch_size = 8;
  std::size_t hidden_units = 32;
  std::size_t class_count = 4;
  std::uint64_t seed = 0;
};

// Mini-batch SGD from a seeded initial model; returns test accuracy.
// With a non-empty suite every mini-batch is expanded to D' before the
// gradient is taken, and the step uses the gradient averaged over |D'|.
// Throws ContractViolation on empty sets or labels >= class_count.
double train_eval(const LabeledBatch& train, const LabeledBatch& test,
                  const TrainOptions& options, const AugmentationSuite& suite);

}  // namespace gradlens

#endif  // GRADLENS_GRADCORE_H_
