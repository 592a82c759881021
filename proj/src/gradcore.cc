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

#include "gradlens/gradcore.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gradlens/error.h"

namespace gradlens {
namespace {

std::string dims(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void check_input(std::size_t expected, std::span<const double> x) {
  if (x.size() != expected) {
    throw ContractViolation("input length " + std::to_string(x.size()) +
                            " != model input dim " + std::to_string(expected));
  }
}

void check_label(std::size_t classes, std::size_t label) {
  if (label >= classes) {
    throw ContractViolation("label " + std::to_string(label) +
                            " out of range for " + std::to_string(classes) +
                            " classes");
  }
}

void check_batch(const LabeledBatch& batch, std::size_t input_dim) {
  batch.validate();
  if (batch.shape().size() != input_dim) {
    throw ContractViolation("batch images flatten to " +
                            std::to_string(batch.shape().size()) +
                            " values, model expects " +
                            std::to_string(input_dim));
  }
}

// Everything a single sample contributes to the gradient.
struct SampleTrace {
  Vector hidden;      // relu(z)
  Vector logit_grad;  // dL/dlogits
  Vector preact_grad; // dL/dz, zero where z <= 0
  double loss = 0.0;
};

SampleTrace trace_sample(const AttackModel& model, std::span<const double> x,
                         std::size_t label) {
  check_input(model.input_dim(), x);
  check_label(model.class_count(), label);
  ForwardResult fwd = forward(model, x);
  const std::size_t n = model.neuron_count();
  const std::size_t k = model.class_count();

  SampleTrace t;
  t.hidden = Vector(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.hidden[i] = fwd.preacts[i] > 0.0 ? fwd.preacts[i] : 0.0;
  }

  const double top = *std::max_element(fwd.logits.begin(), fwd.logits.end());
  Vector probs(k);
  double total = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    probs[r] = std::exp(fwd.logits[r] - top);
    total += probs[r];
  }
  for (std::size_t r = 0; r < k; ++r) probs[r] /= total;
  require_finite(probs.span(), "softmax");
  t.loss = std::log(total) + top - fwd.logits[label];

  t.logit_grad = probs;
  t.logit_grad[label] -= 1.0;

  const Vector hidden_grad =
      matvec_transposed(model.head_weights, t.logit_grad.span());
  t.preact_grad = Vector(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.preact_grad[i] = fwd.preacts[i] > 0.0 ? hidden_grad[i] : 0.0;
  }
  require_finite(t.preact_grad.span(), "preact_grad");
  return t;
}

GradientReport zero_report(std::size_t n, std::size_t d, std::size_t k) {
  GradientReport r;
  r.weight_grad = Matrix(n, d);
  r.bias_grad = Vector(n);
  r.head_weight_grad = Matrix(k, n);
  r.head_bias_grad = Vector(k);
  return r;
}

// Running sums kept in extended precision. Each per-sample term is the
// double product g * x, so a single-sample report is bit-identical to the
// plain product and only the additions gain precision.
class WideSums {
 public:
  WideSums(std::size_t n, std::size_t d, std::size_t k)
      : n_(n), d_(d), k_(k), weight_(n * d), bias_(n), head_weight_(k * n),
        head_bias_(k) {}

  void add_row(std::size_t i, double g, std::span<const double> x) {
    long double* row = weight_.data() + i * d_;
    for (std::size_t j = 0; j < d_; ++j) row[j] += g * x[j];
    bias_[i] += g;
  }
  void add_head(std::size_t r, double g, std::span<const double> hidden) {
    long double* row = head_weight_.data() + r * n_;
    for (std::size_t i = 0; i < n_; ++i) row[i] += g * hidden[i];
    head_bias_[r] += g;
  }
  void add_loss(double loss) {
    loss_ += loss;
    ++batch_size_;
  }

  GradientReport finish() const {
    GradientReport r = zero_report(n_, d_, k_);
    std::copy(weight_.begin(), weight_.end(), r.weight_grad.data().begin());
    std::copy(bias_.begin(), bias_.end(), r.bias_grad.span().begin());
    std::copy(head_weight_.begin(), head_weight_.end(),
              r.head_weight_grad.data().begin());
    std::copy(head_bias_.begin(), head_bias_.end(), r.head_bias_grad.span().begin());
    r.loss = static_cast<double>(loss_);
    r.batch_size = batch_size_;
    return r;
  }

 private:
  std::size_t n_, d_, k_;
  std::vector<long double> weight_, bias_, head_weight_, head_bias_;
  long double loss_ = 0.0L;
  std::size_t batch_size_ = 0;
};

void accumulate(WideSums& acc, const SampleTrace& t,
                std::span<const double> x) {
  const std::size_t n = t.preact_grad.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double g = t.preact_grad[i];
    if (g == 0.0) continue;
    acc.add_row(i, g, x);
  }
  for (std::size_t r = 0; r < t.logit_grad.size(); ++r) {
    acc.add_head(r, t.logit_grad[r], t.hidden.span());
  }
  acc.add_loss(t.loss);
}

struct LogisticTrace {
  Vector output_grad;  // sigmoid(z) - y
  double loss = 0.0;
};

LogisticTrace trace_logistic(const LogisticModel& model,
                             std::span<const double> x, std::size_t label) {
  check_input(model.input_dim(), x);
  check_label(model.class_count(), label);
  const Vector z = forward(model, x);
  LogisticTrace t;
  t.output_grad = Vector(z.size());
  for (std::size_t r = 0; r < z.size(); ++r) {
    const double target = r == label ? 1.0 : 0.0;
    const double e = std::exp(-std::abs(z[r]));
    const double sigmoid = z[r] >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
    t.output_grad[r] = sigmoid - target;
    // softplus(z) - y z, written to stay finite for large |z|.
    t.loss += std::max(z[r], 0.0) + std::log1p(e) - target * z[r];
  }
  require_finite(t.output_grad.span(), "logistic_grad");
  return t;
}

void accumulate(WideSums& acc, const LogisticTrace& t,
                std::span<const double> x) {
  for (std::size_t r = 0; r < t.output_grad.size(); ++r) {
    const double g = t.output_grad[r];
    if (g == 0.0) continue;
    acc.add_row(r, g, x);
  }
  acc.add_loss(t.loss);
}

void check_report_dims(const GradientReport& a, const GradientReport& b) {
  if (a.weight_grad.rows() != b.weight_grad.rows() ||
      a.weight_grad.cols() != b.weight_grad.cols() ||
      a.bias_grad.size() != b.bias_grad.size() ||
      a.head_weight_grad.rows() != b.head_weight_grad.rows() ||
      a.head_weight_grad.cols() != b.head_weight_grad.cols() ||
      a.head_bias_grad.size() != b.head_bias_grad.size()) {
    throw ContractViolation("gradient reports have different dimensions");
  }
}

void check_eta(double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw ContractViolation("learning rate must be finite and >= 0");
  }
}

void step(std::span<double> params, std::span<const double> grads, double eta,
          const char* what) {
  if (params.size() != grads.size()) {
    throw ContractViolation(std::string("sgd_step: ") + what +
                            " dimension mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= eta * grads[i];
}

}  // namespace

void AttackModel::validate() const {
  const std::size_t n = neuron_count();
  if (n == 0 || input_dim() == 0 || class_count() == 0) {
    throw ContractViolation("AttackModel: empty layer");
  }
  if (malicious.bias.size() != n) {
    throw ContractViolation("AttackModel: bias length " +
                            std::to_string(malicious.bias.size()) + " != " +
                            std::to_string(n));
  }
  if (head_weights.cols() != n || head_bias.size() != class_count()) {
    throw ContractViolation("AttackModel: head is " +
                            dims(head_weights.rows(), head_weights.cols()) +
                            " with bias " + std::to_string(head_bias.size()) +
                            ", first layer has " + std::to_string(n) +
                            " neurons");
  }
  require_finite(malicious.weights.data(), "malicious.weights");
  require_finite(malicious.bias.span(), "malicious.bias");
  require_finite(head_weights.data(), "head_weights");
  require_finite(head_bias.span(), "head_bias");
}

void LogisticModel::validate() const {
  if (class_count() == 0 || input_dim() == 0 ||
      bias.size() != class_count()) {
    throw ContractViolation("LogisticModel: inconsistent dimensions " +
                            dims(weights.rows(), weights.cols()) + " / " +
                            std::to_string(bias.size()));
  }
  require_finite(weights.data(), "logistic.weights");
  require_finite(bias.span(), "logistic.bias");
}

ForwardResult forward(const AttackModel& model, std::span<const double> x) {
  check_input(model.input_dim(), x);
  ForwardResult out;
  out.preacts = matvec(model.malicious.weights, x);
  for (std::size_t i = 0; i < out.preacts.size(); ++i) {
    out.preacts[i] += model.malicious.bias[i];
  }
  require_finite(out.preacts.span(), "preacts");
  Vector hidden(out.preacts.size());
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    hidden[i] = out.preacts[i] > 0.0 ? out.preacts[i] : 0.0;
  }
  out.logits = matvec(model.head_weights, hidden.span());
  for (std::size_t r = 0; r < out.logits.size(); ++r) {
    out.logits[r] += model.head_bias[r];
  }
  require_finite(out.logits.span(), "logits");
  return out;
}

Vector forward(const LogisticModel& model, std::span<const double> x) {
  check_input(model.input_dim(), x);
  Vector z = matvec(model.weights, x);
  for (std::size_t r = 0; r < z.size(); ++r) z[r] += model.bias[r];
  require_finite(z.span(), "logistic.logits");
  return z;
}

GradientReport backward_per_sample(const AttackModel& model,
                                   std::span<const double> x,
                                   std::size_t label) {
  const SampleTrace t = trace_sample(model, x, label);
  WideSums acc(model.neuron_count(), model.input_dim(), model.class_count());
  accumulate(acc, t, x);
  return acc.finish();
}

GradientReport backward_per_sample(const LogisticModel& model,
                                   std::span<const double> x,
                                   std::size_t label) {
  const LogisticTrace t = trace_logistic(model, x, label);
  WideSums acc(model.class_count(), model.input_dim(), 0);
  accumulate(acc, t, x);
  return acc.finish();
}

PerSampleGradients per_sample_gradients(const AttackModel& model,
                                        const LabeledBatch& batch) {
  check_batch(batch, model.input_dim());
  PerSampleGradients out;
  out.reserve(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    out.push_back(
        backward_per_sample(model, batch.images[j].pixels(), batch.labels[j]));
  }
  return out;
}

PerSampleGradients per_sample_gradients(const LogisticModel& model,
                                        const LabeledBatch& batch) {
  check_batch(batch, model.input_dim());
  PerSampleGradients out;
  out.reserve(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    out.push_back(
        backward_per_sample(model, batch.images[j].pixels(), batch.labels[j]));
  }
  return out;
}

GradientReport backward_summed(const AttackModel& model,
                               const LabeledBatch& batch) {
  check_batch(batch, model.input_dim());
  WideSums acc(model.neuron_count(), model.input_dim(), model.class_count());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto x = batch.images[j].pixels();
    accumulate(acc, trace_sample(model, x, batch.labels[j]), x);
  }
  return acc.finish();
}

GradientReport backward_summed(const LogisticModel& model,
                               const LabeledBatch& batch) {
  check_batch(batch, model.input_dim());
  WideSums acc(model.class_count(), model.input_dim(), 0);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto x = batch.images[j].pixels();
    accumulate(acc, trace_logistic(model, x, batch.labels[j]), x);
  }
  return acc.finish();
}

double batch_loss(const AttackModel& model, const LabeledBatch& batch) {
  check_batch(batch, model.input_dim());
  double total = 0.0;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    total += trace_sample(model, batch.images[j].pixels(), batch.labels[j]).loss;
  }
  return total;
}

GradientReport sum_reports(std::span<const GradientReport> reports) {
  if (reports.empty()) throw ContractViolation("sum_reports: no reports");
  const GradientReport& first = reports.front();
  GradientReport acc = zero_report(first.weight_grad.rows(),
                                   first.weight_grad.cols(),
                                   first.head_weight_grad.rows());
  acc.head_weight_grad = Matrix(first.head_weight_grad.rows(),
                                first.head_weight_grad.cols());
  for (const GradientReport& r : reports) {
    check_report_dims(acc, r);
    axpy(1.0, r.weight_grad.data(), acc.weight_grad.data());
    axpy(1.0, r.bias_grad.span(), acc.bias_grad.span());
    axpy(1.0, r.head_weight_grad.data(), acc.head_weight_grad.data());
    axpy(1.0, r.head_bias_grad.span(), acc.head_bias_grad.span());
    acc.batch_size += r.batch_size;
    acc.loss += r.loss;
  }
  return acc;
}

GradientReport scale_report(GradientReport report, double factor) {
  for (double& v : report.weight_grad.data()) v *= factor;
  for (double& v : report.bias_grad.span()) v *= factor;
  for (double& v : report.head_weight_grad.data()) v *= factor;
  for (double& v : report.head_bias_grad.span()) v *= factor;
  return report;
}

AttackModel sgd_step(AttackModel model, const GradientReport& report,
                     double eta) {
  check_eta(eta);
  step(model.malicious.weights.data(), report.weight_grad.data(), eta,
       "weights");
  step(model.malicious.bias.span(), report.bias_grad.span(), eta, "bias");
  step(model.head_weights.data(), report.head_weight_grad.data(), eta,
       "head weights");
  step(model.head_bias.span(), report.head_bias_grad.span(), eta, "head bias");
  return model;
}

LogisticModel sgd_step(LogisticModel model, const GradientReport& report,
                       double eta) {
  check_eta(eta);
  step(model.weights.data(), report.weight_grad.data(), eta, "weights");
  step(model.bias.span(), report.bias_grad.span(), eta, "bias");
  return model;
}

AttackModel init_model(std::size_t input_dim, std::size_t neurons,
                       std::size_t classes, Rng& rng) {
  if (input_dim == 0 || neurons == 0 || classes == 0) {
    throw ContractViolation("init_model: dimensions must be positive");
  }
  AttackModel m;
  m.malicious.weights = Matrix(neurons, input_dim);
  m.malicious.bias = Vector(neurons);
  m.head_weights = Matrix(classes, neurons);
  m.head_bias = Vector(classes);
  const double w_std = std::sqrt(2.0 / static_cast<double>(input_dim));
  const double v_std = std::sqrt(1.0 / static_cast<double>(neurons));
  for (double& w : m.malicious.weights.data()) w = rng.normal(0.0, w_std);
  for (double& v : m.head_weights.data()) v = rng.normal(0.0, v_std);
  return m;
}

std::size_t predict(const AttackModel& model, std::span<const double> x) {
  const Vector logits = forward(model, x).logits;
  return static_cast<std::size_t>(
      std::max_element(logits.begin(), logits.end()) - logits.begin());
}

double accuracy(const AttackModel& model, const LabeledBatch& batch) {
  check_batch(batch, model.input_dim());
  std::size_t correct = 0;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    if (predict(model, batch.images[j].pixels()) == batch.labels[j]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(batch.size());
}

double train_eval(const LabeledBatch& train, const LabeledBatch& test,
                  const TrainOptions& options, const AugmentationSuite& suite) {
  train.validate();
  test.validate();
  if (train.shape() != test.shape()) {
    throw ContractViolation("train_eval: train/test shapes differ");
  }
  if (options.batch_size == 0) {
    throw ContractViolation("train_eval: batch_size must be positive");
  }
  for (const LabeledBatch* set : {&train, &test}) {
    for (std::size_t label : set->labels) {
      check_label(options.class_count, label);
    }
  }

  Rng init_rng(derive_seed(options.seed, 0));
  Rng order_rng(derive_seed(options.seed, 1));
  AttackModel model = init_model(train.shape().size(), options.hidden_units,
                                 options.class_count, init_rng);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    order_rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += options.batch_size) {
      const std::size_t stop =
          std::min(order.size(), start + options.batch_size);
      LabeledBatch batch;
      for (std::size_t p = start; p < stop; ++p) {
        batch.images.push_back(train.images[order[p]]);
        batch.labels.push_back(train.labels[order[p]]);
      }
      if (!suite.transforms.empty()) {
        batch = build_augmented_batch(batch, suite).expanded;
      }
      const GradientReport summed = backward_summed(model, batch);
      model = sgd_step(std::move(model),
                       scale_report(summed, 1.0 / static_cast<double>(
                                                      batch.size())),
                       options.learning_rate);
    }
  }
  return accuracy(model, test);
}

}  // namespace gradlens
