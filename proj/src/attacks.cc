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

#include "gradlens/attacks.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "gradlens/error.h"

namespace gradlens {
namespace {

bool within(const FieldImage& a, const FieldImage& b, double tolerance) {
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (std::abs(pa[i] - pb[i]) > tolerance) return false;
  }
  return true;
}

void check_report_shape(const GradientReport& report, const Shape& shape) {
  if (report.weight_grad.cols() != shape.size()) {
    throw ContractViolation("report input dim " +
                            std::to_string(report.weight_grad.cols()) +
                            " does not match image shape " +
                            shape.to_string());
  }
}

}  // namespace

FieldImage invert_neuron(std::span<const double> weight_grad, double bias_grad,
                         const Shape& shape, double epsilon) {
  if (weight_grad.size() != shape.size()) {
    throw ContractViolation("invert_neuron: gradient length " +
                            std::to_string(weight_grad.size()) +
                            " does not match shape " + shape.to_string());
  }
  if (!(std::abs(bias_grad) > epsilon)) {
    throw NonInvertible("invert_neuron: |bias gradient| " +
                        std::to_string(std::abs(bias_grad)) +
                        " is not above epsilon");
  }
  std::vector<double> pixels(weight_grad.size());
  for (std::size_t j = 0; j < pixels.size(); ++j) {
    pixels[j] = weight_grad[j] / bias_grad;
  }
  return FieldImage(shape, std::move(pixels));
}

Vector pixel_mean_measurement(std::size_t input_dim) {
  if (input_dim == 0) throw ContractViolation("measurement: zero input dim");
  return Vector(input_dim, 1.0 / static_cast<double>(input_dim));
}

Vector empirical_cutoffs(std::vector<double> measurements, std::size_t n) {
  if (n == 0) throw ConfigError("imprint: need at least one cutoff");
  if (measurements.empty()) throw ConfigError("imprint: empty calibration set");
  std::sort(measurements.begin(), measurements.end());
  const double lo = measurements.front();
  const double hi = measurements.back();
  if (!(hi > lo)) {
    throw ConfigError(
        "imprint: degenerate calibration, all measurements are equal");
  }
  const double count = static_cast<double>(measurements.size());
  // Spacing of consecutive order statistics, used past the extremes.
  const double slope = (hi - lo) / (count - 1.0);

  Vector cutoffs(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double level = static_cast<double>(i) / static_cast<double>(n + 1);
    // 0-based fractional rank h such that level = (h + 0.5) / N.
    const double h = level * count - 0.5;
    double c;
    if (h <= 0.0) {
      c = lo + h * slope;
    } else if (h >= count - 1.0) {
      c = hi + (h - (count - 1.0)) * slope;
    } else {
      const auto k = static_cast<std::size_t>(std::floor(h));
      const double frac = h - static_cast<double>(k);
      c = measurements[k] + frac * (measurements[k + 1] - measurements[k]);
    }
    if (i > 1 && !(c > cutoffs[i - 2])) {
      c = std::nextafter(cutoffs[i - 2], std::numeric_limits<double>::infinity());
    }
    cutoffs[i - 1] = c;
  }
  return cutoffs;
}

ImprintLayer craft_imprint_layer(std::size_t n,
                                 const std::vector<Image>& calibration,
                                 const Vector& measurement) {
  if (n < 2) throw ConfigError("imprint: neuron count must be >= 2");
  if (calibration.empty()) throw ConfigError("imprint: empty calibration set");
  if (max_abs(measurement.span()) == 0.0) {
    throw ConfigError("imprint: measurement vector is zero");
  }
  require_finite(measurement.span(), "measurement");
  std::vector<double> values;
  values.reserve(calibration.size());
  for (const Image& image : calibration) {
    if (image.shape().size() != measurement.size()) {
      throw ConfigError("imprint: calibration image " +
                        image.shape().to_string() +
                        " does not match measurement length " +
                        std::to_string(measurement.size()));
    }
    values.push_back(dot(measurement.span(), image.pixels()));
  }

  ImprintLayer out;
  out.config.measurement = measurement;
  out.config.cutoffs = empirical_cutoffs(std::move(values), n);
  out.layer.weights = Matrix(n, measurement.size());
  out.layer.bias = Vector(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(measurement.begin(), measurement.end(),
              out.layer.weights.row(i).begin());
    out.layer.bias[i] = -out.config.cutoffs[i];
  }
  return out;
}

ImprintLayer craft_imprint_layer(std::size_t n,
                                 const std::vector<Image>& calibration) {
  if (calibration.empty()) throw ConfigError("imprint: empty calibration set");
  return craft_imprint_layer(
      n, calibration, pixel_mean_measurement(calibration.front().shape().size()));
}

Matrix tied_head(std::size_t classes, std::size_t neurons) {
  if (classes < 2 || neurons == 0) {
    throw ContractViolation("tied_head: need >= 2 classes and >= 1 neuron");
  }
  Matrix head(classes, neurons);
  const double weight = 1.0 / static_cast<double>(neurons);
  for (double& v : head.row(classes - 1)) v = weight;
  return head;
}

AttackModel imprint_model(const ImprintLayer& imprint, std::size_t classes) {
  AttackModel model;
  model.malicious = imprint.layer;
  model.head_weights = tied_head(classes, imprint.layer.neuron_count());
  model.head_bias = Vector(classes);
  return model;
}

ReconstructionSet imprint_reconstruct(const GradientReport& report,
                                      const ImprintConfig& config,
                                      const Shape& shape, double epsilon) {
  check_report_shape(report, shape);
  const std::size_t n = report.weight_grad.rows();
  if (config.cutoffs.size() != n) {
    throw ContractViolation("imprint_reconstruct: report has " +
                            std::to_string(n) + " neurons, config has " +
                            std::to_string(config.cutoffs.size()) +
                            " cutoffs");
  }
  ReconstructionSet out;
  std::vector<double> diff(shape.size());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double bias_diff = report.bias_grad[i] - report.bias_grad[i + 1];
    if (!(std::abs(bias_diff) > epsilon)) continue;
    const auto lower = report.weight_grad.row(i);
    const auto upper = report.weight_grad.row(i + 1);
    for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = lower[j] - upper[j];
    out.push_back({invert_neuron(diff, bias_diff, shape, epsilon),
                   BinProvenance{i, i + 1}, bias_diff});
  }
  const std::size_t top = n - 1;
  if (std::abs(report.bias_grad[top]) > epsilon) {
    out.push_back({invert_neuron(report.weight_grad.row(top),
                                 report.bias_grad[top], shape, epsilon),
                   NeuronProvenance{top}, report.bias_grad[top]});
  }
  return out;
}

MaliciousLayer craft_trap_layer(std::size_t n, std::size_t d,
                                const TrapConfig& config) {
  if (n == 0 || d == 0) {
    throw ContractViolation("craft_trap_layer: n and d must be >= 1");
  }
  if (!(config.scale > 0.0)) throw ConfigError("trap: scale must be > 0");
  if (!(config.negative_fraction >= 0.0 && config.negative_fraction <= 1.0)) {
    throw ConfigError("trap: negative fraction must lie in [0, 1]");
  }
  if (!(config.margin >= 0.0)) throw ConfigError("trap: margin must be >= 0");

  Rng rng(config.seed);
  MaliciousLayer layer{Matrix(n, d), Vector(n)};
  const auto negated = static_cast<std::size_t>(
      std::llround(config.negative_fraction * static_cast<double>(d)));
  std::vector<std::size_t> coords(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = layer.weights.row(i);
    for (double& w : row) w = std::abs(rng.normal(0.0, config.scale));
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    rng.shuffle(coords);
    double positive = 0.0;
    double negative = 0.0;
    for (std::size_t p = 0; p < d; ++p) {
      (p < negated ? negative : positive) += row[coords[p]];
    }
    const double rescale = (positive > 0.0 && negative > 0.0)
                               ? (1.0 + config.margin) * positive / negative
                               : 1.0;
    for (std::size_t p = 0; p < negated; ++p) {
      row[coords[p]] = -rescale * row[coords[p]];
    }
  }
  return layer;
}

ReconstructionSet trap_reconstruct(const GradientReport& report,
                                   const Shape& shape, double epsilon,
                                   double dedup_tolerance) {
  check_report_shape(report, shape);
  ReconstructionSet out;
  for (std::size_t i = 0; i < report.weight_grad.rows(); ++i) {
    const double g = report.bias_grad[i];
    if (!(std::abs(g) > epsilon)) continue;
    FieldImage image = invert_neuron(report.weight_grad.row(i), g, shape,
                                     epsilon);
    const bool duplicate =
        std::any_of(out.begin(), out.end(), [&](const Reconstruction& r) {
          return within(r.image, image, dedup_tolerance);
        });
    if (!duplicate) out.push_back({std::move(image), NeuronProvenance{i}, g});
  }
  return out;
}

LogisticModel craft_logistic_model(std::size_t classes, std::size_t input_dim,
                                   std::uint64_t seed, double bias,
                                   double weight_scale) {
  if (classes == 0 || input_dim == 0) {
    throw ContractViolation("craft_logistic_model: dimensions must be >= 1");
  }
  Rng rng(seed);
  LogisticModel model{Matrix(classes, input_dim), Vector(classes, bias)};
  for (double& w : model.weights.data()) w = rng.normal(0.0, weight_scale);
  model.validate();
  return model;
}

ReconstructionSet linear_model_attack(const GradientReport& report,
                                      std::span<const std::size_t> labels,
                                      const Shape& shape, double epsilon) {
  check_report_shape(report, shape);
  if (report.head_weight_grad.rows() != 0) {
    throw ContractViolation(
        "linear_model_attack: report comes from a multi-layer model");
  }
  std::set<std::size_t> seen;
  for (std::size_t label : labels) {
    if (!seen.insert(label).second) {
      throw PreconditionError("linear_model_attack: label " +
                              std::to_string(label) +
                              " repeats; the attack assumes unique labels");
    }
  }
  ReconstructionSet out;
  for (std::size_t r = 0; r < report.weight_grad.rows(); ++r) {
    const double g = report.bias_grad[r];
    if (!(std::abs(g) > epsilon)) continue;
    out.push_back({invert_neuron(report.weight_grad.row(r), g, shape, epsilon),
                   NeuronProvenance{r}, g});
  }
  return out;
}

}  // namespace gradlens
