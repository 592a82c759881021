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

// Malicious-layer construction and gradient inversion.
//
// Core identity: for one sample x and a neuron i it activates,
// dL/dW_i = (dL/db_i) x, so x = (dL/dW_i) / (dL/db_i). On a summed batch
// report the same division returns sum_j c_j x_j / sum_j c_j over the
// samples that activate neuron i (c_j their bias gradients), which is the
// sample itself only when it is alone. The attacks below arrange the first
// layer so that individual samples end up alone:
//
//   * imprint (successive-difference): every row measures the same scalar
//     m.x and neuron i fires iff m.x > c_i for increasing cutoffs c. With a
//     head whose columns are identical, neighbouring neurons' gradients
//     differ exactly by the samples in (c_i, c_{i+1}].
//   * trap (single-activation): sparse, mostly-negative random rows make
//     each neuron fire for few samples, ideally one.
//   * linear-model: a single-layer logistic model with unique labels per
//     batch; each output row is dominated by its own class's sample.

#ifndef GRADLENS_ATTACKS_H_
#define GRADLENS_ATTACKS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "gradlens/gradcore.h"
#include "gradlens/imaging.h"

namespace gradlens {

inline constexpr double kActivationEpsilon = 1e-12;
inline constexpr double kDedupTolerance = 1e-9;

struct ImprintConfig {
  Vector measurement;  // m, length d
  Vector cutoffs;      // c, strictly increasing, length n
};

struct TrapConfig {
  std::uint64_t seed = 0;
  double scale = 1.0;               // sigma of the base normal draw
  double negative_fraction = 0.5;   // rho, fraction of coordinates negated
  // The negated coordinates are rescaled so that the row sums to
  // -margin * (sum of its positive part); a constant image then lands
  // slightly below zero.
  double margin = 0.02;
};

struct NeuronProvenance {
  std::size_t neuron = 0;
  friend bool operator==(const NeuronProvenance&, const NeuronProvenance&) = default;
};

// Difference of neurons `lower` and `upper` = lower + 1.
struct BinProvenance {
  std::size_t lower = 0;
  std::size_t upper = 0;
  friend bool operator==(const BinProvenance&, const BinProvenance&) = default;
};

using Provenance = std::variant<NeuronProvenance, BinProvenance>;

struct Reconstruction {
  FieldImage image;
  Provenance provenance;
  double bias_gradient = 0.0;  // The divisor used.
};

using ReconstructionSet = std::vector<Reconstruction>;

// Returns weight_grad / bias_grad reshaped to `shape`. Throws NonInvertible
// when |bias_grad| <= epsilon, ContractViolation on a length mismatch.
FieldImage invert_neuron(std::span<const double> weight_grad,
                         double bias_grad, const Shape& shape,
                         double epsilon = kActivationEpsilon);

// The measurement vector for "average pixel value": (1/d, ..., 1/d).
Vector pixel_mean_measurement(std::size_t input_dim);

// n cutoffs at levels i/(n+1), i = 1..n, of the empirical distribution of
// `measurements`. Quantiles interpolate linearly between order statistics
// placed at plotting positions (k - 0.5)/N and extrapolate linearly past
// the extremes with slope (max - min)/(N - 1) per 1/N, so the lowest and
// highest bins reach beyond the calibration range. Ties are broken by
// nudging to the next representable value so the result is strictly
// increasing. Throws ConfigError if all measurements are equal or n == 0.
Vector empirical_cutoffs(std::vector<double> measurements, std::size_t n);

struct ImprintLayer {
  MaliciousLayer layer;
  ImprintConfig config;
};

// Every row equals `measurement`; bias_i = -c_i with c from
// empirical_cutoffs over {m.x : x in calibration}. Throws ConfigError for
// n < 2, empty or degenerate calibration, or a zero measurement.
ImprintLayer craft_imprint_layer(std::size_t n,
                                 const std::vector<Image>& calibration,
                                 const Vector& measurement);
// Pixel-mean measurement.
ImprintLayer craft_imprint_layer(std::size_t n,
                                 const std::vector<Image>& calibration);

// Classification head (k x n) whose n columns are identical, so the
// per-sample gradient reaching each first-layer neuron does not depend on
// the neuron. Column entries are 0 except the last class, which gets 1/n;
// the factor is then p_last/n or (p_last - 1)/n, never zero.
Matrix tied_head(std::size_t classes, std::size_t neurons);

// Full imprint model: crafted layer plus tied head with zero head bias.
AttackModel imprint_model(const ImprintLayer& imprint, std::size_t classes);

// Successive differences of an imprint layer's gradients. Emits one
// reconstruction per non-empty bin (i, i+1) and one for the top neuron.
ReconstructionSet imprint_reconstruct(const GradientReport& report,
                                      const ImprintConfig& config,
                                      const Shape& shape,
                                      double epsilon = kActivationEpsilon);

// Deterministic per cfg.seed. Rows are |N(0, scale)| draws with a uniformly
// chosen negative_fraction of coordinates negated and rescaled; bias 0.
MaliciousLayer craft_trap_layer(std::size_t n, std::size_t d,
                                const TrapConfig& config);

// Inverts every neuron with |bias grad| > epsilon, dropping images within
// `dedup_tolerance` (L-infinity) of an earlier one.
ReconstructionSet trap_reconstruct(const GradientReport& report,
                                   const Shape& shape,
                                   double epsilon = kActivationEpsilon,
                                   double dedup_tolerance = kDedupTolerance);

// Server-crafted logistic model: weights N(0, weight_scale), every bias set
// to `bias`. A strongly negative bias drives sigmoid(z) toward 0, so rows
// of classes absent from the batch receive almost no gradient and the row
// of a present class is dominated by that class's sample.
LogisticModel craft_logistic_model(std::size_t classes, std::size_t input_dim,
                                   std::uint64_t seed, double bias = -40.0,
                                   double weight_scale = 0.01);

// Inverts each class row of a LogisticModel report. `labels` are the batch
// labels; they must be pairwise distinct (PreconditionError otherwise).
ReconstructionSet linear_model_attack(const GradientReport& report,
                                      std::span<const std::size_t> labels,
                                      const Shape& shape,
                                      double epsilon = kActivationEpsilon);

}  // namespace gradlens

#endif  // GRADLENS_ATTACKS_H_
