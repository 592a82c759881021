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

// Ground-truth instrumentation. These functions look at client data and are
// used to *grade* attacks; the attacks themselves never call them.

#ifndef GRADLENS_ANALYSIS_H_
#define GRADLENS_ANALYSIS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "gradlens/attacks.h"
#include "gradlens/defense.h"
#include "gradlens/gradcore.h"
#include "gradlens/imaging.h"

namespace gradlens {

// A reconstruction at or above this PSNR counts as a perfect recovery.
inline constexpr double kRecoveryThresholdDb = 80.0;

// Which samples activate which first-layer neurons (pre-activation > 0).
struct ActivationCensus {
  std::vector<std::vector<std::size_t>> by_neuron;  // sorted sample indices
  std::vector<std::vector<std::size_t>> by_sample;  // sorted neuron indices
  // Neurons with bit-identical head columns share a group. Within a group
  // each sample's gradient factor is the same for every neuron, so sums
  // over one neuron's samples can be subtracted from another's.
  std::vector<std::size_t> neuron_group;

  std::size_t neuron_count() const { return by_neuron.size(); }
  std::size_t sample_count() const { return by_sample.size(); }
};

ActivationCensus census(const AttackModel& model, const LabeledBatch& batch);

struct IsolatedByNeuron {
  std::size_t neuron = 0;
  friend bool operator==(const IsolatedByNeuron&, const IsolatedByNeuron&) = default;
};
// set(neuron) = set(without) + {t}, both neurons in the same head group.
struct IsolatedByDifference {
  std::size_t neuron = 0;
  std::size_t without = 0;
  friend bool operator==(const IsolatedByDifference&,
                         const IsolatedByDifference&) = default;
};
struct NotExtractable {
  friend bool operator==(const NotExtractable&, const NotExtractable&) = default;
};

using Extractability =
    std::variant<IsolatedByNeuron, IsolatedByDifference, NotExtractable>;

// Can the server isolate sample `target`'s own gradient from the summed
// report? Checks a neuron whose activation set is exactly {target}, then
// ordered neuron pairs (i, k) in one head group with set(i) equal to
// set(k) plus target. Other subset-sum combinations are not searched.
// Throws ContractViolation if target is out of range.
Extractability extractability_oracle(const ActivationCensus& census,
                                     std::size_t target);

inline bool is_extractable(const Extractability& e) {
  return !std::holds_alternative<NotExtractable>(e);
}

// Samples whose gradient a reconstruction mixes: set(i) for a neuron,
// set(lower) minus set(upper) for a bin.
std::vector<std::size_t> contributing_samples(const ActivationCensus& census,
                                              const Provenance& provenance);

// Boxplot statistics. Quartiles interpolate linearly between sorted order
// statistics at fractional rank p * (N - 1) (0-based).
struct Summary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

// Throws ContractViolation on an empty list.
Summary summarize(std::span<const double> values);

struct OriginalMatch {
  double best_psnr = 0.0;
  std::optional<std::size_t> reconstruction;
};

struct MatchReport {
  std::vector<OriginalMatch> per_original;
  Summary summary;

  std::vector<double> psnrs() const;
  std::size_t recovered(double threshold_db) const;
};

// Best PSNR per original over all reconstructions (clamped to [0, 1]
// first); several originals may match the same reconstruction. An empty
// reconstruction set scores every original 0 dB with no match.
MatchReport match_reconstructions(const ReconstructionSet& reconstructions,
                                  std::span<const Image> originals,
                                  double cap = kPsnrCap);

// ||r - P r|| / ||r|| with P the least-squares projection onto
// span(basis + {constant image}), solved through the normal equations with
// ridge 1e-12. Throws ContractViolation on an empty basis or shape mismatch.
double lincomb_residual(const FieldImage& reconstruction,
                        std::span<const Image> basis);

}  // namespace gradlens

#endif  // GRADLENS_ANALYSIS_H_
