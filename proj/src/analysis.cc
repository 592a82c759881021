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

#include "gradlens/analysis.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "gradlens/error.h"
#include "gradlens/linalg.h"

namespace gradlens {
namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto k = static_cast<std::size_t>(std::floor(h));
  if (k + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(k);
  return sorted[k] + frac * (sorted[k + 1] - sorted[k]);
}

// True iff `with` equals `without` plus exactly `target`.
bool adds_only(const std::vector<std::size_t>& with,
               const std::vector<std::size_t>& without, std::size_t target) {
  if (with.size() != without.size() + 1) return false;
  std::size_t w = 0;
  bool skipped = false;
  for (std::size_t s : with) {
    if (!skipped && s == target) {
      skipped = true;
      continue;
    }
    if (w >= without.size() || without[w] != s) return false;
    ++w;
  }
  return skipped;
}

}  // namespace

ActivationCensus census(const AttackModel& model, const LabeledBatch& batch) {
  batch.validate();
  const std::size_t n = model.neuron_count();
  ActivationCensus c;
  c.by_neuron.resize(n);
  c.by_sample.resize(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Vector preacts = forward(model, batch.images[j].pixels()).preacts;
    for (std::size_t i = 0; i < n; ++i) {
      if (preacts[i] > 0.0) {
        c.by_neuron[i].push_back(j);
        c.by_sample[j].push_back(i);
      }
    }
  }

  std::map<std::vector<double>, std::size_t> groups;
  c.neuron_group.resize(n);
  const std::size_t k = model.class_count();
  std::vector<double> column(k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < k; ++r) column[r] = model.head_weights(r, i);
    const auto [it, inserted] = groups.try_emplace(column, groups.size());
    c.neuron_group[i] = it->second;
  }
  return c;
}

Extractability extractability_oracle(const ActivationCensus& census,
                                     std::size_t target) {
  if (target >= census.sample_count()) {
    throw ContractViolation("extractability_oracle: target " +
                            std::to_string(target) + " out of range");
  }
  const auto& sets = census.by_neuron;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].size() == 1 && sets[i][0] == target) {
      return IsolatedByNeuron{i};
    }
  }
  for (std::size_t i : census.by_sample[target]) {
    for (std::size_t k = 0; k < sets.size(); ++k) {
      if (k == i || census.neuron_group[k] != census.neuron_group[i]) continue;
      if (adds_only(sets[i], sets[k], target)) {
        return IsolatedByDifference{i, k};
      }
    }
  }
  return NotExtractable{};
}

std::vector<std::size_t> contributing_samples(const ActivationCensus& census,
                                              const Provenance& provenance) {
  if (const auto* p = std::get_if<NeuronProvenance>(&provenance)) {
    if (p->neuron >= census.neuron_count()) {
      throw ContractViolation("contributing_samples: neuron out of range");
    }
    return census.by_neuron[p->neuron];
  }
  const auto& bin = std::get<BinProvenance>(provenance);
  if (bin.upper >= census.neuron_count() || bin.lower >= census.neuron_count()) {
    throw ContractViolation("contributing_samples: bin out of range");
  }
  std::vector<std::size_t> out;
  std::set_difference(census.by_neuron[bin.lower].begin(),
                      census.by_neuron[bin.lower].end(),
                      census.by_neuron[bin.upper].begin(),
                      census.by_neuron[bin.upper].end(),
                      std::back_inserter(out));
  return out;
}

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw ContractViolation("summarize: empty list");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (double v : values) total += v;
  return Summary{sorted.front(),
                 quantile_sorted(sorted, 0.25),
                 quantile_sorted(sorted, 0.5),
                 quantile_sorted(sorted, 0.75),
                 sorted.back(),
                 total / static_cast<double>(values.size())};
}

std::vector<double> MatchReport::psnrs() const {
  std::vector<double> out;
  out.reserve(per_original.size());
  for (const OriginalMatch& m : per_original) out.push_back(m.best_psnr);
  return out;
}

std::size_t MatchReport::recovered(double threshold_db) const {
  return static_cast<std::size_t>(
      std::count_if(per_original.begin(), per_original.end(),
                    [&](const OriginalMatch& m) {
                      return m.best_psnr >= threshold_db;
                    }));
}

MatchReport match_reconstructions(const ReconstructionSet& reconstructions,
                                  std::span<const Image> originals,
                                  double cap) {
  MatchReport report;
  report.per_original.resize(originals.size());
  std::vector<Image> clamped;
  clamped.reserve(reconstructions.size());
  for (const Reconstruction& r : reconstructions) {
    clamped.push_back(r.image.clamped());
  }
  for (std::size_t t = 0; t < originals.size(); ++t) {
    OriginalMatch& best = report.per_original[t];
    for (std::size_t r = 0; r < clamped.size(); ++r) {
      const double value = psnr(clamped[r], originals[t], cap);
      if (!best.reconstruction || value > best.best_psnr) {
        best.best_psnr = value;
        best.reconstruction = r;
      }
    }
  }
  if (!originals.empty()) report.summary = summarize(report.psnrs());
  return report;
}

double lincomb_residual(const FieldImage& reconstruction,
                        std::span<const Image> basis) {
  if (basis.empty()) throw ContractViolation("lincomb_residual: empty basis");
  const Shape& shape = reconstruction.shape();
  for (const Image& b : basis) {
    if (b.shape() != shape) {
      throw ContractViolation("lincomb_residual: basis shape " +
                              b.shape().to_string() + " != " +
                              shape.to_string());
    }
  }
  const auto target = reconstruction.pixels();
  const double norm = std::sqrt(dot(target, target));
  if (norm == 0.0) return 0.0;

  std::vector<std::vector<double>> columns;
  columns.reserve(basis.size() + 1);
  for (const Image& b : basis) {
    columns.emplace_back(b.pixels().begin(), b.pixels().end());
  }
  columns.emplace_back(shape.size(), 1.0);

  const std::size_t m = columns.size();
  Matrix gram(m, m);
  Vector rhs(m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      gram(a, b) = gram(b, a) = dot(columns[a], columns[b]);
    }
    rhs[a] = dot(columns[a], target);
  }
  const Vector coeffs = solve_spd(gram, rhs, 1e-12);

  double residual_sq = 0.0;
  for (std::size_t p = 0; p < target.size(); ++p) {
    double fitted = 0.0;
    for (std::size_t a = 0; a < m; ++a) fitted += coeffs[a] * columns[a][p];
    const double diff = target[p] - fitted;
    residual_sq += diff * diff;
  }
  return std::sqrt(residual_sq) / norm;
}

}  // namespace gradlens
