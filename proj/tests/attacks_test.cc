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

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "gradlens/attacks.h"
#include "gradlens/cli/synthetic.h"
#include "gradlens/error.h"
#include "oracles.h"

namespace gradlens {
namespace {

std::vector<std::size_t> activating(const AttackModel& m, const LabeledBatch& b,
                                    std::size_t neuron) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (oracle::forward(m, b.images[j].pixels()).preacts[neuron] > 0) {
      out.push_back(j);
    }
  }
  return out;
}

// Reference for a reconstruction: the affine combination of the samples
// behind it, weighted by their own bias gradients from the per-sample
// oracle.
std::vector<double> expected_image(const AttackModel& m, const LabeledBatch& b,
                                   const Reconstruction& r) {
  const PerSampleGradients per = per_sample_gradients(m, b);
  std::vector<Image> xs;
  std::vector<double> c;
  for (std::size_t j = 0; j < b.size(); ++j) {
    double coeff = 0.0;
    if (const auto* p = std::get_if<NeuronProvenance>(&r.provenance)) {
      coeff = per[j].bias_grad[p->neuron];
    } else {
      const auto& bin = std::get<BinProvenance>(r.provenance);
      coeff = per[j].bias_grad[bin.lower] - per[j].bias_grad[bin.upper];
    }
    if (coeff != 0.0) {
      xs.push_back(b.images[j]);
      c.push_back(coeff);
    }
  }
  return oracle::affine_combination(xs, c);
}

Image with_mean(const Shape& s, double base, double bump) {
  std::vector<double> p(s.size(), base);
  p[0] = std::min(1.0, base + bump);
  return Image(s, std::move(p));
}

TEST(InvertNeuron, ExactForScaledInput) {
  const LabeledBatch b = oracle::uniform_batch(1, 1, {3, 3, 1}, 1);
  const auto x = b.images[0].pixels();
  std::vector<double> dw(x.begin(), x.end());
  for (double& v : dw) v *= 2.0;
  const FieldImage f = invert_neuron(dw, 2.0, {3, 3, 1});
  EXPECT_EQ(f, FieldImage(b.images[0]));
}

TEST(InvertNeuron, ZeroBiasGradientIsNonInvertible) {
  const std::vector<double> dw(4, 1.0);
  EXPECT_THROW(invert_neuron(dw, 0.0, {2, 2, 1}), NonInvertible);
  EXPECT_THROW(invert_neuron(dw, 1e-13, {2, 2, 1}), NonInvertible);
  EXPECT_THROW(invert_neuron(dw, 1.0, {3, 2, 1}), ContractViolation);
}

TEST(InvertNeuron, TwoSamplesGiveAffineCombination) {
  AttackModel m = oracle::random_model(2, 9, 3, 2);
  for (double& w : m.malicious.weights.row(0)) w = 1.0;
  m.malicious.bias[0] = 0.0;  // both positive images activate neuron 0
  const LabeledBatch b = oracle::uniform_batch(3, 2, {3, 3, 1}, 2, 0.1, 0.9);
  const GradientReport g = backward_summed(m, b);
  const FieldImage f = invert_neuron(g.weight_grad.row(0), g.bias_grad[0], {3, 3, 1});
  const auto per = per_sample_gradients(m, b);
  const auto expected = oracle::affine_combination(
      b.images, {per[0].bias_grad[0], per[1].bias_grad[0]});
  EXPECT_LE(oracle::max_relative_error(f.pixels(), expected, 1e-12), 1e-8);
}

TEST(EmpiricalCutoffs, MatchSortedQuartiles) {
  const Shape s{4, 4, 1};
  std::vector<Image> calib;
  std::vector<double> measured;
  const Vector m = pixel_mean_measurement(s.size());
  for (int k = 0; k <= 400; ++k) {
    calib.push_back(Image::filled(s, (k * 37 % 401) / 400.0));
    measured.push_back(dot(m.span(), calib.back().pixels()));
  }
  const ImprintLayer layer = craft_imprint_layer(3, calib);
  for (int i = 1; i <= 3; ++i) {
    EXPECT_NEAR(layer.config.cutoffs[i - 1],
                oracle::sorted_quantile(measured, i / 4.0), 2.5e-3);
  }
}

TEST(EmpiricalCutoffs, StrictlyIncreasingWithTies) {
  const Vector c = empirical_cutoffs({0.1, 0.5, 0.5, 0.5, 0.5, 0.9}, 20);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_GT(c[i], c[i - 1]);
  EXPECT_LT(c[0], 0.1);
  EXPECT_GT(c[19], 0.9);
}

TEST(CraftImprint, RowsIdenticalAndNested) {
  const Shape s{4, 4, 1};
  const auto calib = cli::gen_synthetic(4, 64, s, 4).images;
  const ImprintLayer layer = craft_imprint_layer(16, calib);
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_TRUE(std::equal(layer.layer.weights.row(i).begin(),
                           layer.layer.weights.row(i).end(),
                           layer.layer.weights.row(0).begin()));
    EXPECT_EQ(layer.layer.bias[i], -layer.config.cutoffs[i]);
  }
  const AttackModel model = imprint_model(layer, 4);
  const LabeledBatch low{{Image::filled(s, 0.0)}, {0}};
  const LabeledBatch high{{Image::filled(s, 1.0)}, {0}};
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_TRUE(activating(model, low, i).empty());
    EXPECT_EQ(activating(model, high, i).size(), 1u);
  }
}

TEST(CraftImprint, ConfigErrors) {
  const Shape s{2, 2, 1};
  const std::vector<Image> flat(5, Image::filled(s, 0.3));
  EXPECT_THROW(craft_imprint_layer(4, flat), ConfigError);
  EXPECT_THROW(craft_imprint_layer(1, {Image::filled(s, 0.1), Image::filled(s, 0.2)}),
               ConfigError);
  EXPECT_THROW(craft_imprint_layer(4, {}), ConfigError);
}

TEST(ImprintReconstruct, FourDistinctMeansRecoveredAtCap) {
  const Shape s{3, 3, 1};
  LabeledBatch batch;
  for (double base : {0.2, 0.4, 0.6, 0.8}) {
    batch.images.push_back(with_mean(s, base, 0.15));
    batch.labels.push_back(batch.size() % 3);
  }
  const ImprintLayer layer = craft_imprint_layer(16, batch.images);
  const AttackModel model = imprint_model(layer, 3);
  const GradientReport report = backward_summed(model, batch);
  const ReconstructionSet recon = imprint_reconstruct(report, layer.config, s);
  ASSERT_EQ(recon.size(), 4u);
  std::set<std::size_t> matched;
  for (const Reconstruction& r : recon) {
    // Per-sample oracle: exactly one sample contributes to this bin.
    const auto expected = expected_image(model, batch, r);
    for (std::size_t t = 0; t < 4; ++t) {
      if (psnr(r.image, batch.images[t]) == kPsnrCap) matched.insert(t);
    }
    EXPECT_LE(oracle::max_relative_error(r.image.pixels(), expected, 1e-12), 1e-8);
  }
  EXPECT_EQ(matched.size(), 4u);
}

TEST(ImprintReconstruct, IdenticalImagesShareOneBin) {
  const Shape s{3, 3, 1};
  const Image twin = with_mean(s, 0.5, 0.1);
  LabeledBatch batch{{twin, twin, with_mean(s, 0.2, 0.0)}, {0, 1, 2}};
  const ImprintLayer layer = craft_imprint_layer(8, batch.images);
  const ReconstructionSet recon = imprint_reconstruct(
      backward_summed(imprint_model(layer, 3), batch), layer.config, s);
  ASSERT_EQ(recon.size(), 2u);
  std::size_t twin_hits = 0;
  for (const Reconstruction& r : recon) {
    if (psnr(r.image, twin) >= 80.0) ++twin_hits;
  }
  EXPECT_EQ(twin_hits, 1u);
}

TEST(ImprintReconstruct, MajorRotationBlocksRecovery) {
  const Shape s{16, 16, 1};
  const LabeledBatch batch = cli::gen_synthetic(5, 8, s, 4);
  const auto calib = cli::gen_synthetic(6, 256, s, 4).images;
  const ImprintLayer layer = craft_imprint_layer(64, calib);
  const AttackModel model = imprint_model(layer, 4);
  const AugmentedBatch ab = build_augmented_batch(batch, suite("major-rotation"));
  // Census: every original shares all of its activations with its rotations.
  for (std::size_t i = 0; i < 64; ++i) {
    const auto set = activating(model, ab.expanded, i);
    for (std::size_t j : set) {
      const std::size_t origin = ab.origin_map[j].base_index;
      for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_TRUE(std::binary_search(set.begin(), set.end(),
                                       ab.original_position(origin) + k));
      }
    }
  }
  const ReconstructionSet recon = imprint_reconstruct(
      backward_summed(model, ab.expanded), layer.config, s);
  ASSERT_FALSE(recon.empty());
  for (const Reconstruction& r : recon) {
    for (const Image& x : batch.images) EXPECT_LT(psnr(r.image.clamped(), x), 80.0);
  }
}

TEST(ImprintReconstruct, MismatchedConfigThrows) {
  const Shape s{2, 2, 1};
  const ImprintLayer layer =
      craft_imprint_layer(4, {Image::filled(s, 0.1), Image::filled(s, 0.9)});
  ImprintConfig wrong = layer.config;
  wrong.cutoffs = Vector{0.1, 0.2};
  const LabeledBatch b{{Image::filled(s, 0.5)}, {0}};
  const GradientReport g = backward_summed(imprint_model(layer, 2), b);
  EXPECT_THROW(imprint_reconstruct(g, wrong, s), ContractViolation);
  EXPECT_THROW(imprint_reconstruct(g, layer.config, {3, 1, 1}), ContractViolation);
}

TEST(Trap, DeterministicPerSeed) {
  TrapConfig cfg;
  cfg.seed = 11;
  EXPECT_EQ(craft_trap_layer(32, 64, cfg), craft_trap_layer(32, 64, cfg));
  TrapConfig other = cfg;
  other.seed = 12;
  EXPECT_NE(craft_trap_layer(32, 64, cfg), craft_trap_layer(32, 64, other));
  const MaliciousLayer l = craft_trap_layer(4, 64, cfg);
  for (double v : l.bias) EXPECT_EQ(v, 0.0);
}

TEST(Trap, RowsSumSlightlyNegative) {
  TrapConfig cfg;
  cfg.seed = 13;
  const MaliciousLayer l = craft_trap_layer(16, 256, cfg);
  for (std::size_t i = 0; i < 16; ++i) {
    double pos = 0.0, total = 0.0;
    for (double w : l.weights.row(i)) {
      total += w;
      if (w > 0) pos += w;
    }
    EXPECT_NEAR(total, -cfg.margin * pos, 1e-9 * pos);
  }
}

TEST(Trap, SingletonNeuronExistsOnSyntheticBatch) {
  TrapConfig cfg;
  cfg.seed = 14;
  cfg.negative_fraction = 0.5;
  cfg.scale = 1.0;
  const Shape s{16, 16, 1};
  const LabeledBatch batch = cli::gen_synthetic(15, 8, s, 4);
  AttackModel m = oracle::random_model(16, s.size(), 256, 4);
  m.malicious = craft_trap_layer(256, s.size(), cfg);
  std::size_t singletons = 0;
  for (std::size_t i = 0; i < 256; ++i) singletons += activating(m, batch, i).size() == 1;
  EXPECT_GE(singletons, 1u);
}

TEST(Trap, AllNegatedRowsNeverFire) {
  TrapConfig cfg;
  cfg.seed = 17;
  cfg.negative_fraction = 1.0;
  const Shape s{4, 4, 1};
  AttackModel m = oracle::random_model(18, s.size(), 8, 2);
  m.malicious = craft_trap_layer(8, s.size(), cfg);
  const LabeledBatch batch = oracle::uniform_batch(19, 6, s, 2);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_TRUE(activating(m, batch, i).empty());
  EXPECT_TRUE(trap_reconstruct(backward_summed(m, batch), s).empty());
}

TEST(Trap, ReconstructionsFollowAffineLaw) {
  TrapConfig cfg;
  cfg.seed = 20;
  const Shape s{8, 8, 1};
  const LabeledBatch batch = cli::gen_synthetic(21, 6, s, 4);
  AttackModel m = oracle::random_model(22, s.size(), 64, 4);
  m.malicious = craft_trap_layer(64, s.size(), cfg);
  const ReconstructionSet recon = trap_reconstruct(backward_summed(m, batch), s);
  ASSERT_FALSE(recon.empty());
  bool saw_single = false, saw_multi = false;
  for (const Reconstruction& r : recon) {
    const std::size_t i = std::get<NeuronProvenance>(r.provenance).neuron;
    const auto set = activating(m, batch, i);
    const auto expected = expected_image(m, batch, r);
    EXPECT_LE(oracle::max_relative_error(r.image.pixels(), expected, 1e-12), 1e-8);
    if (set.size() == 1) {
      saw_single = true;
      EXPECT_EQ(psnr(r.image, batch.images[set[0]]), kPsnrCap);
    } else {
      saw_multi = true;
    }
  }
  EXPECT_TRUE(saw_single);
  EXPECT_TRUE(saw_multi);
}

TEST(Trap, DuplicatesAreDropped) {
  TrapConfig cfg;
  cfg.seed = 23;
  const Shape s{8, 8, 1};
  const LabeledBatch batch = oracle::take(cli::gen_synthetic(24, 4, s, 4), 1);
  AttackModel m = oracle::random_model(25, s.size(), 64, 4);
  m.malicious = craft_trap_layer(64, s.size(), cfg);
  const ReconstructionSet recon = trap_reconstruct(backward_summed(m, batch), s);
  // One sample: every firing neuron inverts to the same image.
  EXPECT_EQ(recon.size(), 1u);
}

TEST(LinearAttack, SingleSampleExact) {
  const Shape s{4, 4, 1};
  const LabeledBatch b = oracle::uniform_batch(26, 1, s, 3);
  const LogisticModel m = craft_logistic_model(3, s.size(), 27);
  const ReconstructionSet recon =
      linear_model_attack(backward_summed(m, b), b.labels, s);
  ASSERT_EQ(recon.size(), 1u);
  EXPECT_EQ(psnr(recon[0].image, b.images[0]), kPsnrCap);
}

TEST(LinearAttack, UniqueLabelsEachRecovered) {
  const Shape s{8, 8, 1};
  const LabeledBatch b = oracle::uniform_batch(28, 3, s, 3);
  const LogisticModel m = craft_logistic_model(3, s.size(), 29);
  const GradientReport g = backward_summed(m, b);
  const ReconstructionSet recon = linear_model_attack(g, b.labels, s);
  ASSERT_EQ(recon.size(), 3u);
  const auto per = per_sample_gradients(m, b);
  for (const Reconstruction& r : recon) {
    const std::size_t cls = std::get<NeuronProvenance>(r.provenance).neuron;
    std::vector<double> c;
    for (std::size_t j = 0; j < 3; ++j) c.push_back(per[j].bias_grad[cls]);
    const auto expected = oracle::affine_combination(b.images, c);
    EXPECT_LE(oracle::max_relative_error(r.image.pixels(), expected, 1e-12), 1e-8);
    EXPECT_GE(psnr(r.image, b.images[cls]), 80.0);
  }
}

TEST(LinearAttack, MajorRotationGivesBlends) {
  const Shape s{8, 8, 1};
  const LabeledBatch b = cli::gen_synthetic(30, 3, s, 3);
  const AugmentedBatch ab = build_augmented_batch(b, suite("major-rotation"));
  const LogisticModel m = craft_logistic_model(3, s.size(), 31);
  const ReconstructionSet recon =
      linear_model_attack(backward_summed(m, ab.expanded), b.labels, s);
  ASSERT_EQ(recon.size(), 3u);
  for (const Reconstruction& r : recon) {
    double best = 0.0;
    for (const Image& x : b.images) best = std::max(best, psnr(r.image.clamped(), x));
    EXPECT_LE(best, 35.0);
  }
}

TEST(LinearAttack, Preconditions) {
  const Shape s{2, 2, 1};
  const LabeledBatch b = oracle::uniform_batch(32, 2, s, 1);
  const LogisticModel m = craft_logistic_model(2, s.size(), 33);
  EXPECT_THROW(linear_model_attack(backward_summed(m, b), b.labels, s),
               PreconditionError);
  const AttackModel am = oracle::random_model(34, s.size(), 2, 2);
  EXPECT_THROW(linear_model_attack(backward_summed(am, b), {}, s),
               ContractViolation);
}

}  // namespace
}  // namespace gradlens
