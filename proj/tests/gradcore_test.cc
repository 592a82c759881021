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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "gradlens/cli/synthetic.h"
#include "gradlens/error.h"
#include "gradlens/gradcore.h"
#include "gradlens/linalg.h"
#include "oracles.h"

namespace gradlens {
namespace {

AttackModel identity_model() {
  AttackModel m;
  m.malicious = {Matrix::identity(2), Vector(2)};
  m.head_weights = Matrix::identity(2);
  m.head_bias = Vector(2);
  return m;
}

TEST(Forward, IdentityReluExample) {
  const std::vector<double> x{1.0, -1.0};
  const ForwardResult f = forward(identity_model(), x);
  EXPECT_EQ(f.preacts, (Vector{1.0, -1.0}));
  EXPECT_EQ(f.logits, (Vector{1.0, 0.0}));
}

TEST(Forward, ZeroInputGivesHeadBias) {
  AttackModel m = oracle::random_model(1, 6, 4, 3);
  m.head_bias = Vector{0.3, -0.2, 0.9};
  const std::vector<double> x(6, 0.0);
  EXPECT_EQ(forward(m, x).logits, m.head_bias);
}

TEST(Forward, MatchesIndependentEvaluator) {
  const AttackModel m = oracle::random_model(2, 48, 16, 4);
  const LabeledBatch b = oracle::uniform_batch(3, 5, {4, 4, 3}, 4);
  for (const Image& img : b.images) {
    const ForwardResult f = forward(m, img.pixels());
    const oracle::Forward g = oracle::forward(m, img.pixels());
    for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(f.preacts[i], g.preacts[i], 1e-12);
    for (std::size_t r = 0; r < 4; ++r) EXPECT_NEAR(f.logits[r], g.logits[r], 1e-12);
  }
}

TEST(Forward, DimensionMismatchThrows) {
  const std::vector<double> x{1.0, 2.0, 3.0};
  EXPECT_THROW(forward(identity_model(), x), ContractViolation);
  EXPECT_THROW(backward_per_sample(identity_model(), std::vector<double>{1, 1}, 2),
               ContractViolation);
}

TEST(Backward, RankOneIdentityIsExact) {
  const AttackModel m = oracle::random_model(4, 64, 16, 4);
  const LabeledBatch b = oracle::uniform_batch(5, 6, {8, 8, 1}, 4);
  for (std::size_t j = 0; j < b.size(); ++j) {
    const auto x = b.images[j].pixels();
    const GradientReport g = backward_per_sample(m, x, b.labels[j]);
    for (std::size_t i = 0; i < 16; ++i) {
      for (std::size_t p = 0; p < x.size(); ++p) {
        ASSERT_EQ(g.weight_grad(i, p), g.bias_grad[i] * x[p]);
      }
    }
  }
}

TEST(Backward, DeadNeuronHasZeroGradient) {
  AttackModel m = oracle::random_model(6, 16, 4, 3);
  m.malicious.bias[2] = -1e6;
  m.malicious.bias[3] = 0.0;
  for (double& w : m.malicious.weights.row(3)) w = 0.0;  // preact exactly 0
  const LabeledBatch b = oracle::uniform_batch(7, 1, {4, 4, 1}, 3);
  const GradientReport g = backward_per_sample(m, b.images[0].pixels(), 1);
  for (std::size_t i : {2u, 3u}) {
    EXPECT_EQ(g.bias_grad[i], 0.0);
    for (double v : g.weight_grad.row(i)) EXPECT_EQ(v, 0.0);
  }
}

TEST(Backward, MatchesCentralDifferences) {
  const AttackModel m = oracle::random_model(8, 12, 4, 3);
  const LabeledBatch b = oracle::uniform_batch(9, 3, {4, 3, 1}, 3);
  const auto analytic = oracle::flatten(backward_summed(m, b));
  const auto numeric = oracle::fd_gradient(m, b, 1e-5);
  EXPECT_LE(oracle::max_relative_error(analytic, numeric, 1e-3), 1e-6);
}

TEST(Backward, LogisticMatchesCentralDifferences) {
  Rng rng(10);
  LogisticModel m{Matrix(3, 12), Vector(3)};
  for (double& w : m.weights.data()) w = rng.normal(0, 0.5);
  for (double& v : m.bias.span()) v = rng.normal(0, 0.5);
  const LabeledBatch b = oracle::uniform_batch(11, 3, {4, 3, 1}, 3);
  const auto analytic = oracle::flatten(backward_summed(m, b));
  const auto numeric = oracle::fd_gradient(m, b, 1e-5);
  EXPECT_LE(oracle::max_relative_error(analytic, numeric, 1e-3), 1e-6);
}

TEST(Backward, LossMatchesOracle) {
  const AttackModel m = oracle::random_model(12, 12, 4, 3);
  const LabeledBatch b = oracle::uniform_batch(13, 1, {4, 3, 1}, 3);
  const GradientReport g = backward_per_sample(m, b.images[0].pixels(), 0);
  EXPECT_NEAR(g.loss, oracle::loss(m, b.images[0].pixels(), 0), 1e-12);
}

TEST(Backward, LabelOutOfRangeThrows) {
  const AttackModel m = oracle::random_model(14, 4, 2, 2);
  EXPECT_THROW(backward_per_sample(m, std::vector<double>(4, 0.5), 2),
               ContractViolation);
}

TEST(Backward, NonFiniteIsNamed) {
  AttackModel m = oracle::random_model(15, 4, 2, 2);
  m.malicious.bias[0] = 1e308;
  m.head_weights(0, 0) = 1e308;
  try {
    backward_per_sample(m, std::vector<double>(4, 0.5), 0);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_FALSE(e.tensor().empty());
  }
}

TEST(Summed, SingletonEqualsPerSample) {
  const AttackModel m = oracle::random_model(16, 16, 8, 4);
  const LabeledBatch b = oracle::uniform_batch(17, 1, {4, 4, 1}, 4);
  EXPECT_EQ(backward_summed(m, b),
            backward_per_sample(m, b.images[0].pixels(), b.labels[0]));
}

TEST(Summed, EqualsSumOfPerSample) {
  const AttackModel m = oracle::random_model(18, 16, 8, 4);
  const LabeledBatch b = oracle::uniform_batch(19, 4, {4, 4, 1}, 4);
  const GradientReport summed = backward_summed(m, b);
  std::vector<double> expected(oracle::flatten(summed).size(), 0.0);
  for (std::size_t j = 0; j < b.size(); ++j) {
    const auto g = oracle::flatten(
        backward_per_sample(m, b.images[j].pixels(), b.labels[j]));
    for (std::size_t i = 0; i < g.size(); ++i) expected[i] += g[i];
  }
  const auto got = oracle::flatten(summed);
  for (std::size_t i = 0; i < got.size(); ++i) {
    ASSERT_NEAR(got[i], expected[i], 1e-9);
  }
  EXPECT_EQ(summed.batch_size, 4u);
}

TEST(Summed, DuplicateSampleDoublesReport) {
  const AttackModel m = oracle::random_model(20, 16, 8, 4);
  LabeledBatch b = oracle::uniform_batch(21, 1, {4, 4, 1}, 4);
  const GradientReport single = backward_summed(m, b);
  b.images.push_back(b.images[0]);
  b.labels.push_back(b.labels[0]);
  const GradientReport twice = backward_summed(m, b);
  const auto s = oracle::flatten(single);
  const auto t = oracle::flatten(twice);
  for (std::size_t i = 0; i < s.size(); ++i) ASSERT_EQ(t[i], 2.0 * s[i]);
}

TEST(Summed, Deterministic) {
  const AttackModel m = oracle::random_model(22, 16, 8, 4);
  const LabeledBatch b = oracle::uniform_batch(23, 6, {4, 4, 1}, 4);
  EXPECT_EQ(backward_summed(m, b), backward_summed(m, b));
}

TEST(Sgd, ZeroEtaAndZeroReportAreNoOps) {
  const AttackModel m = oracle::random_model(24, 16, 8, 4);
  const LabeledBatch b = oracle::uniform_batch(25, 4, {4, 4, 1}, 4);
  const GradientReport g = backward_summed(m, b);
  EXPECT_EQ(sgd_step(m, g, 0.0), m);
  EXPECT_EQ(sgd_step(m, scale_report(g, 0.0), 0.5), m);
  EXPECT_THROW(sgd_step(m, g, -1.0), ContractViolation);
}

TEST(Sgd, SmallStepDecreasesLoss) {
  const AttackModel m = oracle::random_model(26, 16, 8, 4);
  const LabeledBatch b = oracle::uniform_batch(27, 8, {4, 4, 1}, 4);
  const GradientReport g = backward_summed(m, b);
  const AttackModel next = sgd_step(m, g, 1e-3);
  EXPECT_LT(batch_loss(next, b), batch_loss(m, b));
}

TEST(Sgd, UpdatesEveryParameter) {
  const AttackModel m = oracle::random_model(28, 4, 2, 2);
  const LabeledBatch b = oracle::uniform_batch(29, 2, {2, 2, 1}, 2);
  const GradientReport g = backward_summed(m, b);
  const AttackModel next = sgd_step(m, g, 0.1);
  const auto before = oracle::flatten(GradientReport{
      m.malicious.weights, m.malicious.bias, m.head_weights, m.head_bias, 0, 0});
  const auto after = oracle::flatten(GradientReport{next.malicious.weights,
                                                    next.malicious.bias,
                                                    next.head_weights,
                                                    next.head_bias, 0, 0});
  const auto grads = oracle::flatten(g);
  for (std::size_t i = 0; i < grads.size(); ++i) {
    EXPECT_EQ(after[i], before[i] - 0.1 * grads[i]);
  }
}

// Four classes, each brightening its own quadrant.
LabeledBatch quadrant_task(std::uint64_t seed, std::size_t count) {
  LabeledBatch b = oracle::uniform_batch(seed, count, {8, 8, 1}, 4, 0.0, 0.6);
  for (std::size_t j = 0; j < count; ++j) {
    std::vector<double> p(b.images[j].pixels().begin(), b.images[j].pixels().end());
    const std::size_t q = b.labels[j];
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) {
        p[(r + 4 * (q / 2)) * 8 + c + 4 * (q % 2)] += 0.4;
      }
    }
    b.images[j] = Image(b.images[j].shape(), std::move(p));
  }
  return b;
}

// Least-squares one-vs-rest classifier with a bias column; returns
// training accuracy.
double least_squares_accuracy(const LabeledBatch& b, std::size_t classes) {
  const std::size_t d = b.shape().size() + 1;
  Matrix gram(d, d);
  std::vector<Vector> rhs(classes, Vector(d));
  for (std::size_t j = 0; j < b.size(); ++j) {
    std::vector<double> x(b.images[j].pixels().begin(), b.images[j].pixels().end());
    x.push_back(1.0);
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = 0; q < d; ++q) gram(p, q) += x[p] * x[q];
      rhs[b.labels[j]][p] += x[p];
    }
  }
  std::vector<Vector> w;
  for (const Vector& r : rhs) w.push_back(solve_spd(gram, r, 1e-6));
  std::size_t correct = 0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    std::vector<double> x(b.images[j].pixels().begin(), b.images[j].pixels().end());
    x.push_back(1.0);
    std::size_t best = 0;
    double best_score = -1e300;
    for (std::size_t c = 0; c < classes; ++c) {
      const double s = dot(w[c].span(), x);
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    correct += best == b.labels[j];
  }
  return static_cast<double>(correct) / static_cast<double>(b.size());
}

TEST(TrainEval, SeparableTaskReachesNinetyPercent) {
  const LabeledBatch train = quadrant_task(30, 160);
  const LabeledBatch test = quadrant_task(31, 80);
  ASSERT_EQ(least_squares_accuracy(train, 4), 1.0);
  TrainOptions opt;
  opt.seed = 5;
  EXPECT_GE(train_eval(train, test, opt, suite("none")), 0.9);
}

TEST(TrainEval, ZeroEpochsIsReproducibleInitialAccuracy) {
  const LabeledBatch train = quadrant_task(32, 40);
  const LabeledBatch test = quadrant_task(33, 40);
  TrainOptions opt;
  opt.epochs = 0;
  opt.seed = 9;
  const double a = train_eval(train, test, opt, suite("none"));
  EXPECT_EQ(a, train_eval(train, test, opt, suite("major-rotation")));
  Rng rng(derive_seed(9, 0));
  const AttackModel init = init_model(64, opt.hidden_units, 4, rng);
  EXPECT_EQ(a, accuracy(init, test));
}

TEST(TrainEval, MajorRotationStaysClose) {
  const Shape shape{16, 16, 1};
  const LabeledBatch train = cli::gen_synthetic(40, 256, shape, 4);
  const LabeledBatch test = cli::gen_synthetic(41, 256, shape, 4);
  TrainOptions opt;
  opt.seed = 3;
  const double base = train_eval(train, test, opt, suite("none"));
  const double rot = train_eval(train, test, opt, suite("major-rotation"));
  EXPECT_LE(std::abs(base - rot), 0.06);
}

TEST(TrainEval, EmptySetsThrow) {
  TrainOptions opt;
  EXPECT_THROW(train_eval(LabeledBatch{}, quadrant_task(1, 4), opt, suite("none")),
               ContractViolation);
}

}  // namespace
}  // namespace gradlens
