// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "matgrad/trainer.hpp"
#include "support/test_support.hpp"

namespace matgrad {
namespace {

const Activation& act(std::string_view n) { return catalog_lookup(n); }

Dataset random_dataset(std::mt19937_64& rng, std::size_t dim, std::size_t n) {
  std::vector<ColumnVector> xs;
  std::vector<double> ys;
  for (std::size_t s = 0; s < n; ++s) {
    xs.push_back(testing::random_column(rng, dim));
    ys.push_back(testing::uniform(rng, -1, 1));
  }
  return Dataset(std::move(xs), std::move(ys));
}

// Linear target y = 2 x1 - x2 + 1 sampled at 50 points of [-1, 1]².
Dataset linear_dataset() {
  std::mt19937_64 rng(2718);
  std::vector<ColumnVector> xs;
  std::vector<double> ys;
  for (int s = 0; s < 50; ++s) {
    const double a = testing::uniform(rng, -1, 1), b = testing::uniform(rng, -1, 1);
    xs.push_back(ColumnVector{a, b});
    ys.push_back(2 * a - b + 1);
  }
  return Dataset(std::move(xs), std::move(ys));
}

TEST(Dataset, Validation) {
  EXPECT_THROW(Dataset({}, {}), std::invalid_argument);
  EXPECT_THROW(Dataset({ColumnVector{1}}, {1, 2}), std::invalid_argument);
  EXPECT_THROW(Dataset({ColumnVector{1}, ColumnVector{1, 2}}, {1, 2}), std::invalid_argument);
  EXPECT_THROW(Dataset({ColumnVector{1}}, {NAN}), std::invalid_argument);
}

TEST(LossGrad, ZeroResidualGivesZeroGradient) {
  const auto spec = NetworkSpec::uniform({2, 3, 1}, act("tanh"));
  const WeightSet w = init_weights(spec, 3);
  const ColumnVector x{0.3, -0.1};
  const LossGradient lg = loss_grad(spec, w, x, evaluate(spec, w, x));
  EXPECT_EQ(lg.loss, 0.0);
  for (const Matrix& m : lg.gradient.matrices())
    for (double v : m.data()) EXPECT_EQ(v, 0.0);
}

TEST(LossGrad, SingleWeightByHand) {
  const auto spec = NetworkSpec::uniform({1, 1}, act("identity"));
  const LossGradient lg = loss_grad(spec, WeightSet({Matrix{{0.0}}}), ColumnVector{1.0}, 1.0);
  EXPECT_EQ(lg.loss, 0.5);
  EXPECT_EQ(lg.gradient.layer(1), (Matrix{{-1.0}}));
}

TEST(LossGrad, MatchesFiniteDifferenceOfLoss) {
  std::mt19937_64 rng(17);
  testing::RandomNetworkOptions opt;
  opt.smooth_only = true;
  const double h = 1e-5;
  for (int t = 0; t < 30; ++t) {
    const auto net = testing::random_network(rng, opt);
    const double y = testing::uniform(rng, -1, 1);
    const LossGradient lg = loss_grad(net.spec, net.weights, net.input, y);
    auto loss_at = [&](const WeightSet& w) {
      const double r = testing::oracle_forward(net.spec, w, testing::as_std(net.input)) - y;
      return 0.5 * r * r;
    };
    for (std::size_t i = 1; i <= net.spec.layers(); ++i) {
      for (std::size_t e = 0; e < net.weights.layer(i).size(); ++e) {
        const Matrix& m = net.weights.layer(i);
        const std::size_t r = e / m.cols(), c = e % m.cols();
        std::vector<double> pd(m.data().begin(), m.data().end()), md = pd;
        pd[e] += h;
        md[e] -= h;
        std::vector<Matrix> plus(net.weights.matrices().begin(), net.weights.matrices().end()), minus = plus;
        plus[i - 1] = Matrix(m.rows(), m.cols(), pd);
        minus[i - 1] = Matrix(m.rows(), m.cols(), md);
        const double fd = (loss_at(WeightSet(plus)) - loss_at(WeightSet(minus))) / (2 * h);
        EXPECT_LE(scaled_error(lg.gradient.layer(i)(r, c), fd, kFdTolerance), kFdTolerance.rel);
      }
    }
  }
}

TEST(MeanLoss, MatchesDirectSum) {
  std::mt19937_64 rng(5);
  const auto net = testing::random_network(rng);
  const Dataset data = random_dataset(rng, net.spec.input_dim(), 37);
  double sum = 0.0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const double r = testing::oracle_forward(net.spec, net.weights, testing::as_std(data.input(s))) - data.target(s);
    sum += 0.5 * r * r;
  }
  EXPECT_NEAR(mean_loss(net.spec, net.weights, data, false), sum / 37.0, 1e-14);
}

TEST(Train, ZeroEpochsLeavesWeights) {
  std::mt19937_64 rng(6);
  const auto net = testing::random_network(rng);
  const Dataset data = random_dataset(rng, net.spec.input_dim(), 5);
  TrainConfig cfg;
  cfg.epochs = 0;
  const TrainReport rep = train(net.spec, net.weights, data, cfg);
  EXPECT_TRUE(rep.loss.empty());
  EXPECT_TRUE(rep.grad_norm.empty());
  EXPECT_EQ(rep.weights, net.weights);
}

TEST(Train, SmallStepDoesNotIncreaseLoss) {
  std::mt19937_64 rng(1234);
  testing::RandomNetworkOptions opt;
  opt.smooth_only = true;
  for (int t = 0; t < 100; ++t) {
    const auto net = testing::random_network(rng, opt);
    const Dataset data = random_dataset(rng, net.spec.input_dim(), 8);
    TrainConfig cfg;
    cfg.learning_rate = 1e-4;
    cfg.epochs = 1;
    const TrainReport rep = train(net.spec, net.weights, data, cfg);
    const double before = mean_loss(net.spec, net.weights, data, false);
    const double after = mean_loss(net.spec, rep.weights, data, false);
    ASSERT_EQ(rep.loss.size(), 1u);
    EXPECT_EQ(rep.loss[0], before);
    EXPECT_LE(after - before, 1e-12) << "trial " << t;
  }
}

TEST(Train, StepIsMeanGradientDescent) {
  const auto spec = NetworkSpec::uniform({1, 1}, act("identity"));
  const Dataset data({ColumnVector{1.0}, ColumnVector{2.0}}, {1.0, 0.0});
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.epochs = 1;
  // residuals -1 and 0 → mean gradient (-1·1 + 0·2)/2 = -0.5, step +0.25
  const TrainReport rep = train(spec, WeightSet({Matrix{{0.0}}}), data, cfg);
  EXPECT_EQ(rep.weights.layer(1), (Matrix{{0.25}}));
  EXPECT_EQ(rep.loss[0], 0.25);
  EXPECT_EQ(rep.grad_norm[0], 0.5);
}

TEST(Train, EnginesGiveMatchingTrajectories) {
  std::mt19937_64 rng(77);
  testing::RandomNetworkOptions opt;
  opt.smooth_only = true;
  for (int t = 0; t < 10; ++t) {
    const auto net = testing::random_network(rng, opt);
    const Dataset data = random_dataset(rng, net.spec.input_dim(), 10);
    TrainConfig cfg;
    cfg.epochs = 100;
    cfg.learning_rate = 0.05;
    const TrainReport a = train(net.spec, net.weights, data, cfg);
    cfg.engine = Engine::kronecker;
    const TrainReport b = train(net.spec, net.weights, data, cfg);
    cfg.engine = Engine::diagonal;
    const TrainReport c = train(net.spec, net.weights, data, cfg);
    for (std::size_t e = 0; e < 100; ++e) {
      EXPECT_LE(scaled_error(a.loss[e], b.loss[e], {1e-9, 1e-300}), 1e-9);
      EXPECT_LE(scaled_error(a.loss[e], c.loss[e], {1e-9, 1e-300}), 1e-9);
    }
  }
}

TEST(Train, Deterministic) {
  std::mt19937_64 rng(9);
  const auto net = testing::random_network(rng);
  const Dataset data = random_dataset(rng, net.spec.input_dim(), 12);
  TrainConfig cfg;
  cfg.epochs = 20;
  const TrainReport a = train(net.spec, net.weights, data, cfg), b = train(net.spec, net.weights, data, cfg);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.weights, b.weights);
}

TEST(Train, DivergenceNamesEpoch) {
  const auto spec = NetworkSpec::uniform({1, 1}, act("identity"));
  const Dataset data({ColumnVector{10.0}}, {1.0});
  TrainConfig cfg;
  cfg.learning_rate = 1e3;
  cfg.epochs = 1000;
  try {
    train(spec, WeightSet({Matrix{{0.0}}}), data, cfg);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.epoch(), 0u);
    EXPECT_LT(e.epoch(), 1000u);
  }
}

TEST(Train, RejectsNonPositiveLearningRate) {
  const auto spec = NetworkSpec::uniform({1, 1}, act("identity"));
  const Dataset data({ColumnVector{1.0}}, {1.0});
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(train(spec, WeightSet({Matrix{{0.0}}}), data, cfg), std::invalid_argument);
}

TEST(Train, AffineLinearRegressionRecoversCoefficients) {
  const Dataset data = linear_dataset();
  const std::vector<std::size_t> dims{2, 1};
  const std::vector<LayerActivation> acts{LayerActivation::uniform(act("identity"), 1)};
  const AffineNetwork net = embed_affine(dims, acts, 1);
  TrainConfig cfg;
  cfg.affine = true;
  cfg.learning_rate = 0.5;
  cfg.epochs = 1000;
  const TrainReport rep = train(net.spec, net.weights, data, cfg);

  testing::Dense features;
  std::vector<double> targets;
  for (std::size_t s = 0; s < data.size(); ++s) {
    features.push_back({data.input(s)[0], data.input(s)[1], 1.0});
    targets.push_back(data.target(s));
  }
  const auto ls = testing::least_squares(features, targets);
  const Matrix& w = rep.weights.layer(1);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_NEAR(w(0, c), ls[c], 1e-6);
    EXPECT_NEAR(w(0, c), (std::vector<double>{2, -1, 1})[c], 1e-6);
  }
}

TEST(Train, FrozenRowsStayBitIdentical) {
  std::mt19937_64 rng(41);
  const std::vector<std::size_t> dims{3, 4, 2, 1};
  const std::vector<LayerActivation> acts{LayerActivation::uniform(act("tanh"), 4),
                                          LayerActivation::uniform(act("sigmoid"), 2),
                                          LayerActivation::uniform(act("identity"), 1)};
  const AffineNetwork net = embed_affine(dims, acts, 5);
  const Dataset data = random_dataset(rng, 3, 20);
  TrainConfig cfg;
  cfg.affine = true;
  cfg.epochs = 200;
  const TrainReport rep = train(net.spec, net.weights, data, cfg);
  EXPECT_EQ(rep.weights.frozen_mask(), net.weights.frozen_mask());
  std::size_t frozen = 0, moved = 0;
  for (std::size_t i = 1; i <= net.spec.layers(); ++i) {
    const Matrix &before = net.weights.layer(i), &after = rep.weights.layer(i);
    for (std::size_t r = 0; r < before.rows(); ++r)
      for (std::size_t c = 0; c < before.cols(); ++c) {
        if (net.weights.frozen(i, r, c)) {
          ++frozen;
          EXPECT_EQ(std::bit_cast<std::uint64_t>(after(r, c)), std::bit_cast<std::uint64_t>(before(r, c)));
        } else if (after(r, c) != before(r, c)) {
          ++moved;
        }
      }
  }
  EXPECT_EQ(frozen, 4u + 5u);  // last rows of W_1 (5x4) and W_2 (3x5)
  EXPECT_GT(moved, 0u);
}

TEST(Train, XorWithOneHiddenTanhLayer) {
  const Dataset data({ColumnVector{0, 0}, ColumnVector{0, 1}, ColumnVector{1, 0}, ColumnVector{1, 1}},
                     {0, 1, 1, 0});
  const std::vector<std::size_t> dims{2, 4, 1};
  const std::vector<LayerActivation> acts{LayerActivation::uniform(act("tanh"), 4),
                                          LayerActivation::uniform(act("identity"), 1)};
  const AffineNetwork net = embed_affine(dims, acts, 3, 1.0);
  TrainConfig cfg;
  cfg.affine = true;
  cfg.learning_rate = 0.2;
  cfg.epochs = 2000;
  const TrainReport rep = train(net.spec, net.weights, data, cfg);
  double mse = 0.0;
  for (std::size_t s = 0; s < data.size(); ++s) {
    const double r = evaluate(net.spec, rep.weights, lift_input(data.input(s))) - data.target(s);
    mse += r * r / 4.0;
  }
  EXPECT_LT(mse, 0.05);
}

}  // namespace
}  // namespace matgrad
