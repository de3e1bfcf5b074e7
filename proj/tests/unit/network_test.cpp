// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "matgrad/network.hpp"
#include "support/test_support.hpp"

namespace matgrad {
namespace {

const Activation& act(std::string_view n) { return catalog_lookup(n); }

TEST(NetworkSpec, Validation) {
  EXPECT_THROW(NetworkSpec::uniform({3}, act("identity")), SpecError);
  EXPECT_THROW(NetworkSpec::uniform({3, 0, 1}, act("identity")), std::invalid_argument);
  try {
    NetworkSpec::uniform({3, 2}, act("identity"));
    FAIL();
  } catch (const SpecError& e) {
    EXPECT_STREQ(e.what(), "output dimension must be 1");
  }
  EXPECT_THROW(NetworkSpec({2, 1}, {LayerActivation::uniform(act("tanh"), 2)}), SpecError);
  EXPECT_THROW(NetworkSpec({2, 3, 1}, {LayerActivation::uniform(act("tanh"), 3)}), SpecError);
  const auto spec = NetworkSpec::uniform({3, 4, 2, 1}, act("sigmoid"));
  EXPECT_EQ(spec.layers(), 3u);
  EXPECT_EQ(spec.weight_shape(1), (Shape{4, 3}));
  EXPECT_EQ(spec.weight_shape(3), (Shape{1, 2}));
}

TEST(Forward, SingleLinearLayer) {
  const auto spec = NetworkSpec::uniform({1, 1}, act("identity"));
  const ForwardTrace t = forward(spec, WeightSet({Matrix{{3}}}), ColumnVector{2});
  EXPECT_EQ(t.output, 6.0);
}

TEST(Forward, SumOfCoordinates) {
  const auto spec = NetworkSpec::uniform({2, 2, 1}, act("identity"));
  const WeightSet w({Matrix::identity(2), Matrix{{1, 1}}});
  EXPECT_EQ(forward(spec, w, ColumnVector{1, 2}).output, 3.0);
}

TEST(Forward, KOneIdentityIsLinearFunction) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = testing::uniform_int(rng, 1, 8);
    const auto spec = NetworkSpec::uniform({n, 1}, act("identity"));
    const WeightSet w = init_weights(spec, rng());
    const ColumnVector x = testing::random_column(rng, n);
    EXPECT_EQ(forward(spec, w, x).output, as_scalar(matmul(w.layer(1), x)));
  }
}

TEST(Forward, MatchesNestedLoopOracle) {
  std::vector<LayerActivation> acts{LayerActivation::uniform(act("sigmoid"), 4),
                                    LayerActivation::uniform(act("sigmoid"), 2),
                                    LayerActivation::uniform(act("identity"), 1)};
  const NetworkSpec spec({3, 4, 2, 1}, acts);
  const WeightSet w = init_weights(spec, 2024);
  const ColumnVector x{0.3, -0.7, 0.9};
  const double want = testing::oracle_forward(spec, w, {0.3, -0.7, 0.9});
  EXPECT_NEAR(forward(spec, w, x).output, want, 1e-15);
}

TEST(Forward, TraceIsConsistent) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto net = testing::random_network(rng);
    const ForwardTrace tr = forward(net.spec, net.weights, net.input);
    ASSERT_EQ(tr.layers(), net.spec.layers());
    EXPECT_EQ(tr.n(1), matmul(net.weights.layer(1), net.input));
    for (std::size_t i = 1; i < net.spec.layers(); ++i) {
      EXPECT_EQ(tr.n(i + 1), matmul(net.weights.layer(i + 1), tr.sigma(i)));
    }
    for (std::size_t i = 1; i <= net.spec.layers(); ++i) {
      EXPECT_EQ(tr.sigma(i), apply(net.spec.activation(i), tr.n(i)));
      EXPECT_EQ(tr.sigma_prime(i), apply_derivative(net.spec.activation(i), tr.n(i)));
    }
    EXPECT_EQ(tr.output, as_scalar(tr.sigma(net.spec.layers())));
    EXPECT_EQ(evaluate(net.spec, net.weights, net.input), tr.output);
  }
}

TEST(Forward, ShapeErrors) {
  const auto spec = NetworkSpec::uniform({2, 3, 1}, act("tanh"));
  const WeightSet w = init_weights(spec, 1);
  EXPECT_THROW(forward(spec, w, ColumnVector{1, 2, 3}), ShapeError);
  EXPECT_THROW(forward(spec, WeightSet({Matrix::zeros(3, 3), Matrix::zeros(1, 3)}), ColumnVector{1, 2}),
               ShapeError);
}

TEST(Forward, OverflowReportsLayer) {
  const auto spec = NetworkSpec::uniform({1, 1, 1}, act("identity"));
  const WeightSet w({Matrix{{1e200}}, Matrix{{1e200}}});
  try {
    forward(spec, w, ColumnVector{1.0});
    FAIL() << "expected overflow";
  } catch (const NonFiniteIntermediateError& e) {
    EXPECT_EQ(e.layer(), 2u);
  }
}

TEST(InitWeights, DeterministicAndInRange) {
  const auto spec = NetworkSpec::uniform({2, 2, 1}, act("tanh"));
  const WeightSet a = init_weights(spec, 42), b = init_weights(spec, 42);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, init_weights(spec, 43));
  for (double scale : {0.5, 2.0, 1e-3}) {
    const WeightSet w = init_weights(spec, 42, scale);
    for (const Matrix& m : w.matrices()) {
      for (double v : m.data()) {
        EXPECT_GE(v, -scale);
        EXPECT_LE(v, scale);
      }
    }
  }
  EXPECT_THROW(init_weights(spec, 42, 0.0), std::invalid_argument);
  EXPECT_THROW(init_weights(spec, 42, -1.0), std::invalid_argument);
}

TEST(LiftInput, AppendsOne) {
  EXPECT_EQ(lift_input(ColumnVector{1, 2}), (ColumnVector{1, 2, 1}));
  EXPECT_EQ(lift_input(ColumnVector{0}), (ColumnVector{0, 1}));
}

TEST(EmbedAffine, LinearRegressionShape) {
  const std::vector<std::size_t> dims{2, 1};
  const std::vector<LayerActivation> acts{LayerActivation::uniform(act("identity"), 1)};
  const AffineNetwork net = embed_affine(dims, acts, 7);
  EXPECT_EQ(net.spec.dims()[0], 3u);
  EXPECT_EQ(net.spec.dims()[1], 1u);
  const Matrix& w = net.weights.layer(1);
  const ColumnVector x{0.4, -1.3};
  EXPECT_NEAR(forward(net.spec, net.weights, lift_input(x)).output,
              w(0, 0) * 0.4 + w(0, 1) * -1.3 + w(0, 2), 1e-15);
  EXPECT_FALSE(net.weights.frozen(1, 0, 2));
}

TEST(EmbedAffine, HiddenLayerGetsFrozenFormalRow) {
  const std::vector<std::size_t> dims{3, 2, 1};
  const std::vector<LayerActivation> acts{LayerActivation::uniform(act("tanh"), 2),
                                          LayerActivation::uniform(act("identity"), 1)};
  const AffineNetwork net = embed_affine(dims, acts, 9);
  EXPECT_EQ(net.spec.width(0), 4u);
  EXPECT_EQ(net.spec.width(1), 3u);
  const Matrix& w1 = net.weights.layer(1);
  EXPECT_EQ(w1.row(2)[0], 0.0);
  EXPECT_EQ(w1.row(2)[1], 0.0);
  EXPECT_EQ(w1.row(2)[2], 0.0);
  EXPECT_EQ(w1.row(2)[3], 1.0);
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_TRUE(net.weights.frozen(1, 2, c));
    EXPECT_FALSE(net.weights.frozen(1, 0, c));
  }
  EXPECT_EQ(net.spec.activation(1)[2].name, "identity");
  EXPECT_EQ(net.spec.activation(1)[0].name, "tanh");
  // the formal neuron carries the constant through
  const ForwardTrace t = forward(net.spec, net.weights, lift_input(ColumnVector{0.1, 0.2, 0.3}));
  EXPECT_EQ(t.sigma(1)[2], 1.0);
}

TEST(EmbedAffine, MatchesDirectAffineForward) {
  std::mt19937_64 rng(77);
  for (int n = 0; n < 10; ++n) {
    const std::size_t k = testing::uniform_int(rng, 1, 4);
    std::vector<std::size_t> dims(k + 1, 1);
    for (std::size_t i = 0; i < k; ++i) dims[i] = testing::uniform_int(rng, 1, 6);
    std::vector<LayerActivation> acts;
    for (std::size_t i = 1; i <= k; ++i) acts.push_back(testing::random_layer_activation(rng, dims[i], false));
    const AffineNetwork net = embed_affine(dims, acts, rng());
    const AffineView view = affine_view(net.spec, net.weights);
    ASSERT_EQ(view.genuine_input_dim, dims[0]);

    std::vector<testing::OracleAffineLayer> oracle;
    for (std::size_t i = 1; i <= k; ++i) {
      const AffineLayer& l = view.layers[i - 1];
      ASSERT_EQ(l.weights.shape(), (Shape{dims[i], dims[i - 1]}));
      std::vector<std::string> names;
      for (const auto& a : acts[i - 1].entries()) names.emplace_back(a.name);
      oracle.push_back({testing::to_dense(l.weights),
                        std::vector<double>(l.bias.data().begin(), l.bias.data().end()), names});
    }
    for (int s = 0; s < 100; ++s) {
      const ColumnVector x = testing::random_column(rng, dims[0], -2.0, 2.0);
      const double hom = forward(net.spec, net.weights, lift_input(x)).output;
      const double aff = testing::oracle_affine_forward(oracle, {x.data().begin(), x.data().end()});
      EXPECT_LE(std::abs(hom - aff), 1e-12);
    }
  }
}

TEST(EmbedAffine, BiasIsLastColumnWithoutLastElement) {
  const std::vector<std::size_t> dims{2, 3, 1};
  const std::vector<LayerActivation> acts{LayerActivation::uniform(act("sigmoid"), 3),
                                          LayerActivation::uniform(act("identity"), 1)};
  const AffineNetwork net = embed_affine(dims, acts, 11);
  const AffineView view = affine_view(net.spec, net.weights);
  const Matrix& w1 = net.weights.layer(1);
  ASSERT_EQ(view.layers[0].bias.dim(), 3u);
  for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(view.layers[0].bias[r], w1(r, 2));
  EXPECT_EQ(view.layers[1].bias[0], net.weights.layer(2)(0, 3));
}

TEST(FreezeAffineRows, RejectsBrokenPattern) {
  const std::vector<std::size_t> dims{1, 1, 1};
  const std::vector<LayerActivation> acts{LayerActivation::uniform(act("tanh"), 1),
                                          LayerActivation::uniform(act("identity"), 1)};
  const AffineNetwork net = embed_affine(dims, acts, 3);
  const WeightSet plain(std::vector<Matrix>(net.weights.matrices().begin(), net.weights.matrices().end()));
  EXPECT_EQ(freeze_affine_rows(net.spec, plain).frozen_mask(), net.weights.frozen_mask());
  const WeightSet broken({Matrix{{0.1, 0.2}, {0.5, 1.0}}, net.weights.layer(2)});
  EXPECT_THROW(freeze_affine_rows(net.spec, broken), SpecError);
}

}  // namespace
}  // namespace matgrad
