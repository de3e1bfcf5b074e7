// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "matgrad/gradient.hpp"
#include "support/test_support.hpp"

namespace matgrad {
namespace {

testing::RandomNetwork sigmoid_network(std::mt19937_64& rng, std::size_t min_depth = 1) {
  const std::size_t k = testing::uniform_int(rng, min_depth, 5);
  std::vector<std::size_t> dims(k + 1, 1);
  for (std::size_t i = 0; i < k; ++i) dims[i] = testing::uniform_int(rng, 1, 6);
  std::vector<LayerActivation> acts;
  for (std::size_t i = 1; i <= k; ++i) acts.push_back(LayerActivation::uniform(catalog_lookup("sigmoid"), dims[i]));
  NetworkSpec spec(dims, std::move(acts));
  WeightSet w = init_weights(spec, rng(), 1.0);
  ColumnVector x = testing::random_column(rng, dims[0]);
  return {std::move(spec), std::move(w), std::move(x)};
}

TEST(SigmaGradient, MatchesEntrywiseAdjoints) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; ++t) {
    const auto net = sigmoid_network(rng, 2);
    const ForwardTrace tr = forward(net.spec, net.weights, net.input);
    std::vector<std::vector<double>> adj;
    testing::oracle_gradient(net.spec, net.weights, testing::as_std(net.input), &adj);
    const SigmaGradient g = sigma_gradient_fd(net.spec, tr, net.weights);
    ASSERT_EQ(g.columns.size(), net.spec.layers() - 1);
    for (std::size_t r = 1; r < net.spec.layers(); ++r) {
      ASSERT_EQ(g.at(r).dim(), adj[r].size());
      for (std::size_t j = 0; j < adj[r].size(); ++j) {
        EXPECT_LE(scaled_error(g.at(r)[j], adj[r][j], kFdTolerance), kFdTolerance.rel);
      }
    }
  }
}

TEST(Identities, HoldOnRandomSigmoidNetworks) {
  std::mt19937_64 rng(606);
  for (int t = 0; t < 50; ++t) {
    const auto net = sigmoid_network(rng);
    const ForwardTrace tr = forward(net.spec, net.weights, net.input);
    const IdentityReport rep = check_proof_identities(net.spec, tr, net.weights);
    EXPECT_TRUE(rep.passed) << "trial " << t;
    EXPECT_EQ(rep.weight_identity.size(), net.spec.layers());
    EXPECT_EQ(rep.sigma_recurrence.size(), net.spec.layers() - 1);
    EXPECT_LE(rep.max_weight_identity, kFdTolerance.rel);
    EXPECT_LE(rep.max_sigma_recurrence, kFdTolerance.rel);
  }
}

TEST(Identities, SingleLayerHasNoInteriorLayers) {
  const auto spec = NetworkSpec::uniform({3, 1}, catalog_lookup("sigmoid"));
  const WeightSet w = init_weights(spec, 4);
  const ForwardTrace tr = forward(spec, w, ColumnVector{0.1, 0.2, 0.3});
  const IdentityReport rep = check_proof_identities(spec, tr, w);
  EXPECT_FALSE(rep.has_interior_layers());
  EXPECT_TRUE(rep.sigma_gradient.columns.empty());
  ASSERT_EQ(rep.weight_identity.size(), 1u);
  EXPECT_TRUE(rep.passed);
}

TEST(Identities, ReportFailureWithoutThrowing) {
  // A tolerance far below the finite-difference noise must flag the sigma
  // recurrence as failed rather than throw.
  std::mt19937_64 rng(7);
  const auto net = sigmoid_network(rng, 3);
  const ForwardTrace tr = forward(net.spec, net.weights, net.input);
  const IdentityReport rep = check_proof_identities(net.spec, tr, net.weights, 1e-1, {1e-15, 1e-300});
  EXPECT_FALSE(rep.passed);
}

}  // namespace
}  // namespace matgrad
