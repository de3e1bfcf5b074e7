// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "matgrad/gradient.hpp"
#include "matgrad/network.hpp"

namespace matgrad {

// Regression samples. Inputs have the network's input dimension, or one less
// when training an affine embedding (the constant coordinate is added by train).
class Dataset {
 public:
  Dataset(std::vector<ColumnVector> inputs, std::vector<double> targets);

  std::size_t size() const noexcept { return targets_.size(); }
  const ColumnVector& input(std::size_t i) const { return inputs_.at(i); }
  double target(std::size_t i) const { return targets_.at(i); }

 private:
  std::vector<ColumnVector> inputs_;
  std::vector<double> targets_;
};

enum class Loss { mse };

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;  // seed that produced the initial weights, echoed in the report
  Loss loss = Loss::mse;
  bool affine = false;
  Engine engine = Engine::recursive;
};

struct TrainReport {
  std::vector<double> loss;       // mean loss at the start of each epoch
  std::vector<double> grad_norm;  // Frobenius norm of the applied mean gradient
  WeightSet weights;
  std::uint64_t seed = 0;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t epoch, const std::string& detail);
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

struct LossGradient {
  double loss;
  GradientSet gradient;
};

// loss = ½ (f(x) - target)², gradient = (f(x) - target) ∇_W f.
LossGradient loss_grad(const NetworkSpec& spec, const WeightSet& w, const ColumnVector& x,
                       double target, Engine engine = Engine::recursive);

// Mean of ½ (f(x) - y)² over the dataset; inputs are lifted when affine is set.
double mean_loss(const NetworkSpec& spec, const WeightSet& w, const Dataset& data, bool affine);

// Full-batch gradient descent on the mean loss. Per-sample gradients are
// summed pairwise in index order, frozen entries get a zero gradient, and a
// non-finite loss or weight aborts with the epoch index (0-based).
TrainReport train(const NetworkSpec& spec, const WeightSet& w0, const Dataset& data,
                  const TrainConfig& cfg);

}  // namespace matgrad
