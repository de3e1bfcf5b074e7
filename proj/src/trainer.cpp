// SPDX-License-Identifier: Apache-2.0
#include "matgrad/trainer.hpp"

#include <cmath>
#include <span>

namespace matgrad {

Dataset::Dataset(std::vector<ColumnVector> inputs, std::vector<double> targets)
    : inputs_(std::move(inputs)), targets_(std::move(targets)) {
  if (inputs_.empty()) throw std::invalid_argument("Dataset: no samples");
  if (inputs_.size() != targets_.size()) {
    throw std::invalid_argument("Dataset: " + std::to_string(inputs_.size()) + " inputs but " +
                                std::to_string(targets_.size()) + " targets");
  }
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    if (!std::isfinite(targets_[i])) {
      throw std::invalid_argument("Dataset: non-finite target in sample " + std::to_string(i));
    }
    if (inputs_[i].dim() != inputs_.front().dim()) {
      throw std::invalid_argument("Dataset: sample " + std::to_string(i) + " has dimension " +
                                  std::to_string(inputs_[i].dim()) + ", expected " +
                                  std::to_string(inputs_.front().dim()));
    }
  }
}

DivergenceError::DivergenceError(std::size_t epoch, const std::string& detail)
    : std::runtime_error("training diverged at epoch " + std::to_string(epoch) + ": " + detail),
      epoch_(epoch) {}

LossGradient loss_grad(const NetworkSpec& spec, const WeightSet& w, const ColumnVector& x,
                       double target, Engine engine) {
  const ForwardTrace trace = forward(spec, w, x);
  const double residual = trace.output - target;
  const GradientSet g = compute_gradient(engine, trace, w);
  std::vector<Matrix> scaled;
  scaled.reserve(g.layers());
  for (const Matrix& m : g.matrices()) {
    scaled.push_back(kronecker(Matrix::from_scalar(residual), m));
  }
  return {0.5 * residual * residual, GradientSet(std::move(scaled))};
}

namespace {

ColumnVector prepare(const ColumnVector& x, bool affine) { return affine ? lift_input(x) : x; }

// Per-sample loss followed by the flattened gradient.
using Flat = std::vector<double>;

void add_into(Flat& acc, const Flat& other) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += other[i];
}

// Sums items[lo, hi) pairwise; the split points depend only on the range.
Flat pairwise_sum(std::span<Flat> items) {
  if (items.size() == 1) return items.front();
  const std::size_t mid = items.size() / 2;
  Flat left = pairwise_sum(items.first(mid));
  add_into(left, pairwise_sum(items.subspan(mid)));
  return left;
}

}  // namespace

double mean_loss(const NetworkSpec& spec, const WeightSet& w, const Dataset& data, bool affine) {
  std::vector<Flat> losses;
  losses.reserve(data.size());
  for (std::size_t s = 0; s < data.size(); ++s) {
    const double r = evaluate(spec, w, prepare(data.input(s), affine)) - data.target(s);
    losses.push_back({0.5 * r * r});
  }
  return pairwise_sum(losses).front() / static_cast<double>(data.size());
}

TrainReport train(const NetworkSpec& spec, const WeightSet& w0, const Dataset& data,
                  const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("train: learning rate must be positive");
  w0.check_against(spec);
  const std::size_t want_dim = cfg.affine ? spec.input_dim() - 1 : spec.input_dim();
  if (data.input(0).dim() != want_dim) {
    throw ShapeError("train", data.input(0).shape(), Shape{want_dim, 1});
  }

  TrainReport report{{}, {}, w0, cfg.seed};
  report.loss.reserve(cfg.epochs);
  report.grad_norm.reserve(cfg.epochs);
  const double n = static_cast<double>(data.size());

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const WeightSet& w = report.weights;
    std::vector<Flat> per_sample;
    per_sample.reserve(data.size());
    try {
      for (std::size_t s = 0; s < data.size(); ++s) {
        const LossGradient lg = loss_grad(spec, w, prepare(data.input(s), cfg.affine),
                                          data.target(s), cfg.engine);
        Flat flat{lg.loss};
        for (const Matrix& m : lg.gradient.matrices()) flat.insert(flat.end(), m.data().begin(), m.data().end());
        per_sample.push_back(std::move(flat));
      }
    } catch (const NonFiniteIntermediateError& e) {
      throw DivergenceError(epoch, e.what());
    } catch (const NonFiniteError& e) {
      throw DivergenceError(epoch, e.what());
    }
    const Flat total = pairwise_sum(per_sample);
    const double loss = total[0] / n;
    if (!std::isfinite(loss)) throw DivergenceError(epoch, "loss is not finite");

    std::vector<Matrix> next;
    next.reserve(w.layers());
    double norm2 = 0.0;
    std::size_t offset = 1;
    for (std::size_t l = 1; l <= w.layers(); ++l) {
      const Matrix& m = w.layer(l);
      std::vector<double> e(m.data().begin(), m.data().end());
      for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
          const std::size_t idx = r * m.cols() + c;
          const double g = w.frozen(l, r, c) ? 0.0 : total[offset + idx] / n;
          norm2 += g * g;
          e[idx] = m.data()[idx] - cfg.learning_rate * g;
        }
      }
      offset += m.size();
      try {
        next.emplace_back(m.rows(), m.cols(), std::move(e));
      } catch (const NonFiniteError& err) {
        throw DivergenceError(epoch, err.what());
      }
    }
    report.loss.push_back(loss);
    report.grad_norm.push_back(std::sqrt(norm2));
    report.weights = w.with_layers(std::move(next));
  }
  return report;
}

}  // namespace matgrad
