// SPDX-License-Identifier: Apache-2.0
#include "matgrad/network.hpp"

#include <random>

namespace matgrad {

NonFiniteIntermediateError::NonFiniteIntermediateError(std::size_t layer, const std::string& detail)
    : std::domain_error("non-finite value in layer " + std::to_string(layer) + ": " + detail),
      layer_(layer) {}

NetworkSpec::NetworkSpec(std::vector<std::size_t> dims, std::vector<LayerActivation> activations)
    : dims_(std::move(dims)), activations_(std::move(activations)) {
  if (dims_.size() < 2) throw SpecError("network needs at least one layer (dims n_0..n_k, k >= 1)");
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i] == 0) throw SpecError("dimension n_" + std::to_string(i) + " must be positive");
  }
  if (dims_.back() != 1) throw SpecError("output dimension must be 1");
  if (activations_.size() != layers()) {
    throw SpecError("expected " + std::to_string(layers()) + " layer activations, got " +
                    std::to_string(activations_.size()));
  }
  for (std::size_t i = 1; i <= layers(); ++i) {
    if (activations_[i - 1].dim() != dims_[i]) {
      throw SpecError("layer " + std::to_string(i) + " has " +
                      std::to_string(activations_[i - 1].dim()) + " activations for width " +
                      std::to_string(dims_[i]));
    }
  }
}

NetworkSpec NetworkSpec::uniform(std::vector<std::size_t> dims, const Activation& act) {
  std::vector<LayerActivation> acts;
  for (std::size_t i = 1; i < dims.size(); ++i) acts.push_back(LayerActivation::uniform(act, dims[i]));
  return NetworkSpec(std::move(dims), std::move(acts));
}

bool NetworkSpec::is_scalar_chain() const noexcept {
  for (std::size_t d : dims_) {
    if (d != 1) return false;
  }
  return true;
}

WeightSet::WeightSet(std::vector<Matrix> layers, FrozenMask frozen)
    : layers_(std::move(layers)), frozen_(std::move(frozen)) {
  if (layers_.empty()) throw SpecError("weight set needs at least one matrix");
  if (!frozen_.empty()) {
    if (frozen_.size() != layers_.size()) throw SpecError("frozen mask must cover every layer");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      if (frozen_[i].size() != layers_[i].size()) {
        throw SpecError("frozen mask for layer " + std::to_string(i + 1) + " has wrong size");
      }
    }
  }
}

bool WeightSet::frozen(std::size_t layer, std::size_t r, std::size_t c) const {
  if (frozen_.empty()) return false;
  const Matrix& m = layers_.at(layer - 1);
  return frozen_[layer - 1][r * m.cols() + c];
}

WeightSet WeightSet::with_layers(std::vector<Matrix> layers) const {
  if (layers.size() != layers_.size()) throw SpecError("layer count changed");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].shape() != layers_[i].shape()) {
      throw ShapeError("with_layers", layers_[i].shape(), layers[i].shape());
    }
  }
  return WeightSet(std::move(layers), frozen_);
}

void WeightSet::check_against(const NetworkSpec& spec) const {
  if (layers_.size() != spec.layers()) {
    throw SpecError("weight set has " + std::to_string(layers_.size()) + " layers, network has " +
                    std::to_string(spec.layers()));
  }
  for (std::size_t i = 1; i <= spec.layers(); ++i) {
    if (layer(i).shape() != spec.weight_shape(i)) {
      throw ShapeError("W_" + std::to_string(i), layer(i).shape(), spec.weight_shape(i));
    }
  }
}

ForwardTrace forward(const NetworkSpec& spec, const WeightSet& w, const ColumnVector& x) {
  w.check_against(spec);
  if (x.dim() != spec.input_dim()) throw ShapeError("forward", x.shape(), Shape{spec.input_dim(), 1});

  ForwardTrace t{x, {}, {}, {}, 0.0};
  const std::size_t k = spec.layers();
  t.pre.reserve(k);
  t.activated.reserve(k);
  t.derivative.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) {
    try {
      t.pre.push_back(matmul(w.layer(i), t.sigma(i - 1)));
      t.activated.push_back(apply(spec.activation(i), t.pre.back()));
      t.derivative.push_back(apply_derivative(spec.activation(i), t.pre.back()));
    } catch (const NonFiniteError& e) {
      throw NonFiniteIntermediateError(i, e.what());
    }
  }
  t.output = as_scalar(t.activated.back());
  return t;
}

double evaluate_suffix(const NetworkSpec& spec, const WeightSet& w, std::size_t from,
                       const ColumnVector& sigma_from) {
  if (from >= spec.layers()) throw SpecError("evaluate_suffix: no layers after " + std::to_string(from));
  if (sigma_from.dim() != spec.width(from)) {
    throw ShapeError("evaluate_suffix", sigma_from.shape(), Shape{spec.width(from), 1});
  }
  ColumnVector s = sigma_from;
  for (std::size_t i = from + 1; i <= spec.layers(); ++i) {
    try {
      s = apply(spec.activation(i), matmul(w.layer(i), s));
    } catch (const NonFiniteError& e) {
      throw NonFiniteIntermediateError(i, e.what());
    }
  }
  return as_scalar(s);
}

double evaluate(const NetworkSpec& spec, const WeightSet& w, const ColumnVector& x) {
  w.check_against(spec);
  return evaluate_suffix(spec, w, 0, x);
}

WeightSet init_weights(const NetworkSpec& spec, std::uint64_t seed, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("init_weights: scale must be positive");
  std::mt19937_64 rng(seed);
  std::vector<Matrix> layers;
  layers.reserve(spec.layers());
  for (std::size_t i = 1; i <= spec.layers(); ++i) {
    const Shape s = spec.weight_shape(i);
    std::vector<double> e(s.rows * s.cols);
    for (double& v : e) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      v = scale * (2.0 * u - 1.0);
    }
    layers.emplace_back(s.rows, s.cols, std::move(e));
  }
  return WeightSet(std::move(layers));
}

ColumnVector lift_input(const ColumnVector& x_affine) {
  std::vector<double> e(x_affine.data().begin(), x_affine.data().end());
  e.push_back(1.0);
  return ColumnVector(std::move(e));
}

NetworkSpec affine_spec(std::span<const std::size_t> affine_dims,
                        std::span<const LayerActivation> affine_activations) {
  if (affine_dims.size() < 2) throw SpecError("affine network needs at least one layer");
  for (std::size_t d : affine_dims) {
    if (d == 0) throw SpecError("affine widths must be positive");
  }
  if (affine_dims.back() != 1) throw SpecError("output dimension must be 1");
  const std::size_t k = affine_dims.size() - 1;
  if (affine_activations.size() != k) {
    throw SpecError("expected " + std::to_string(k) + " layer activations, got " +
                    std::to_string(affine_activations.size()));
  }

  std::vector<std::size_t> dims(affine_dims.begin(), affine_dims.end());
  for (std::size_t i = 0; i < k; ++i) dims[i] += 1;

  std::vector<LayerActivation> acts;
  acts.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) {
    const LayerActivation& genuine = affine_activations[i - 1];
    if (genuine.dim() != affine_dims[i]) {
      throw SpecError("layer " + std::to_string(i) + " has " + std::to_string(genuine.dim()) +
                      " activations for width " + std::to_string(affine_dims[i]));
    }
    if (i == k) {
      acts.push_back(genuine);
      continue;
    }
    std::vector<Activation> entries(genuine.entries().begin(), genuine.entries().end());
    entries.push_back(catalog_lookup("identity"));
    acts.emplace_back(std::move(entries));
  }
  return NetworkSpec(std::move(dims), std::move(acts));
}

FrozenMask affine_frozen_mask(const NetworkSpec& spec) {
  FrozenMask mask;
  const std::size_t k = spec.layers();
  for (std::size_t i = 1; i <= k; ++i) {
    const Shape s = spec.weight_shape(i);
    std::vector<bool> m(s.rows * s.cols, false);
    if (i < k) {
      for (std::size_t c = 0; c < s.cols; ++c) m[(s.rows - 1) * s.cols + c] = true;
    }
    mask.push_back(std::move(m));
  }
  return mask;
}

AffineNetwork embed_affine(std::span<const std::size_t> affine_dims,
                           std::span<const LayerActivation> affine_activations,
                           std::uint64_t seed, double scale) {
  NetworkSpec spec = affine_spec(affine_dims, affine_activations);
  const WeightSet raw = init_weights(spec, seed, scale);

  std::vector<Matrix> layers;
  for (std::size_t i = 1; i <= spec.layers(); ++i) {
    const Matrix& m = raw.layer(i);
    if (i == spec.layers()) {
      layers.push_back(m);
      continue;
    }
    std::vector<double> e(m.data().begin(), m.data().end());
    const std::size_t last = (m.rows() - 1) * m.cols();
    for (std::size_t c = 0; c < m.cols(); ++c) e[last + c] = c + 1 == m.cols() ? 1.0 : 0.0;
    layers.emplace_back(m.rows(), m.cols(), std::move(e));
  }
  WeightSet weights(std::move(layers), affine_frozen_mask(spec));
  return {std::move(spec), std::move(weights)};
}

WeightSet freeze_affine_rows(const NetworkSpec& spec, WeightSet w) {
  w.check_against(spec);
  const std::size_t k = spec.layers();
  for (std::size_t i = 1; i < k; ++i) {
    const Matrix& m = w.layer(i);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double want = c + 1 == m.cols() ? 1.0 : 0.0;
      if (m(m.rows() - 1, c) != want) {
        throw SpecError("W_" + std::to_string(i) + " last row must be [0, ..., 0, 1] for an affine network");
      }
    }
    if (spec.activation(i)[spec.width(i) - 1].name != "identity") {
      throw SpecError("layer " + std::to_string(i) + " formal neuron must use the identity activation");
    }
  }
  std::vector<Matrix> layers(w.matrices().begin(), w.matrices().end());
  return WeightSet(std::move(layers), affine_frozen_mask(spec));
}

AffineView affine_view(const NetworkSpec& spec, const WeightSet& w) {
  w.check_against(spec);
  const std::size_t k = spec.layers();
  for (std::size_t i = 0; i < k; ++i) {
    if (spec.width(i) < 2) throw SpecError("affine view needs a formal neuron in every layer below the top");
  }
  AffineView view;
  view.genuine_input_dim = spec.input_dim() - 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const Matrix& m = w.layer(i);
    const std::size_t rows = i == k ? m.rows() : m.rows() - 1;
    const std::size_t cols = m.cols() - 1;
    std::vector<double> g;
    std::vector<double> b;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) g.push_back(m(r, c));
      b.push_back(m(r, cols));
    }
    view.layers.push_back({Matrix(rows, cols, std::move(g)), ColumnVector(std::move(b))});
  }
  return view;
}

}  // namespace matgrad
