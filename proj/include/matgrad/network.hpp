// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "matgrad/activation.hpp"
#include "matgrad/linalg.hpp"

// The homogeneous network function
//
//   f(X; W) = Σ_k(W_k · Σ_{k-1}(W_{k-1} · ... Σ_1(W_1 · X)))
//
// with W_i of shape n_i × n_{i-1} and scalar output (n_k = 1). Layers are
// indexed 1..k in every accessor below; index 0 of an activated column is the
// input X itself.
namespace matgrad {

class SpecError : public std::invalid_argument {
 public:
  explicit SpecError(const std::string& what) : std::invalid_argument(what) {}
};

// A pre-activation or activated column overflowed in the given layer.
class NonFiniteIntermediateError : public std::domain_error {
 public:
  NonFiniteIntermediateError(std::size_t layer, const std::string& detail);
  std::size_t layer() const noexcept { return layer_; }

 private:
  std::size_t layer_;
};

class NetworkSpec {
 public:
  // dims = n_0..n_k, activations = Σ_1..Σ_k.
  NetworkSpec(std::vector<std::size_t> dims, std::vector<LayerActivation> activations);

  // Same activation on every coordinate of every layer.
  static NetworkSpec uniform(std::vector<std::size_t> dims, const Activation& act);

  std::size_t layers() const noexcept { return dims_.size() - 1; }
  std::size_t input_dim() const noexcept { return dims_.front(); }
  std::size_t width(std::size_t i) const { return dims_.at(i); }
  std::span<const std::size_t> dims() const noexcept { return dims_; }
  const LayerActivation& activation(std::size_t layer) const { return activations_.at(layer - 1); }
  Shape weight_shape(std::size_t layer) const { return {dims_.at(layer), dims_.at(layer - 1)}; }
  bool is_scalar_chain() const noexcept;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<LayerActivation> activations_;
};

// Row-major per-matrix mask; true marks an entry the trainer must not touch.
using FrozenMask = std::vector<std::vector<bool>>;

class WeightSet {
 public:
  explicit WeightSet(std::vector<Matrix> layers, FrozenMask frozen = {});

  std::size_t layers() const noexcept { return layers_.size(); }
  const Matrix& layer(std::size_t i) const { return layers_.at(i - 1); }
  std::span<const Matrix> matrices() const noexcept { return layers_; }

  bool has_frozen() const noexcept { return !frozen_.empty(); }
  bool frozen(std::size_t layer, std::size_t r, std::size_t c) const;
  const FrozenMask& frozen_mask() const noexcept { return frozen_; }

  // Same mask, new matrices of identical shapes.
  WeightSet with_layers(std::vector<Matrix> layers) const;

  // Throws ShapeError unless W_i is n_i × n_{i-1} for every layer.
  void check_against(const NetworkSpec& spec) const;

  friend bool operator==(const WeightSet&, const WeightSet&) = default;

 private:
  std::vector<Matrix> layers_;
  FrozenMask frozen_;
};

struct ForwardTrace {
  ColumnVector input;
  std::vector<ColumnVector> pre;         // N_1..N_k
  std::vector<ColumnVector> activated;   // Σ_1(N_1)..Σ_k(N_k)
  std::vector<ColumnVector> derivative;  // Σ'_1(N_1)..Σ'_k(N_k)
  double output = 0.0;

  std::size_t layers() const noexcept { return pre.size(); }
  const ColumnVector& n(std::size_t i) const { return pre.at(i - 1); }
  // sigma(0) is X.
  const ColumnVector& sigma(std::size_t i) const { return i == 0 ? input : activated.at(i - 1); }
  const ColumnVector& sigma_prime(std::size_t i) const { return derivative.at(i - 1); }
};

ForwardTrace forward(const NetworkSpec& spec, const WeightSet& w, const ColumnVector& x);

// f only, starting from an arbitrary value of Σ_from (Σ_0 = X). Layers
// from+1..k are evaluated; the cached trace is not built.
double evaluate_suffix(const NetworkSpec& spec, const WeightSet& w, std::size_t from,
                       const ColumnVector& sigma_from);

double evaluate(const NetworkSpec& spec, const WeightSet& w, const ColumnVector& x);

constexpr double kDefaultInitScale = 0.5;

// Entries i.i.d. uniform in [-scale, scale), drawn layer by layer in row-major
// order from std::mt19937_64 seeded with `seed`. The uniform variate uses the
// top 53 bits of each draw so results do not depend on the standard library's
// distribution implementation.
WeightSet init_weights(const NetworkSpec& spec, std::uint64_t seed,
                       double scale = kDefaultInitScale);

// Appends the constant coordinate: [x_1..x_m]ᵀ -> [x_1..x_m, 1]ᵀ.
ColumnVector lift_input(const ColumnVector& x_affine);

struct AffineNetwork {
  NetworkSpec spec;
  WeightSet weights;
};

// Builds the homogeneous network equivalent to an affine one.
//
// affine_dims = m_0..m_k (m_k == 1) and affine_activations give the genuine
// neurons of each layer. Every layer below the top gains a formal neuron with
// identity activation whose weight row is frozen at [0, ..., 0, 1], and the
// input gains the constant coordinate, so n_i = m_i + 1 for i < k.
AffineNetwork embed_affine(std::span<const std::size_t> affine_dims,
                           std::span<const LayerActivation> affine_activations,
                           std::uint64_t seed, double scale = kDefaultInitScale);

// The homogeneous spec embed_affine would build, without weights.
NetworkSpec affine_spec(std::span<const std::size_t> affine_dims,
                        std::span<const LayerActivation> affine_activations);

// Mask freezing the last row of every W_i with i < k.
FrozenMask affine_frozen_mask(const NetworkSpec& spec);

// Validates that `w` carries the [0, ..., 0, 1] formal rows and the identity
// formal activations, then returns it with the affine mask attached.
WeightSet freeze_affine_rows(const NetworkSpec& spec, WeightSet w);

struct AffineLayer {
  Matrix weights;     // genuine rows × genuine inputs
  ColumnVector bias;  // last column of W_i without its last element (whole column at the top)
};

struct AffineView {
  std::size_t genuine_input_dim = 0;
  std::vector<AffineLayer> layers;  // 1..k stored at 0..k-1
};

AffineView affine_view(const NetworkSpec& spec, const WeightSet& w);

}  // namespace matgrad
