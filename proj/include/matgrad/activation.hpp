// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "matgrad/linalg.hpp"

namespace matgrad {

// A scalar activation σ together with σ'. Kinks are the points where σ is not
// differentiable; σ' is still defined there by convention (relu'(0) = 0).
struct Activation {
  std::string_view name;
  double (*value)(double);
  double (*derivative)(double);
  std::span<const double> kinks;

  friend bool operator==(const Activation& a, const Activation& b) { return a.name == b.name; }
};

class UnknownActivationError : public std::invalid_argument {
 public:
  explicit UnknownActivationError(const std::string& name);
};

// identity, sigmoid, tanh, relu
std::span<const Activation> activation_catalog() noexcept;
const Activation& catalog_lookup(std::string_view name);

// Σ = [σ_1, ..., σ_n]ᵀ, one scalar activation per coordinate.
class LayerActivation {
 public:
  explicit LayerActivation(std::vector<Activation> entries);
  static LayerActivation uniform(const Activation& act, std::size_t width);

  std::size_t dim() const noexcept { return entries_.size(); }
  const Activation& operator[](std::size_t i) const { return entries_[i]; }
  std::span<const Activation> entries() const noexcept { return entries_; }
  bool is_uniform() const noexcept;

  friend bool operator==(const LayerActivation&, const LayerActivation&) = default;

 private:
  std::vector<Activation> entries_;
};

ColumnVector apply(const LayerActivation& sig, const ColumnVector& x);
ColumnVector apply_derivative(const LayerActivation& sig, const ColumnVector& x);

}  // namespace matgrad
