// SPDX-License-Identifier: Apache-2.0
#include "matgrad/activation.hpp"

#include <array>
#include <cmath>

namespace matgrad {
namespace {

double identity_value(double x) { return x; }
double identity_derivative(double) { return 1.0; }

double sigmoid_value(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double sigmoid_derivative(double x) {
  const double s = sigmoid_value(x);
  return s * (1.0 - s);
}

double tanh_value(double x) { return std::tanh(x); }
double tanh_derivative(double x) {
  const double t = std::tanh(x);
  return 1.0 - t * t;
}

double relu_value(double x) { return x > 0.0 ? x : 0.0; }
double relu_derivative(double x) { return x > 0.0 ? 1.0 : 0.0; }

constexpr std::array<double, 1> kReluKinks{0.0};

const std::array<Activation, 4> kCatalog{{
    {"identity", &identity_value, &identity_derivative, {}},
    {"sigmoid", &sigmoid_value, &sigmoid_derivative, {}},
    {"tanh", &tanh_value, &tanh_derivative, {}},
    {"relu", &relu_value, &relu_derivative, kReluKinks},
}};

std::string catalog_names() {
  std::string out;
  for (const auto& a : kCatalog) {
    if (!out.empty()) out += ", ";
    out += a.name;
  }
  return out;
}

void require_dims(const LayerActivation& sig, const ColumnVector& x, const char* op) {
  if (sig.dim() != x.dim()) throw ShapeError(op, Shape{sig.dim(), 1}, x.shape());
}

}  // namespace

UnknownActivationError::UnknownActivationError(const std::string& name)
    : std::invalid_argument("unknown activation '" + name + "' (valid: " + catalog_names() + ")") {}

std::span<const Activation> activation_catalog() noexcept { return kCatalog; }

const Activation& catalog_lookup(std::string_view name) {
  for (const auto& a : kCatalog) {
    if (a.name == name) return a;
  }
  throw UnknownActivationError(std::string(name));
}

LayerActivation::LayerActivation(std::vector<Activation> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("LayerActivation: layer width must be positive");
}

LayerActivation LayerActivation::uniform(const Activation& act, std::size_t width) {
  return LayerActivation(std::vector<Activation>(width, act));
}

bool LayerActivation::is_uniform() const noexcept {
  for (const auto& a : entries_) {
    if (!(a == entries_.front())) return false;
  }
  return true;
}

ColumnVector apply(const LayerActivation& sig, const ColumnVector& x) {
  require_dims(sig, x, "apply");
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = sig[i].value(x[i]);
  return ColumnVector(std::move(out));
}

ColumnVector apply_derivative(const LayerActivation& sig, const ColumnVector& x) {
  require_dims(sig, x, "apply_derivative");
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) out[i] = sig[i].derivative(x[i]);
  return ColumnVector(std::move(out));
}

}  // namespace matgrad
