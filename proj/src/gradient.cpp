// SPDX-License-Identifier: Apache-2.0
#include "matgrad/gradient.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace matgrad {

GradientSet::GradientSet(std::vector<Matrix> layers) : layers_(std::move(layers)) {}

namespace {

constexpr std::array<Engine, 5> kAllEngines{Engine::recursive, Engine::explicit_chain,
                                            Engine::kronecker, Engine::diagonal, Engine::scalar};

std::string engine_names() {
  std::string out;
  for (Engine e : kAllEngines) {
    if (!out.empty()) out += ", ";
    out += engine_name(e);
  }
  return out;
}

// Δ_{k+1} and W_{k+1} are both the 1×1 identity.
const ColumnVector& top_seed() {
  static const ColumnVector seed{1.0};
  return seed;
}

}  // namespace

UnknownEngineError::UnknownEngineError(const std::string& name)
    : std::invalid_argument("unknown engine '" + name + "' (valid: " + engine_names() + ")") {}

std::string_view engine_name(Engine e) noexcept {
  switch (e) {
    case Engine::recursive: return "recursive";
    case Engine::explicit_chain: return "explicit";
    case Engine::kronecker: return "kronecker";
    case Engine::diagonal: return "diagonal";
    case Engine::scalar: return "scalar";
  }
  return "unknown";
}

Engine parse_engine(std::string_view name) {
  for (Engine e : kAllEngines) {
    if (engine_name(e) == name) return e;
  }
  throw UnknownEngineError(std::string(name));
}

std::span<const Engine> all_engines() noexcept { return kAllEngines; }
std::span<const Engine> matrix_engines() noexcept { return std::span(kAllEngines).first(4); }

void check_trace(const ForwardTrace& trace, const WeightSet& w) {
  const std::size_t k = w.layers();
  if (trace.layers() != k || trace.activated.size() != k || trace.derivative.size() != k) {
    throw ShapeError("trace", Shape{trace.layers(), 1}, Shape{k, 1});
  }
  for (std::size_t i = 1; i <= k; ++i) {
    const Shape ws = w.layer(i).shape();
    const Shape expect{trace.n(i).dim(), trace.sigma(i - 1).dim()};
    if (ws != expect) throw ShapeError("trace layer " + std::to_string(i), ws, expect);
    if (trace.sigma(i).dim() != ws.rows || trace.sigma_prime(i).dim() != ws.rows) {
      throw ShapeError("trace layer " + std::to_string(i), trace.sigma(i).shape(), Shape{ws.rows, 1});
    }
  }
  if (trace.n(k).dim() != 1) throw ShapeError("trace output", trace.n(k).shape(), Shape{1, 1});
}

DeltaStack recursive_deltas(const ForwardTrace& trace, const WeightSet& w) {
  check_trace(trace, w);
  const std::size_t k = w.layers();
  DeltaStack stack;
  stack.deltas.resize(k, top_seed());
  ColumnVector delta = top_seed();
  Matrix w_above = Matrix::identity(1);
  for (std::size_t i = k; i >= 1; --i) {
    delta = hadamard(matmul(transpose(w_above), delta), trace.sigma_prime(i));
    stack.deltas[i - 1] = delta;
    w_above = w.layer(i);
  }
  return stack;
}

GradientSet grad_recursive(const ForwardTrace& trace, const WeightSet& w) {
  const DeltaStack stack = recursive_deltas(trace, w);
  std::vector<Matrix> g;
  g.reserve(w.layers());
  for (std::size_t i = 1; i <= w.layers(); ++i) g.push_back(outer(stack.delta(i), trace.sigma(i - 1)));
  return GradientSet(std::move(g));
}

GradientSet grad_explicit(const ForwardTrace& trace, const WeightSet& w, TopFactor top) {
  check_trace(trace, w);
  const std::size_t k = w.layers();
  std::vector<Matrix> g;
  g.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) {
    // Left to right: Σ'_k • W_kᵀ ∘ Σ'_{k-1} • W_{k-1}ᵀ ∘ ... ∘ Σ'_i · Σ_{i-1}ᵀ
    ColumnVector chain = trace.sigma_prime(k);
    for (std::size_t j = k; j > i; --j) {
      const Matrix wt = transpose(w.layer(j));
      if (j == k && top == TopFactor::scalar_product) {
        chain = as_column(kronecker(Matrix::from_scalar(as_scalar(chain)), wt));
      } else {
        chain = bullet(chain, wt);
      }
      chain = hadamard(chain, trace.sigma_prime(j - 1));
    }
    g.push_back(matmul(as_matrix(chain), as_row(trace.sigma(i - 1))));
  }
  return GradientSet(std::move(g));
}

GradientSet grad_kronecker(const ForwardTrace& trace, const WeightSet& w) {
  check_trace(trace, w);
  const std::size_t k = w.layers();
  std::vector<Matrix> g;
  g.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) {
    // Right to left: W_kᵀ · Σ'_k, then Σ'_{k-1} ∘, then W_{k-1}ᵀ ·, ... Σ'_i ∘,
    // finally Σ_{i-1}ᵀ ⊗.
    ColumnVector v = trace.sigma_prime(k);
    for (std::size_t j = k; j > i; --j) {
      v = matmul(transpose(w.layer(j)), v);
      v = hadamard(trace.sigma_prime(j - 1), v);
    }
    g.push_back(kronecker(as_row(trace.sigma(i - 1)), as_matrix(v)));
  }
  return GradientSet(std::move(g));
}

GradientSet grad_diagonal(const ForwardTrace& trace, const WeightSet& w) {
  check_trace(trace, w);
  const std::size_t k = w.layers();
  std::vector<Matrix> g;
  g.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) {
    // Σ̂'_i · W_{i+1}ᵀ · Σ̂'_{i+1} ⋯ W_kᵀ · Σ̂'_k as a plain matrix chain,
    // multiplied left to right.
    Matrix chain = diag(trace.sigma_prime(i));
    for (std::size_t j = i + 1; j <= k; ++j) {
      chain = matmul(chain, transpose(w.layer(j)));
      chain = matmul(chain, diag(trace.sigma_prime(j)));
    }
    g.push_back(kronecker(as_row(trace.sigma(i - 1)), chain));
  }
  return GradientSet(std::move(g));
}

GradientSet grad_scalar_chain(const ForwardTrace& trace, const WeightSet& w) {
  check_trace(trace, w);
  if (trace.input.dim() != 1) throw NotScalarChainError();
  for (std::size_t i = 1; i <= w.layers(); ++i) {
    if (trace.n(i).dim() != 1) throw NotScalarChainError();
  }
  const std::size_t k = w.layers();
  std::vector<double> grads(k);
  double delta = 1.0;
  double w_above = 1.0;
  for (std::size_t i = k; i >= 1; --i) {
    delta = delta * w_above * trace.sigma_prime(i)[0];
    grads[i - 1] = delta * trace.sigma(i - 1)[0];
    w_above = w.layer(i)(0, 0);
  }
  std::vector<Matrix> g;
  g.reserve(k);
  for (double v : grads) g.push_back(Matrix::from_scalar(v));
  return GradientSet(std::move(g));
}

GradientSet compute_gradient(Engine engine, const ForwardTrace& trace, const WeightSet& w) {
  switch (engine) {
    case Engine::recursive: return grad_recursive(trace, w);
    case Engine::explicit_chain: return grad_explicit(trace, w);
    case Engine::kronecker: return grad_kronecker(trace, w);
    case Engine::diagonal: return grad_diagonal(trace, w);
    case Engine::scalar: return grad_scalar_chain(trace, w);
  }
  throw UnknownEngineError("?");
}

GradientSet grad_fd(const NetworkSpec& spec, const WeightSet& w, const ColumnVector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grad_fd: step must be positive");
  w.check_against(spec);
  std::vector<Matrix> layers(w.matrices().begin(), w.matrices().end());
  std::vector<Matrix> g;
  g.reserve(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Matrix base = layers[l];
    std::vector<double> out(base.size());
    for (std::size_t e = 0; e < base.size(); ++e) {
      std::vector<double> entries(base.data().begin(), base.data().end());
      entries[e] = base.data()[e] + h;
      layers[l] = Matrix(base.rows(), base.cols(), entries);
      const double plus = evaluate(spec, WeightSet(layers), x);
      entries[e] = base.data()[e] - h;
      layers[l] = Matrix(base.rows(), base.cols(), entries);
      const double minus = evaluate(spec, WeightSet(layers), x);
      out[e] = (plus - minus) / (2.0 * h);
    }
    layers[l] = base;
    g.emplace_back(base.rows(), base.cols(), std::move(out));
  }
  return GradientSet(std::move(g));
}

double scaled_error(double a, double b, Tolerance tol) noexcept {
  const double denom = std::max({std::abs(a), std::abs(b), tol.abs_floor / tol.rel});
  return std::abs(a - b) / denom;
}

double max_scaled_error(const Matrix& a, const Matrix& b, Tolerance tol) {
  if (a.shape() != b.shape()) throw ShapeError("compare", a.shape(), b.shape());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, scaled_error(a.data()[i], b.data()[i], tol));
  }
  return worst;
}

double max_scaled_error(const ColumnVector& a, const ColumnVector& b, Tolerance tol) {
  return max_scaled_error(as_matrix(a), as_matrix(b), tol);
}

double max_scaled_error(const GradientSet& a, const GradientSet& b, Tolerance tol) {
  if (a.layers() != b.layers()) throw ShapeError("compare", Shape{a.layers(), 1}, Shape{b.layers(), 1});
  double worst = 0.0;
  for (std::size_t i = 1; i <= a.layers(); ++i) {
    worst = std::max(worst, max_scaled_error(a.layer(i), b.layer(i), tol));
  }
  return worst;
}

}  // namespace matgrad
