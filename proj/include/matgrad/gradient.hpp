// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "matgrad/linalg.hpp"
#include "matgrad/network.hpp"

// ∇_W f for the network function, four ways plus the 1-D special case.
//
//   recursive  Δ_{k+1} = 1, W_{k+1} = 1,
//              Δ_i = (W_{i+1}ᵀ · Δ_{i+1}) ∘ Σ'_i,   ∇_{W_i} f = Δ_i · Σ_{i-1}ᵀ
//   explicit   each layer's chain written out and read left to right:
//              ∇_{W_i} f = (Σ'_k • W_kᵀ) ∘ (Σ'_{k-1} • W_{k-1}ᵀ) ∘ ... ∘ (Σ'_i · Σ_{i-1}ᵀ)
//   kronecker  bullets removed by reversing the factors, read right to left:
//              ∇_{W_i} f = Σ_{i-1}ᵀ ⊗ Σ'_i ∘ (W_{i+1}ᵀ · Σ'_{i+1}) ∘ ... ∘ (W_kᵀ · Σ'_k)
//   diagonal   Hadamard products replaced by diagonal matrices Σ̂'_j:
//              ∇_{W_i} f = Σ_{i-1}ᵀ ⊗ (Σ̂'_i · W_{i+1}ᵀ · Σ̂'_{i+1} ⋯ W_kᵀ · Σ̂'_k)
//   scalar     n_0 = ... = n_k = 1, plain scalar recursion Δ_i = Δ_{i+1} w_{i+1} σ'_i
//
// The explicit, kronecker and diagonal engines rebuild every layer's chain
// from the top instead of sharing partial products, so each one is an
// independent evaluation of its formula.
namespace matgrad {

class GradientSet {
 public:
  explicit GradientSet(std::vector<Matrix> layers);

  std::size_t layers() const noexcept { return layers_.size(); }
  const Matrix& layer(std::size_t i) const { return layers_.at(i - 1); }
  std::span<const Matrix> matrices() const noexcept { return layers_; }

  friend bool operator==(const GradientSet&, const GradientSet&) = default;

 private:
  std::vector<Matrix> layers_;
};

struct DeltaStack {
  std::vector<ColumnVector> deltas;  // Δ_1..Δ_k

  const ColumnVector& delta(std::size_t i) const { return deltas.at(i - 1); }
};

enum class Engine { recursive, explicit_chain, kronecker, diagonal, scalar };

class UnknownEngineError : public std::invalid_argument {
 public:
  explicit UnknownEngineError(const std::string& name);
};

std::string_view engine_name(Engine e) noexcept;
Engine parse_engine(std::string_view name);
std::span<const Engine> all_engines() noexcept;
// The four engines valid on every network.
std::span<const Engine> matrix_engines() noexcept;

// Throws ShapeError when the trace was not produced by these weights' shapes.
void check_trace(const ForwardTrace& trace, const WeightSet& w);

DeltaStack recursive_deltas(const ForwardTrace& trace, const WeightSet& w);
GradientSet grad_recursive(const ForwardTrace& trace, const WeightSet& w);

// How the top factor Σ'_k • W_kᵀ is formed. Σ'_k is a single number, so the
// bullet product and plain scalar multiplication of W_kᵀ must agree.
enum class TopFactor { bullet, scalar_product };

GradientSet grad_explicit(const ForwardTrace& trace, const WeightSet& w,
                          TopFactor top = TopFactor::bullet);
GradientSet grad_kronecker(const ForwardTrace& trace, const WeightSet& w);
GradientSet grad_diagonal(const ForwardTrace& trace, const WeightSet& w);

class NotScalarChainError : public std::invalid_argument {
 public:
  NotScalarChainError() : std::invalid_argument("scalar engine needs every dimension n_i == 1") {}
};

GradientSet grad_scalar_chain(const ForwardTrace& trace, const WeightSet& w);

GradientSet compute_gradient(Engine engine, const ForwardTrace& trace, const WeightSet& w);

constexpr double kDefaultFdStep = 1e-5;

// Central differences (f(W + h E_ij) - f(W - h E_ij)) / 2h over every entry,
// frozen entries included.
GradientSet grad_fd(const NetworkSpec& spec, const WeightSet& w, const ColumnVector& x,
                    double h = kDefaultFdStep);

// Pass criterion |a - b| <= max(rel * max(|a|, |b|), abs_floor).
struct Tolerance {
  double rel;
  double abs_floor;
};

inline constexpr Tolerance kEngineTolerance{1e-12, 1e-14};
inline constexpr Tolerance kFdTolerance{5e-6, 1e-8};

// |a - b| / max(|a|, |b|, abs_floor / rel); at most tol.rel exactly when the
// pair passes.
double scaled_error(double a, double b, Tolerance tol) noexcept;
double max_scaled_error(const Matrix& a, const Matrix& b, Tolerance tol);
double max_scaled_error(const ColumnVector& a, const ColumnVector& b, Tolerance tol);
double max_scaled_error(const GradientSet& a, const GradientSet& b, Tolerance tol);

// ∇_{Σ_r} f for r = 1..k-1, estimated by central differences on Σ_r(N_r)
// treated as a free variable and pushed through layers r+1..k.
struct SigmaGradient {
  std::vector<ColumnVector> columns;  // r = 1..k-1 stored at r-1

  const ColumnVector& at(std::size_t r) const { return columns.at(r - 1); }
};

SigmaGradient sigma_gradient_fd(const NetworkSpec& spec, const ForwardTrace& trace,
                                const WeightSet& w, double h = kDefaultFdStep);

struct IdentityCheck {
  std::size_t layer;
  double error;  // max scaled error over the layer's entries
};

// Per-layer residuals of the two identities the matrix backpropagation
// formulas are built from:
//   weight identity   ∇_{W_r} f = (∇_{Σ_r} f) ∘ Σ'_r · Σ_{r-1}ᵀ          r = 1..k
//   sigma recurrence  ∇_{Σ_r} f = (∇_{Σ_{r+1}} f) ∘ Σ'_{r+1} • W_{r+1}ᵀ   r = 1..k-1
// with ∇_{Σ_k} f = 1, ∇_{Σ_r} f from sigma_gradient_fd and ∇_{W_r} f from the
// recursive engine. Discrepancies are reported, never thrown.
struct IdentityReport {
  SigmaGradient sigma_gradient;
  std::vector<IdentityCheck> weight_identity;
  std::vector<IdentityCheck> sigma_recurrence;
  double max_weight_identity = 0.0;
  double max_sigma_recurrence = 0.0;
  bool passed = true;

  bool has_interior_layers() const noexcept { return !sigma_recurrence.empty(); }
};

IdentityReport check_proof_identities(const NetworkSpec& spec, const ForwardTrace& trace,
                                      const WeightSet& w, double h = kDefaultFdStep,
                                      Tolerance tol = kFdTolerance);

}  // namespace matgrad
