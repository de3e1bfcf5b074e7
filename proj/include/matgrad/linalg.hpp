// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Dense real matrices and columns with the handful of products the gradient
// formulas need: A·B, A∘B, the column-by-matrix "bullet" a•B = B·a, the
// Kronecker product, diag(v), transpose, dot and outer.
//
// Shapes never broadcast. A scalar, a 1×1 matrix and a 1-dim column are three
// different things and only convert through the named helpers at the bottom.
namespace matgrad {

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(Shape s);

class ShapeError : public std::invalid_argument {
 public:
  ShapeError(std::string op, Shape lhs, Shape rhs);

  const std::string& op() const noexcept { return op_; }
  Shape lhs() const noexcept { return lhs_; }
  Shape rhs() const noexcept { return rhs_; }

 private:
  std::string op_;
  Shape lhs_;
  Shape rhs_;
};

// Thrown by constructors handed NaN/Inf, including results of arithmetic that
// overflowed.
class NonFiniteError : public std::domain_error {
 public:
  explicit NonFiniteError(const std::string& what) : std::domain_error(what) {}
};

class ColumnVector;

// Row-major, immutable after construction, rows and cols at least 1, every
// entry finite.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix zeros(std::size_t rows, std::size_t cols);
  static Matrix filled(std::size_t rows, std::size_t cols, double value);
  static Matrix identity(std::size_t n);
  // 1×1 matrix holding s.
  static Matrix from_scalar(double s);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Shape shape() const noexcept { return {rows_, cols_}; }
  std::size_t size() const noexcept { return entries_.size(); }

  double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const;
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(entries_).subspan(r * cols_, cols_);
  }
  std::span<const double> data() const noexcept { return entries_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
};

// dim at least 1, every entry finite.
class ColumnVector {
 public:
  explicit ColumnVector(std::vector<double> entries);
  ColumnVector(std::initializer_list<double> entries);

  static ColumnVector zeros(std::size_t dim);
  static ColumnVector filled(std::size_t dim, double value);

  std::size_t dim() const noexcept { return entries_.size(); }
  Shape shape() const noexcept { return {entries_.size(), 1}; }

  double operator[](std::size_t i) const { return entries_[i]; }
  double at(std::size_t i) const;
  std::span<const double> data() const noexcept { return entries_; }

  friend bool operator==(const ColumnVector&, const ColumnVector&) = default;

 private:
  std::vector<double> entries_;
};

std::ostream& operator<<(std::ostream& os, const Matrix& m);
std::ostream& operator<<(std::ostream& os, const ColumnVector& v);

Matrix matmul(const Matrix& a, const Matrix& b);
// Same arithmetic as matmul(a, as_matrix(x)).
ColumnVector matmul(const Matrix& a, const ColumnVector& x);

Matrix hadamard(const Matrix& a, const Matrix& b);
ColumnVector hadamard(const ColumnVector& a, const ColumnVector& b);

// a • B = B · a. Requires b.cols() == a.dim(); a 1-dim column against an
// n×1 matrix therefore acts as scalar multiplication.
ColumnVector bullet(const ColumnVector& a, const Matrix& b);

// Block (i, j) of the result is a(i, j) · b.
Matrix kronecker(const Matrix& a, const Matrix& b);

Matrix diag(const ColumnVector& v);
Matrix transpose(const Matrix& a);
double dot(const ColumnVector& a, const ColumnVector& b);
// a · bᵀ, shape a.dim() × b.dim().
Matrix outer(const ColumnVector& a, const ColumnVector& b);

// Explicit conversions.
Matrix as_matrix(const ColumnVector& v);    // dim × 1
Matrix as_row(const ColumnVector& v);       // 1 × dim
ColumnVector as_column(const Matrix& m);    // requires cols == 1
double as_scalar(const Matrix& m);          // requires 1 × 1
double as_scalar(const ColumnVector& v);    // requires dim == 1

}  // namespace matgrad
