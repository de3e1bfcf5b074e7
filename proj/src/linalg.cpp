// SPDX-License-Identifier: Apache-2.0
#include "matgrad/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "matgrad/kernels.hpp"

namespace matgrad {

std::string to_string(Shape s) {
  return std::to_string(s.rows) + "x" + std::to_string(s.cols);
}

ShapeError::ShapeError(std::string op, Shape lhs, Shape rhs)
    : std::invalid_argument(op + ": incompatible shapes " + to_string(lhs) + " and " +
                            to_string(rhs)),
      op_(std::move(op)),
      lhs_(lhs),
      rhs_(rhs) {}

namespace {

void require_finite(std::span<const double> entries, const char* what) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!std::isfinite(entries[i])) {
      throw NonFiniteError(std::string(what) + ": non-finite entry at index " + std::to_string(i));
    }
  }
}

void print_number(std::ostream& os, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  os << buf;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) {
    throw std::invalid_argument("Matrix: dimensions must be positive, got " +
                                to_string({rows_, cols_}));
  }
  if (entries_.size() != rows_ * cols_) {
    throw std::invalid_argument("Matrix: " + std::to_string(entries_.size()) +
                                " entries do not fill a " + to_string({rows_, cols_}) +
                                " matrix");
  }
  require_finite(entries_, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  entries_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("Matrix: empty initializer");
  require_finite(entries_, "Matrix");
}

Matrix Matrix::zeros(std::size_t rows, std::size_t cols) { return filled(rows, cols, 0.0); }

Matrix Matrix::filled(std::size_t rows, std::size_t cols, double value) {
  return Matrix(rows, cols, std::vector<double>(rows * cols, value));
}

Matrix Matrix::identity(std::size_t n) {
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
  return Matrix(n, n, std::move(e));
}

Matrix Matrix::from_scalar(double s) { return Matrix(1, 1, {s}); }

double Matrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows_ || c >= cols_) {
    throw std::out_of_range("Matrix::at(" + std::to_string(r) + ", " + std::to_string(c) +
                            ") outside " + to_string(shape()));
  }
  return (*this)(r, c);
}

ColumnVector::ColumnVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw std::invalid_argument("ColumnVector: dimension must be positive");
  require_finite(entries_, "ColumnVector");
}

ColumnVector::ColumnVector(std::initializer_list<double> entries)
    : ColumnVector(std::vector<double>(entries)) {}

ColumnVector ColumnVector::zeros(std::size_t dim) { return filled(dim, 0.0); }

ColumnVector ColumnVector::filled(std::size_t dim, double value) {
  return ColumnVector(std::vector<double>(dim, value));
}

double ColumnVector::at(std::size_t i) const {
  if (i >= entries_.size()) {
    throw std::out_of_range("ColumnVector::at(" + std::to_string(i) + ") outside dim " +
                            std::to_string(entries_.size()));
  }
  return entries_[i];
}

std::ostream& operator<<(std::ostream& os, const Matrix& m) {
  os << '[';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r != 0) os << ", ";
    os << '[';
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c != 0) os << ", ";
      print_number(os, m(r, c));
    }
    os << ']';
  }
  return os << ']';
}

std::ostream& operator<<(std::ostream& os, const ColumnVector& v) {
  os << '[';
  for (std::size_t i = 0; i < v.dim(); ++i) {
    if (i != 0) os << ", ";
    print_number(os, v[i]);
  }
  return os << "]^T";
}

// Every entry of a product is one dot() over a row of `a` and a contiguous
// column of `b`, so matrix-matrix and matrix-column products of the same
// operands round identically.
Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul", a.shape(), b.shape());
  const auto& k = kernels::active();
  const Matrix bt = b.cols() == 1 ? b : transpose(b);
  std::vector<double> out(a.rows() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      out[i * b.cols() + j] = k.dot(a.row(i), bt.data().subspan(j * b.rows(), b.rows()));
    }
  }
  return Matrix(a.rows(), b.cols(), std::move(out));
}

ColumnVector matmul(const Matrix& a, const ColumnVector& x) {
  if (a.cols() != x.dim()) throw ShapeError("matmul", a.shape(), x.shape());
  const auto& k = kernels::active();
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = k.dot(a.row(i), x.data());
  return ColumnVector(std::move(out));
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (a.shape() != b.shape()) throw ShapeError("hadamard", a.shape(), b.shape());
  std::vector<double> out(a.size());
  kernels::active().mul(a.data(), b.data(), out);
  return Matrix(a.rows(), a.cols(), std::move(out));
}

ColumnVector hadamard(const ColumnVector& a, const ColumnVector& b) {
  if (a.dim() != b.dim()) throw ShapeError("hadamard", a.shape(), b.shape());
  std::vector<double> out(a.dim());
  kernels::active().mul(a.data(), b.data(), out);
  return ColumnVector(std::move(out));
}

ColumnVector bullet(const ColumnVector& a, const Matrix& b) {
  if (b.cols() != a.dim()) throw ShapeError("bullet", a.shape(), b.shape());
  return as_column(matmul(b, as_matrix(a)));
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  const std::size_t p = b.rows();
  const std::size_t q = b.cols();
  const std::size_t out_cols = a.cols() * q;
  std::vector<double> out(a.rows() * p * out_cols);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      for (std::size_t r = 0; r < p; ++r) {
        std::span<double> dst(out.data() + (i * p + r) * out_cols + j * q, q);
        k.scale(b.row(r), a(i, j), dst);
      }
    }
  }
  return Matrix(a.rows() * p, out_cols, std::move(out));
}

Matrix diag(const ColumnVector& v) {
  const std::size_t n = v.dim();
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = v[i];
  return Matrix(n, n, std::move(e));
}

Matrix transpose(const Matrix& a) {
  std::vector<double> e(a.size());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) e[c * a.rows() + r] = a(r, c);
  }
  return Matrix(a.cols(), a.rows(), std::move(e));
}

double dot(const ColumnVector& a, const ColumnVector& b) {
  if (a.dim() != b.dim()) throw ShapeError("dot", a.shape(), b.shape());
  return kernels::active().dot(a.data(), b.data());
}

Matrix outer(const ColumnVector& a, const ColumnVector& b) {
  std::vector<double> out(a.dim() * b.dim());
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    k.scale(b.data(), a[i], std::span<double>(out.data() + i * b.dim(), b.dim()));
  }
  return Matrix(a.dim(), b.dim(), std::move(out));
}

Matrix as_matrix(const ColumnVector& v) {
  return Matrix(v.dim(), 1, std::vector<double>(v.data().begin(), v.data().end()));
}

Matrix as_row(const ColumnVector& v) {
  return Matrix(1, v.dim(), std::vector<double>(v.data().begin(), v.data().end()));
}

ColumnVector as_column(const Matrix& m) {
  if (m.cols() != 1) throw ShapeError("as_column", m.shape(), Shape{m.rows(), 1});
  return ColumnVector(std::vector<double>(m.data().begin(), m.data().end()));
}

double as_scalar(const Matrix& m) {
  if (m.shape() != Shape{1, 1}) throw ShapeError("as_scalar", m.shape(), Shape{1, 1});
  return m(0, 0);
}

double as_scalar(const ColumnVector& v) {
  if (v.dim() != 1) throw ShapeError("as_scalar", v.shape(), Shape{1, 1});
  return v[0];
}

}  // namespace matgrad
