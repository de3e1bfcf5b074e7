// SPDX-License-Identifier: Apache-2.0
#include "matgrad/kernels.hpp"

namespace matgrad::kernels {
namespace {

double dot_scalar(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void mul_scalar(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}

void scale_scalar(std::span<const double> a, double s, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * a[i];
}

constexpr KernelTable kScalar{Isa::scalar, &dot_scalar, &mul_scalar, &scale_scalar};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace matgrad::kernels
