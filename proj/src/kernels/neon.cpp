// SPDX-License-Identifier: Apache-2.0
// AdvSIMD is mandatory on AArch64, so this variant needs no runtime probe.
#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace matgrad::kernels::detail {
namespace {

double dot_neon(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const double* pa = a.data();
  const double* pb = b.data();
  std::size_t i = 0;
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(pa + i), vld1q_f64(pb + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(pa + i + 2), vld1q_f64(pb + i + 2));
  }
  for (; i + 2 <= n; i += 2) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(pa + i), vld1q_f64(pb + i));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += pa[i] * pb[i];
  return acc;
}

void mul_neon(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  const std::size_t n = out.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out.data() + i, vmulq_f64(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void scale_neon(std::span<const double> a, double s, std::span<double> out) {
  const std::size_t n = out.size();
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out.data() + i, vmulq_f64(vs, vld1q_f64(a.data() + i)));
  }
  for (; i < n; ++i) out[i] = s * a[i];
}

constexpr KernelTable kNeon{Isa::neon, &dot_neon, &mul_neon, &scale_neon};

}  // namespace

const KernelTable& neon_kernels() noexcept { return kNeon; }

}  // namespace matgrad::kernels::detail
