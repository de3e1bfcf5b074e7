// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "matgrad/kernels.hpp"

namespace matgrad::kernels::detail {

#if defined(MATGRAD_HAVE_AVX2_TU)
const KernelTable& avx2_kernels() noexcept;
#endif
#if defined(MATGRAD_HAVE_NEON_TU)
const KernelTable& neon_kernels() noexcept;
#endif

}  // namespace matgrad::kernels::detail
