// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Data-parallel inner loops behind the linalg products. Every kernel has a
// scalar reference version; SIMD versions are picked once at runtime from
// what the CPU reports and can be overridden with MATGRAD_ISA=scalar|avx2|neon.
//
// Element-wise kernels (mul, scale) are bit-identical across ISAs. The dot
// reduction is not: SIMD versions reassociate the sum and use fused
// multiply-add, so they agree with the scalar loop only up to rounding.
namespace matgrad::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]; a.size() == b.size()
  double (*dot)(std::span<const double> a, std::span<const double> b);
  // out[i] = a[i] * b[i]; all spans the same length, out may alias a or b
  void (*mul)(std::span<const double> a, std::span<const double> b, std::span<double> out);
  // out[i] = s * a[i]
  void (*scale)(std::span<const double> a, double s, std::span<double> out);
};

const KernelTable& scalar_table() noexcept;

// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

const KernelTable* table_for(Isa isa) noexcept;

// Best ISA available on this machine, ignoring MATGRAD_ISA.
Isa detect_best() noexcept;

// The table every linalg operation uses.
const KernelTable& active() noexcept;

// Switches the active table. Returns false (and changes nothing) when the
// requested ISA is unavailable. Not meant to be called while other threads
// are running linalg operations.
bool select(Isa isa) noexcept;

}  // namespace matgrad::kernels
