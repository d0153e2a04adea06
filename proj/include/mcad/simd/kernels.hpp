// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel inner loops used by every numkit kernel. Each routine has a
// scalar reference implementation and, where the target supports it, an AVX2
// variant. The active table is chosen once at startup from CPUID and can be
// overridden with MCAD_SIMD=scalar|avx2 or select().

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>

namespace mcad::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // out = max(x, 0)
  void (*relu)(const double* x, double* out, std::size_t n);
  // out = x > 0 ? g : 0
  void (*relu_mask)(const double* x, const double* g, double* out, std::size_t n);
};

namespace scalar {
const KernelTable& table();
}
#if defined(MCAD_WITH_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif

bool supported(Isa isa);
// Table for a specific ISA; falls back to scalar when unsupported.
const KernelTable& table_for(Isa isa);
const KernelTable& active();
// Returns false (and leaves the selection unchanged) if the ISA is unavailable.
bool select(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void scale(double alpha, std::span<double> x) {
  active().scale(alpha, x.data(), x.size());
}

}  // namespace mcad::simd
