// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "mcad/simd/kernels.hpp"

namespace mcad::simd {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(MCAD_WITH_AVX2) && defined(__GNUC__)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
#if defined(MCAD_WITH_AVX2)
  if (isa == Isa::kAvx2 && supported(Isa::kAvx2)) return avx2::table();
#else
  (void)isa;
#endif
  return scalar::table();
}

namespace {

const KernelTable* initial_table() {
  Isa wanted = Isa::kAvx2;
  if (const char* env = std::getenv("MCAD_SIMD")) {
    if (std::string(env) == "scalar") wanted = Isa::kScalar;
  }
  return &table_for(wanted);
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{initial_table()};
  return t;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

bool select(Isa isa) {
  if (!supported(isa)) return false;
  current().store(&table_for(isa), std::memory_order_relaxed);
  return true;
}

}  // namespace mcad::simd
