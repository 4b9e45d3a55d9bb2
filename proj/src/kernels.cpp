#include "msi/kernels.hpp"

#include "msi/common.hpp"

namespace msi::kernels {

const KernelTable* avx2_table_impl();  // defined in kernels_avx2.cpp

const KernelTable* avx2_table() {
  static const KernelTable* table = [] {
    const KernelTable* t = avx2_table_impl();
    if (t == nullptr) return t;
    return __builtin_cpu_supports("avx2") ? t : nullptr;
  }();
  return table;
}

namespace {
const KernelTable* g_active = nullptr;

const KernelTable* best() {
  const KernelTable* t = avx2_table();
  return t != nullptr ? t : &scalar_table();
}
}  // namespace

const KernelTable& active() {
  if (g_active == nullptr) g_active = best();
  return *g_active;
}

void select(const std::string& which) {
  if (which == "auto") {
    g_active = best();
  } else if (which == "scalar") {
    g_active = &scalar_table();
  } else if (which == "avx2") {
    const KernelTable* t = avx2_table();
    if (t == nullptr) throw DataError("avx2 kernels requested but this CPU does not support AVX2");
    g_active = t;
  } else {
    throw DataError("unknown kernel variant: " + which + " (expected auto|scalar|avx2)");
  }
}

std::string active_name() { return active().name; }

}  // namespace msi::kernels
