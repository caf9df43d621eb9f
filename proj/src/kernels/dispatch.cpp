#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"
#include "votedyn/kernels.hpp"

namespace votedyn::kernels {

#ifndef VOTEDYN_HAVE_AVX2
const KernelTable* avx2_table_if_built() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* pick_default() {
  if (const char* env = std::getenv("VOTEDYN_SIMD"); env != nullptr) {
    if (std::string_view(env) == "scalar") return &scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{pick_default()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() {
  static const KernelTable* table = cpu_has_avx2() ? avx2_table_if_built() : nullptr;
  return table;
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  const KernelTable* t = isa == Isa::kAvx2 ? avx2_kernels() : &scalar_kernels();
  if (t == nullptr) t = &scalar_kernels();
  active_slot().store(t, std::memory_order_relaxed);
}

}  // namespace votedyn::kernels
