#include <cstdlib>
#include <string_view>

#include "eigentraj/kernels.hpp"

namespace eigentraj::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(EIGENTRAJ_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  const char* env = std::getenv("EIGENTRAJ_KERNELS");
  const std::string_view wanted = env ? env : "";
  if (wanted == "scalar") return scalar::table;
  if (const KernelTable* t = table_for(Isa::avx2); t != nullptr) return *t;
  return scalar::table;
}

}  // namespace

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2();
  }
  return false;
}

const KernelTable* table_for(Isa isa) {
  if (!supported(isa)) return nullptr;
  switch (isa) {
    case Isa::scalar: return &scalar::table;
    case Isa::avx2:
#if defined(EIGENTRAJ_HAVE_AVX2)
      return &avx2::table;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

}  // namespace eigentraj::kernels
