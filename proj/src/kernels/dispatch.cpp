#include <atomic>
#include <cstdlib>
#include <string>

#include "graysl/error.hpp"
#include "graysl/kernels.hpp"

namespace graysl::kernels {

namespace {

const KernelTable* detect() {
#if defined(GRAYSL_HAVE_AVX2)
  const char* env = std::getenv("GRAYSL_ISA");
  const bool want_scalar = env != nullptr && std::string(env) == "scalar";
  if (!want_scalar && isa_available(Isa::Avx2)) return &avx2::kTable;
#endif
  return &scalar::kTable;
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(GRAYSL_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") != 0;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_available(isa)) {
    throw ConfigError("kernel ISA " + std::string(isa_name(isa)) + " not available on this CPU");
  }
#if defined(GRAYSL_HAVE_AVX2)
  if (isa == Isa::Avx2) return avx2::kTable;
#endif
  return scalar::kTable;
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void force_isa(Isa isa) { slot().store(&table_for(isa), std::memory_order_release); }

}  // namespace graysl::kernels
